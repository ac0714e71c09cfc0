#include "hetflow/kernels.hpp"

#include <cstdint>

#include "hetflow/model.hpp"

namespace hetflow::kernels {

namespace {

inline std::int64_t ssize(std::span<const double> s) { return static_cast<std::int64_t>(s.size()); }

}  // namespace

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  const std::int64_t n = ssize(w);
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t i = 0; i < n; ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

double face_energy(std::span<const double> face_w, double h, std::span<const double> u) {
  const std::int64_t n = ssize(u);
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t j = 0; j <= n; ++j) {
    const double right = j < n ? u[j] : 0.0;
    const double left = j > 0 ? u[j - 1] : 0.0;
    const double d = right - left;
    sum += face_w[j] * d * d;
  }
  return sum / h;
}

void tridiag_apply(std::span<const double> diag, std::span<const double> off,
                   std::span<const double> x, std::span<double> y) {
  const std::int64_t n = ssize(diag);
#pragma omp parallel for schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
}

void nemitski(const NodalModel& m, std::span<const double> u, std::span<double> out) {
  const std::int64_t n = ssize(u);
#pragma omp parallel for schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t i = 0; i < n; ++i) out[i] = m.F(static_cast<std::size_t>(i), u[i]);
}

void explicit_part(const NodalModel& m, std::span<const double> u, std::span<double> out) {
  const std::int64_t n = ssize(u);
#pragma omp parallel for schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[i] = m.F(k, u[i]) + m.damping[k] * u[i];
  }
}

void nemitski_derivative(const NodalModel& m, std::span<const double> u, std::span<double> out) {
  const std::int64_t n = ssize(u);
#pragma omp parallel for schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t i = 0; i < n; ++i) out[i] = m.dF(static_cast<std::size_t>(i), u[i]);
}

double potential_energy(const NodalModel& m, std::span<const double> w,
                        std::span<const double> u) {
  const std::int64_t n = ssize(u);
  double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static) if (n >= static_cast<std::int64_t>(parallel_threshold))
  for (std::int64_t i = 0; i < n; ++i) sum += w[i] * m.P(static_cast<std::size_t>(i), u[i]);
  return sum;
}

}  // namespace hetflow::kernels

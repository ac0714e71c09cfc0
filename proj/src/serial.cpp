// Sequential reference versions of the kernels in kernels.cpp.

#include <cstddef>

#include "hetflow/kernels.hpp"
#include "hetflow/model.hpp"

namespace hetflow::serial {

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * a[i] * b[i];
  return sum;
}

double face_energy(std::span<const double> face_w, double h, std::span<const double> u) {
  const std::size_t n = u.size();
  double sum = 0.0;
  double left = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double right = j < n ? u[j] : 0.0;
    const double d = right - left;
    sum += face_w[j] * d * d;
    left = right;
  }
  return sum / h;
}

void tridiag_apply(std::span<const double> diag, std::span<const double> off,
                   std::span<const double> x, std::span<double> y) {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += off[i - 1] * x[i - 1];
    if (i + 1 < n) v += off[i] * x[i + 1];
    y[i] = v;
  }
}

void nemitski(const NodalModel& m, std::span<const double> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = m.F(i, u[i]);
}

void explicit_part(const NodalModel& m, std::span<const double> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = m.F(i, u[i]) + m.damping[i] * u[i];
}

void nemitski_derivative(const NodalModel& m, std::span<const double> u, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = m.dF(i, u[i]);
}

double potential_energy(const NodalModel& m, std::span<const double> w,
                        std::span<const double> u) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * m.P(i, u[i]);
  return sum;
}

}  // namespace hetflow::serial

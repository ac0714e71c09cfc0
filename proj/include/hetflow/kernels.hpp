#pragma once

// Data-parallel inner loops. Every kernel in hetflow::kernels has a plain
// sequential twin in hetflow::serial with identical semantics; the serial
// versions are the reference the tests compare against and the baseline the
// benchmark measures. The OpenMP versions only fork above parallel_threshold.

#include <cstddef>
#include <span>

namespace hetflow {

struct NodalModel;

namespace kernels {

inline constexpr std::size_t parallel_threshold = 8192;

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);

/// sum_j face_w[j] * (u_j - u_{j-1})^2 / h over j = 0..n with zero padding.
double face_energy(std::span<const double> face_w, double h, std::span<const double> u);

/// y = T x for the symmetric tridiagonal (diag, off).
void tridiag_apply(std::span<const double> diag, std::span<const double> off,
                   std::span<const double> x, std::span<double> y);

/// out_i = F(x_i, u_i).
void nemitski(const NodalModel& m, std::span<const double> u, std::span<double> out);

/// out_i = F(x_i, u_i) + damping_i u_i, the explicitly treated part.
void explicit_part(const NodalModel& m, std::span<const double> u, std::span<double> out);

/// out_i = F'_u(x_i, u_i).
void nemitski_derivative(const NodalModel& m, std::span<const double> u, std::span<double> out);

/// sum_i w_i P(x_i, u_i).
double potential_energy(const NodalModel& m, std::span<const double> w,
                        std::span<const double> u);

}  // namespace kernels

namespace serial {

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
double face_energy(std::span<const double> face_w, double h, std::span<const double> u);
void tridiag_apply(std::span<const double> diag, std::span<const double> off,
                   std::span<const double> x, std::span<double> y);
void nemitski(const NodalModel& m, std::span<const double> u, std::span<double> out);
void explicit_part(const NodalModel& m, std::span<const double> u, std::span<double> out);
void nemitski_derivative(const NodalModel& m, std::span<const double> u, std::span<double> out);
double potential_energy(const NodalModel& m, std::span<const double> w,
                        std::span<const double> u);

}  // namespace serial
}  // namespace hetflow

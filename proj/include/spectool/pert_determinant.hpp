#pragma once

// Regularized determinants det_p(I + A), finite-section perturbation
// determinants u_p(lambda) = det_p(I + (J - J_0)(J_0 - lambda)^{-1}), their
// disk pullbacks f_p(z) = u_p(z + 1/z), and the growth-bound margins.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "complex_eig.hpp"
#include "disk_analysis.hpp"
#include "jacobi_model.hpp"

namespace spectool::det {

using spectool::cplx;
using jacobi::JacobiOperator;

/// det_p(I + A) = det(I + A) * exp(sum_{j<p} tr((-A)^j) / j), in log form.
inline LogDet det_regularized_log(const DenseMatrix& a, int p) {
  if (p < 1) throw std::invalid_argument("det_regularized: p must be >= 1");
  const std::size_t n = a.size();
  LogDet d = log_determinant(DenseMatrix::identity(n) + a);
  if (p == 1 || std::isinf(d.log_modulus)) return d;
  const DenseMatrix minus_a = cplx{-1.0} * a;
  const auto traces = spectool::detail::power_traces(minus_a, p - 1);
  cplx correction{};
  for (int j = 1; j < p; ++j) correction += traces[static_cast<std::size_t>(j - 1)] / static_cast<double>(j);
  d.log_modulus += correction.real();
  d.phase *= std::polar(1.0, correction.imag());
  return d;
}

inline cplx det_regularized(const DenseMatrix& a, int p) { return det_regularized_log(a, p).value(); }

struct DetSample {
  cplx lambda;
  cplx z;
  int p = 1;
  cplx value{1.0};
  double log_modulus = 0.0;
  double bound_margin = 0.0;  // log|u_p| - ||J - J_0||_p^p dist^{-p} / p
};

inline constexpr double min_segment_distance = 1e-8;

namespace detail {

inline void check_lambda(cplx lambda) {
  if (!(disk::dist_to_segment(lambda) > min_segment_distance))
    throw std::domain_error("perturbation determinant: lambda too close to [-2, 2]");
}

/// (J - J_0)(J0_N - lambda)^{-1} restricted to its nonzero leading block.
/// Only the first support+1 rows are nonzero, so det_p and the traces of
/// powers reduce exactly to this block.
inline DenseMatrix reduced_operator(const JacobiOperator& j, cplx lambda, std::size_t n) {
  const std::size_t m = j.support() + 1;
  const auto lu = jacobi::shifted_section(JacobiOperator::free_operator(), n, lambda);
  DenseMatrix resolvent(m);
  std::vector<cplx> col(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::fill(col.begin(), col.end(), cplx{});
    col[k] = 1.0;
    lu.solve(col);
    for (std::size_t i = 0; i < m; ++i) resolvent(i, k) = col[i];
  }
  return j.perturbation_block() * resolvent;
}

}  // namespace detail

/// u_p^{(N)}(lambda) on the N-section.
inline DetSample perturbation_determinant(const JacobiOperator& j, cplx lambda, int p, std::size_t n) {
  if (p < 1) throw std::invalid_argument("perturbation_determinant: p must be >= 1");
  detail::check_lambda(lambda);
  if (n < std::max<std::size_t>(2, j.support() + 2))
    throw std::invalid_argument("perturbation_determinant: N must be at least support + 2");
  DetSample s;
  s.lambda = lambda;
  s.z = disk::inverse_joukowski(lambda);
  s.p = p;
  const LogDet d = j.support() == 0 ? LogDet{} : det_regularized_log(detail::reduced_operator(j, lambda, n), p);
  s.value = d.value();
  s.log_modulus = d.log_modulus;
  const double norm_p = jacobi::perturbation_schatten_norm(j, p);
  s.bound_margin = s.log_modulus - std::pow(norm_p, p) * std::pow(disk::dist_to_segment(lambda), -p) / p;
  return s;
}

/// f_p(z) = u_p^{(N)}(z + 1/z); f_p(0) = 1 by the normalization at infinity.
inline DetSample disk_determinant(const JacobiOperator& j, cplx z, int p, std::size_t n) {
  if (!(std::abs(z) < 1.0)) throw std::domain_error("disk_determinant: z must lie in the open disk");
  if (z == cplx{}) {
    DetSample s;
    s.lambda = cplx{std::numeric_limits<double>::infinity(), 0.0};
    s.p = p;
    return s;
  }
  DetSample s = perturbation_determinant(j, disk::joukowski(z), p, n);
  s.z = z;
  return s;
}

/// Signed growth-bound margins at lambda. The first is
///   log|u_p| - ||J - J_0||_p^p dist(lambda, [-2,2])^{-p} / p,
/// the second (p = 1 only) compares log|f_1(z)| with
///   log(2 ||J - J_0||_1 / |1 - z^2|) + 2 ||J - J_0||_1 / |1 - z^2|.
inline std::pair<double, std::optional<double>> growth_bound_margins(const JacobiOperator& j, cplx lambda, int p,
                                                                     std::size_t n) {
  const DetSample s = perturbation_determinant(j, lambda, p, n);
  std::optional<double> f1;
  if (p == 1) {
    const double norm1 = jacobi::perturbation_schatten_norm(j, 1.0);
    const double k = 2.0 * norm1 / std::abs(1.0 - s.z * s.z);
    f1 = s.log_modulus - std::log(k) - k;
  }
  return {s.bound_margin, f1};
}

struct StabilizedSample {
  DetSample sample;
  double relative_change = 0.0;
  bool stabilized = false;
};

/// u_p at N and N + delta_N; stabilized when the values agree to `rel_tol`.
inline StabilizedSample stabilized_determinant(const JacobiOperator& j, cplx lambda, int p, std::size_t n,
                                               std::size_t delta_n, double rel_tol = 1e-6) {
  StabilizedSample out;
  out.sample = perturbation_determinant(j, lambda, p, n);
  const DetSample wide = perturbation_determinant(j, lambda, p, n + delta_n);
  const double scale = std::max(std::abs(out.sample.value), std::abs(wide.value));
  out.relative_change = scale == 0.0 ? 0.0 : std::abs(out.sample.value - wide.value) / scale;
  out.stabilized = out.relative_change < rel_tol;
  return out;
}

}  // namespace spectool::det

#pragma once

// Eigenvalue-sum inequalities for complex Jacobi operators: the explicit
// real-part bounds with constants c_p and 3^{p-1}, the dist/|lambda^2-4|
// sums tracked against ||J - J_0||_p^p, and the disk/plane equivalence scan.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "disk_analysis.hpp"
#include "jacobi_model.hpp"
#include "parallel.hpp"

namespace spectool::lt {

using spectool::cplx;
using jacobi::JacobiOperator;

using Spectrum = std::vector<std::pair<cplx, int>>;

/// p = 1: sum dist(l, [-2,2]) / |l^2 - 4|^{(1-eps)/2}
/// p >= 2: sum dist(l, [-2,2])^{p+1+eps} / |l^2 - 4|
inline double lt_sum(std::span<const std::pair<cplx, int>> spectrum, int p, double eps) {
  if (p < 1) throw std::invalid_argument("lt_sum: p must be a positive integer");
  if (!(eps > 0.0)) throw std::invalid_argument("lt_sum: eps must be positive");
  double s = 0.0;
  for (const auto& [lambda, mult] : spectrum) {
    const double d = disk::dist_to_segment(lambda);
    if (!(d > 0.0)) throw std::domain_error("lt_sum: eigenvalue on [-2, 2]");
    const double w = std::abs(lambda * lambda - 4.0);
    if (w == 0.0) throw std::domain_error("lt_sum: eigenvalue at an endpoint of [-2, 2]");
    const double term = p == 1 ? d / std::pow(w, 0.5 * (1.0 - eps)) : std::pow(d, p + 1.0 + eps) / w;
    s += mult * term;
  }
  return s;
}

namespace detail {

inline double log_factorial(int n) {
  double s = 0.0;
  for (int k = 2; k <= n; ++k) s += std::log(static_cast<double>(k));
  return s;
}

}  // namespace detail

/// Gamma(p + 3/2) = sqrt(pi) (2p+2)! / (4^{p+1} (p+1)!).
inline double gamma_half_integer(int p) {
  if (p < 0) throw std::invalid_argument("gamma_half_integer: p must be >= 0");
  const double lg = 0.5 * std::log(std::numbers::pi) + detail::log_factorial(2 * p + 2) -
                    (p + 1) * std::log(4.0) - detail::log_factorial(p + 1);
  return std::exp(lg);
}

/// c_p = 3^{p-1/2}/2 * Gamma(p+1)/Gamma(p+3/2) * Gamma(2)/Gamma(3/2).
inline double theorem3_constant(int p) {
  if (p < 1) throw std::invalid_argument("theorem3_constant: p must be >= 1");
  const double lg = (p - 0.5) * std::log(3.0) - std::log(2.0) + detail::log_factorial(p) -
                    std::log(gamma_half_integer(p)) - std::log(0.5 * std::sqrt(std::numbers::pi));
  return std::exp(lg);
}

struct Theorem3Sides {
  double lhs = 0.0;
  double rhs_a = 0.0;  // c_p sum (|Re b|^{p+1/2} + 4 |(a + conj c)/2 - 1|^{p+1/2})
  double rhs_b = 0.0;  // 3^{p-1} sum (|Re b|^p + 4 |(a + conj c)/2 - 1|^p)
};

/// Only the stored entries contribute to the right-hand sides; the free tail
/// terms vanish identically.
inline Theorem3Sides theorem3_sides(const JacobiOperator& j, std::span<const std::pair<cplx, int>> spectrum, int p) {
  if (p < 1) throw std::invalid_argument("theorem3_sides: p must be >= 1");
  Theorem3Sides s;
  for (const auto& [lambda, mult] : spectrum) {
    const double x = lambda.real();
    s.lhs += mult * (std::pow(std::max(x - 2.0, 0.0), p) + std::pow(std::max(-(x + 2.0), 0.0), p));
  }
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t k = 0; k < j.support(); ++k) {
    const double rb = std::abs(j.b()[k].real());
    const double off = std::abs(0.5 * (j.a()[k] + std::conj(j.c()[k])) - 1.0);
    sum_a += std::pow(rb, p + 0.5) + 4.0 * std::pow(off, p + 0.5);
    sum_b += std::pow(rb, p) + 4.0 * std::pow(off, p);
  }
  s.rhs_a = theorem3_constant(p) * sum_a;
  s.rhs_b = std::pow(3.0, p - 1) * sum_b;
  return s;
}

// ---------------------------------------------------------------------------

struct RatioBracket {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void add(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
  double spread() const { return max / min; }
};

struct Lemma3Scan {
  RatioBracket distance;  // dist(l, [-2,2]) / ((1-|z|) |1-z^2|)
  RatioBracket endpoint;  // |1 +- z|^2 / |l +- 2|, both signs
  RatioBracket radial;    // (1-|z|) / (dist(l, [-2,2]) / |l^2-4|^{1/2})
};

/// Polar grid over delta <= |z| < 1: radii delta + (1-delta) i / grid_size and
/// angles 2 pi k / grid_size.
inline Lemma3Scan lemma3_ratio_scan(double delta, int grid_size) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("lemma3_ratio_scan: delta must lie in (0, 1)");
  if (grid_size < 1) throw std::invalid_argument("lemma3_ratio_scan: grid_size must be positive");
  Lemma3Scan out;
  for (int i = 0; i < grid_size; ++i) {
    const double r = delta + (1.0 - delta) * i / grid_size;
    for (int k = 0; k < grid_size; ++k) {
      const cplx z = std::polar(r, 2.0 * std::numbers::pi * k / grid_size);
      const cplx lambda = disk::joukowski(z);
      const double dist = disk::dist_to_segment(lambda);
      out.distance.add(dist / ((1.0 - r) * std::abs(1.0 - z * z)));
      out.endpoint.add(std::norm(1.0 - z) / std::abs(lambda - 2.0));
      out.endpoint.add(std::norm(1.0 + z) / std::abs(lambda + 2.0));
      out.radial.add((1.0 - r) / (dist / std::sqrt(std::abs(lambda * lambda - 4.0))));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ensemble sweeps.

enum class InequalityId { t3a, t3b, e8, e81 };

inline const char* to_string(InequalityId id) {
  switch (id) {
    case InequalityId::t3a: return "t3a";
    case InequalityId::t3b: return "t3b";
    case InequalityId::e8: return "e8";
    case InequalityId::e81: return "e81";
  }
  return "unknown";
}

struct LTReport {
  InequalityId id = InequalityId::e8;
  double lhs = 0.0;
  double rhs = 0.0;  // right-hand side (t3) or ||J - J_0||_1 resp. ||J - J_0||_p^p (t4)
  double ratio = 0.0;
  int p = 1;
  double eps = 0.0;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  double scale = 1.0;
};

inline double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  return lhs / rhs;
}

struct ScaleRow {
  double scale = 1.0;
  std::size_t count = 0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

struct SweepSummary {
  std::size_t count = 0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t violations = 0;
  double max_t3_ratio = 0.0;
  std::vector<ScaleRow> per_scale;
};

struct DrawFailure {
  std::uint64_t index = 0;
  double scale = 1.0;
  std::string message;
};

struct SweepResult {
  SweepSummary summary;
  std::vector<LTReport> reports;
  std::vector<DrawFailure> failures;
};

struct SweepOptions {
  std::size_t count = 100;
  int p = 1;
  double eps = 0.1;
  std::vector<double> scales{1.0};
  jacobi::CertifyOptions certify{};
  std::size_t workers = 1;
};

inline constexpr double t3_slack = 1e-12;

/// Reports for one operator: the t4 ratio row followed by the t3a/t3b rows.
inline std::vector<LTReport> evaluate_operator(const JacobiOperator& j, const Spectrum& spectrum, int p, double eps) {
  std::vector<LTReport> out;
  const double sum = lt_sum(spectrum, p, eps);
  const double norm = std::pow(jacobi::perturbation_schatten_norm(j, p), p);
  LTReport t4;
  t4.id = p == 1 ? InequalityId::e8 : InequalityId::e81;
  t4.lhs = sum;
  t4.rhs = norm;
  t4.ratio = safe_ratio(sum, norm);
  t4.p = p;
  t4.eps = eps;
  out.push_back(t4);
  const auto sides = theorem3_sides(j, spectrum, p);
  for (const auto& [id, rhs] : {std::pair{InequalityId::t3a, sides.rhs_a}, std::pair{InequalityId::t3b, sides.rhs_b}}) {
    LTReport r;
    r.id = id;
    r.lhs = sides.lhs;
    r.rhs = rhs;
    r.ratio = safe_ratio(sides.lhs, rhs);
    r.p = p;
    r.eps = eps;
    out.push_back(r);
  }
  return out;
}

inline bool violates(const LTReport& r) {
  return (r.id == InequalityId::t3a || r.id == InequalityId::t3b) && r.lhs > r.rhs + t3_slack;
}

/// Summary statistics in report order; independent of how reports were produced.
inline SweepSummary summarize(std::span<const LTReport> reports, std::span<const double> scales) {
  SweepSummary s;
  bool first = true;
  for (double sc : scales) s.per_scale.push_back({sc, 0, 0.0, 0.0});
  for (const auto& r : reports) {
    if (r.id == InequalityId::t3a || r.id == InequalityId::t3b) {
      if (violates(r)) ++s.violations;
      s.max_t3_ratio = std::max(s.max_t3_ratio, r.ratio);
      continue;
    }
    ++s.count;
    s.max_ratio = first ? r.ratio : std::max(s.max_ratio, r.ratio);
    s.min_ratio = first ? r.ratio : std::min(s.min_ratio, r.ratio);
    first = false;
    for (auto& row : s.per_scale) {
      if (row.scale != r.scale) continue;
      row.max_ratio = row.count == 0 ? r.ratio : std::max(row.max_ratio, r.ratio);
      row.min_ratio = row.count == 0 ? r.ratio : std::min(row.min_ratio, r.ratio);
      ++row.count;
    }
  }
  return s;
}

/// For every draw and scale: certify the spectrum of J_0 + s (J - J_0), then
/// evaluate the t4 ratio and both t3 inequalities. Draw failures are recorded
/// and skipped.
inline SweepResult ratio_sweep(const jacobi::EnsembleParams& params, const SweepOptions& opt) {
  params.validate();
  if (opt.count < 1) throw std::invalid_argument("ratio_sweep: count must be >= 1");
  if (opt.scales.empty()) throw std::invalid_argument("ratio_sweep: no scales");
  for (double s : opt.scales)
    if (!(s > 0.0)) throw std::invalid_argument("ratio_sweep: scales must be positive");

  struct Task {
    std::vector<LTReport> reports;
    std::vector<DrawFailure> failures;
  };
  const std::size_t n_scales = opt.scales.size();
  auto tasks = parallel_map(opt.count * n_scales, opt.workers, [&](std::size_t t) {
    Task task;
    const std::uint64_t index = t / n_scales;
    const double scale = opt.scales[t % n_scales];
    try {
      const auto j = jacobi::ensemble_sample(params, index).scaled(scale);
      const auto spec = jacobi::certified_point_spectrum(j, opt.certify);
      task.reports = evaluate_operator(j, spec.with_multiplicity(), opt.p, opt.eps);
      for (auto& r : task.reports) {
        r.index = index;
        r.seed = params.seed;
        r.scale = scale;
      }
    } catch (const std::exception& e) {
      task.failures.push_back({index, scale, e.what()});
    }
    return task;
  });

  SweepResult out;
  for (auto& t : tasks) {
    out.reports.insert(out.reports.end(), t.reports.begin(), t.reports.end());
    out.failures.insert(out.failures.end(), t.failures.begin(), t.failures.end());
  }
  out.summary = summarize(out.reports, opt.scales);
  return out;
}

}  // namespace spectool::lt

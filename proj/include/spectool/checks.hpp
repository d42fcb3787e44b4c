#pragma once

// Sampled verification suites for the disk inequalities. Each suite draws
// from a counter-seeded stream and reports how many samples satisfied the
// inequality plus the worst observed value of the checked quantity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "disk_analysis.hpp"
#include "jacobi_model.hpp"

namespace spectool::checks {

using spectool::cplx;
using std::numbers::pi;

struct CheckResult {
  std::string id;
  std::size_t samples = 0;
  std::size_t passed = 0;
  double worst = -std::numeric_limits<double>::infinity();

  bool ok() const noexcept { return samples > 0 && passed == samples; }

  void record(bool pass, double value) {
    ++samples;
    if (pass) ++passed;
    worst = std::max(worst, value);
  }
};

// Stream ids keep the suites statistically independent under one seed.
enum class Stream : std::uint64_t { lemma1 = 101, e226, e203, e205, roundtrip, jensen };

namespace detail {

struct Rng {
  std::mt19937_64 g;
  Rng(std::uint64_t seed, Stream s) : g(jacobi::draw_engine(seed, static_cast<std::uint64_t>(s))) {}
  double uniform() { return jacobi::detail::unit_uniform(g); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  cplx unimodular() { return std::polar(1.0, 2.0 * pi * uniform()); }
  /// Uniform in the disk of the given radius.
  cplx in_disk(double radius = 1.0) { return std::polar(radius * std::sqrt(uniform()), 2.0 * pi * uniform()); }
};

}  // namespace detail

inline const std::vector<double>& gamma_grid() {
  static const std::vector<double> g = [] {
    std::vector<double> v;
    for (int k = 0; k <= 30; ++k) v.push_back(std::pow(10.0, -4.0 + 3.0 * k / 30.0));
    return v;
  }();
  return g;
}

/// log(1/|b_lambda(z)|) <= log(1/|lambda|) / (4 N gamma) for |1 - z| = gamma,
/// |1 - lambda| >= 200 N gamma. A fifth of the samples sit on the separation
/// circle |1 - lambda| = 200 N gamma.
inline CheckResult lemma1_suite(std::uint64_t seed, std::size_t samples, double gamma_min = 1e-3,
                                double gamma_max = 1e-2) {
  detail::Rng rng(seed, Stream::lemma1);
  CheckResult r{"lemma1"};
  while (r.samples < samples) {
    const int n = 1 + static_cast<int>(rng.uniform() * 3.0) % 3;
    // The hypothesis region is empty once 200 N gamma >= 2.
    const double hi = std::min(gamma_max, 0.9 / (100.0 * n));
    if (hi < gamma_min) continue;
    const double gamma = gamma_min * std::pow(hi / gamma_min, rng.uniform());
    const double sep = 200.0 * n * gamma;
    cplx lambda;
    if (rng.uniform() < 0.2) {
      lambda = 1.0 - sep * rng.unimodular();
    } else {
      lambda = rng.in_disk();
    }
    if (lambda == cplx{} || !(std::abs(lambda) < 1.0) || std::abs(1.0 - lambda) < sep) continue;
    const double phi = rng.uniform(-0.5 * pi, 0.5 * pi);
    const cplx z = 1.0 - std::polar(gamma, phi);
    if (!(std::abs(z) < 1.0)) continue;
    const double m = disk::lemma1_margin(lambda, z, gamma, n);
    r.record(m <= 0.0, m);
  }
  return r;
}

/// (1-|z|)/(1-tau|z|) <= |z-zeta|/|tau z-zeta| <= (1+|z|)/(1+tau|z|) < 2.
/// The worst value is the largest relative ordering defect.
inline CheckResult e226_suite(std::uint64_t seed, std::size_t samples) {
  detail::Rng rng(seed, Stream::e226);
  CheckResult r{"e226"};
  constexpr double rel = 1e-13;  // rounding allowance
  for (std::size_t i = 0; i < samples; ++i) {
    const cplx z = rng.in_disk();
    const cplx zeta = rng.unimodular();
    const double tau = rng.uniform();
    const auto [lo, mid, hi] = disk::elementary_ratio_bounds(z, zeta, tau);
    const double defect = std::max({(lo - mid) / mid, (mid - hi) / hi, hi - 2.0});
    r.record(lo <= mid * (1.0 + rel) && mid <= hi * (1.0 + rel) && hi < 2.0, defect);
  }
  return r;
}

/// gamma/pi <= omega_gamma(0) = t(gamma)/pi <= gamma/2 on the gamma grid.
inline CheckResult e202_suite() {
  CheckResult r{"e202"};
  for (double gamma : gamma_grid()) {
    const double w = disk::harmonic_measure_arc(0.0, gamma);
    const double t = disk::arc_half_angle(gamma);
    const bool pass = gamma / pi <= w && w <= gamma / 2.0 && std::abs(w - t / pi) <= 1e-15;
    r.record(pass, std::max(gamma / pi - w, w - gamma / 2.0));
  }
  return r;
}

/// omega_gamma(z) >= 1/2 - t(gamma)/pi >= 1/4 whenever |1 - z| <= gamma.
inline CheckResult e203_suite(std::uint64_t seed, std::size_t samples_per_gamma) {
  detail::Rng rng(seed, Stream::e203);
  CheckResult r{"e203"};
  for (double gamma : gamma_grid()) {
    const double floor = 0.5 - disk::arc_half_angle(gamma) / pi;
    for (std::size_t i = 0; i < samples_per_gamma;) {
      const cplx z = 1.0 - std::polar(gamma * std::sqrt(rng.uniform()), rng.uniform(-0.5 * pi, 0.5 * pi));
      if (!(std::abs(z) < 1.0)) continue;
      ++i;
      const double w = disk::harmonic_measure_arc(z, gamma);
      r.record(w >= floor && floor >= 0.25, floor - w);
    }
  }
  return r;
}

/// 1 <= |g_gamma(z)| <= e on random disk points, half of them near the circle.
inline CheckResult e205_suite(std::uint64_t seed, std::size_t samples) {
  detail::Rng rng(seed, Stream::e205);
  CheckResult r{"e205"};
  constexpr double slack = 1e-12;
  for (std::size_t i = 0; i < samples; ++i) {
    const double gamma = rng.uniform(1e-4, 1.999);
    const double radius = (i % 2 == 0) ? std::sqrt(rng.uniform()) : 1.0 - std::pow(10.0, rng.uniform(-9.0, -1.0));
    const cplx z = std::polar(radius, rng.uniform(-pi, pi));
    const double g = disk::outer_modulus(z, gamma);
    r.record(g >= 1.0 - slack && g <= std::numbers::e + slack, std::max(1.0 - g, g - std::numbers::e));
  }
  return r;
}

/// inverse_joukowski(joukowski(z)) = z for 0 < |z| < 1 - 1e-6.
inline CheckResult joukowski_roundtrip_suite(std::uint64_t seed, std::size_t samples) {
  detail::Rng rng(seed, Stream::roundtrip);
  CheckResult r{"joukowski-roundtrip"};
  while (r.samples < samples) {
    const cplx z = rng.in_disk(1.0 - 1e-6);
    if (std::abs(z) < 1e-6) continue;
    const cplx lambda = disk::joukowski(z);
    if (disk::dist_to_segment(lambda) <= 1e-9) continue;
    const double err = std::abs(disk::inverse_joukowski(lambda) - z);
    r.record(err <= 1e-10, err);
  }
  return r;
}

struct BlaschkeProduct {
  std::vector<cplx> zeros;
  cplx operator()(cplx z) const {
    cplx v{1.0};
    for (const auto& a : zeros) v *= disk::blaschke_factor(z, a);
    return v;
  }
  /// Jensen: mean of log|B| over |z| = r.
  double jensen_value(double r) const {
    double s = 0.0;
    for (const auto& a : zeros) s += std::abs(a) < r ? std::log(r) : std::log(std::abs(a));
    return s;
  }
};

/// Random products with 1..max_zeros zeros in 0 < |a| <= 0.97, kept at least
/// 0.02 away from the quadrature circle.
inline std::vector<BlaschkeProduct> random_blaschke_products(std::uint64_t seed, std::size_t count,
                                                             std::size_t max_zeros, double radius) {
  detail::Rng rng(seed, Stream::jensen);
  std::vector<BlaschkeProduct> out;
  while (out.size() < count) {
    BlaschkeProduct b;
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_zeros)) % max_zeros;
    while (b.zeros.size() < k) {
      const cplx a = rng.in_disk(0.97);
      if (std::abs(a) < 1e-3 || std::abs(std::abs(a) - radius) < 0.02) continue;
      b.zeros.push_back(a);
    }
    out.push_back(std::move(b));
  }
  return out;
}

/// Circle quadrature against Jensen's closed form. `errors` receives the
/// absolute error per product.
inline CheckResult jensen_suite(std::uint64_t seed, std::size_t count, std::size_t max_zeros, int n_grid,
                                double radius, double tol, std::vector<double>* errors = nullptr) {
  CheckResult r{"jensen"};
  for (const auto& b : random_blaschke_products(seed, count, max_zeros, radius)) {
    const double err = std::abs(disk::circle_log_integral(b, radius, n_grid) - b.jensen_value(radius));
    if (errors) errors->push_back(err);
    r.record(err <= tol, err);
  }
  return r;
}

/// Classical Blaschke condition: sum (1 - |a|) <= sup_r mean log|B(r.)| - log|B(0)|.
inline CheckResult classical_blaschke_suite(std::uint64_t seed, std::size_t count, std::size_t max_zeros,
                                            double radius) {
  CheckResult r{"e100"};
  for (const auto& b : random_blaschke_products(seed, count, max_zeros, radius)) {
    double lhs = 0.0;
    for (const auto& a : b.zeros) lhs += 1.0 - std::abs(a);
    const auto bound = disk::classical_blaschke_bound(b, disk::default_sup_radii());
    r.record(lhs <= bound.sup && !bound.diverging, lhs - bound.sup);
  }
  return r;
}

}  // namespace spectool::checks

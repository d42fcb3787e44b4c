#pragma once

// Function theory on the unit disk: the Joukowski map, harmonic measure of
// arcs, outer-function moduli, Blaschke factors, weighted zero sums and
// circle quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "complex_eig.hpp"

namespace spectool::disk {

using spectool::cplx;
using std::numbers::pi;

/// Points on the unit circle; pairwise distinct.
class BoundarySet {
public:
  BoundarySet() = default;

  explicit BoundarySet(std::vector<cplx> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("BoundarySet: empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (std::abs(std::abs(points_[i]) - 1.0) > 1e-12)
        throw std::invalid_argument("BoundarySet: point off the unit circle");
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(points_[i] - points_[j]) <= 1e-9)
          throw std::invalid_argument("BoundarySet: coincident points");
    }
  }

  std::span<const cplx> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }

  double distance(cplx z) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : points_) d = std::min(d, std::abs(z - p));
    return d;
  }

private:
  std::vector<cplx> points_;
};

enum class EnvelopeKind {
  product,   // (1-|z|)^-p * prod |z - zeta_j|^-q_j
  distance,  // (1-|z|)^-p * dist(z, E)^-q with q = q_1
};

/// Growth envelope h and coefficient D in |f(z)| <= exp(D h(z)).
struct GrowthProfile {
  BoundarySet boundary;
  double radial_exponent = 0.0;
  std::vector<double> point_exponents;
  double coefficient = 1.0;
  EnvelopeKind kind = EnvelopeKind::product;

  void validate() const {
    if (point_exponents.size() != boundary.size())
      throw std::invalid_argument("GrowthProfile: one exponent per boundary point required");
    if (!(radial_exponent >= 0.0) || !std::isfinite(radial_exponent))
      throw std::invalid_argument("GrowthProfile: radial exponent must be finite and >= 0");
    for (double q : point_exponents)
      if (!(q >= 0.0) || !std::isfinite(q))
        throw std::invalid_argument("GrowthProfile: point exponents must be finite and >= 0");
    if (kind == EnvelopeKind::distance &&
        std::any_of(point_exponents.begin(), point_exponents.end(),
                    [&](double q) { return q != point_exponents.front(); }))
      throw std::invalid_argument("GrowthProfile: distance envelope needs a common exponent");
  }

  double envelope(cplx z) const {
    double h = std::pow(1.0 - std::abs(z), -radial_exponent);
    if (kind == EnvelopeKind::distance) {
      h *= std::pow(boundary.distance(z), -point_exponents.front());
    } else {
      const auto pts = boundary.points();
      for (std::size_t j = 0; j < pts.size(); ++j) h *= std::pow(std::abs(z - pts[j]), -point_exponents[j]);
    }
    return h;
  }
};

struct ZeroSet {
  struct Entry {
    cplx z;
    int multiplicity = 1;
  };
  std::vector<Entry> zeros;

  void validate() const {
    for (const auto& e : zeros) {
      if (!(std::abs(e.z) < 1.0)) throw std::invalid_argument("ZeroSet: zero outside the open disk");
      if (e.multiplicity < 1) throw std::invalid_argument("ZeroSet: multiplicity must be positive");
    }
  }
};

/// Weight (1-|z|)^radial_power * prod |z - zeta_j|^point_powers[j].
struct WeightSpec {
  double radial_power = 1.0;
  std::vector<double> point_powers;
};

// ---------------------------------------------------------------------------
// Joukowski map between the disk and the complement of [-2, 2].

inline cplx joukowski(cplx z) {
  if (z == cplx{}) throw std::domain_error("joukowski: z = 0 maps to infinity");
  return z + 1.0 / z;
}

inline double dist_to_segment(cplx lambda) {
  const double x = lambda.real(), y = lambda.imag();
  if (std::abs(x) <= 2.0) return std::abs(y);
  return std::min(std::abs(lambda - 2.0), std::abs(lambda + 2.0));
}

/// Branch of z + 1/z = lambda inside the unit disk.
inline cplx inverse_joukowski(cplx lambda) {
  if (dist_to_segment(lambda) <= 1e-12)
    throw std::domain_error("inverse_joukowski: lambda on or too close to [-2, 2]");
  const cplx root = std::sqrt(lambda * lambda - 4.0);
  // The two roots multiply to 1; take the larger-modulus one first for
  // accuracy and invert it.
  const cplx big = std::abs(lambda + root) >= std::abs(lambda - root) ? 0.5 * (lambda + root)
                                                                       : 0.5 * (lambda - root);
  return 1.0 / big;
}

// ---------------------------------------------------------------------------
// Harmonic measure of arcs and the outer function g_gamma.

/// Half-angle t of the arc {|1 - zeta| <= gamma}: sin(t/2) = gamma/2.
inline double arc_half_angle(double gamma) { return 2.0 * std::asin(0.5 * gamma); }

/// Harmonic measure at z of the counterclockwise arc from e^{i t1} to e^{i t2}.
/// omega = (alpha(z) - (t2 - t1)/2) / pi, where alpha is the angle under
/// which the arc is seen from z. Not clamped: the value lies in [0, 1] up to
/// rounding because alpha ranges over [(t2-t1)/2, pi + (t2-t1)/2] in the disk.
inline double harmonic_measure(cplx z, double t1, double t2) {
  if (!(std::abs(z) < 1.0)) throw std::domain_error("harmonic_measure: z must lie in the open disk");
  if (!(t2 > t1) || t2 - t1 >= 2.0 * pi) throw std::invalid_argument("harmonic_measure: bad arc");
  const cplx a = std::polar(1.0, t1) - z;
  const cplx b = std::polar(1.0, t2) - z;
  double alpha = std::arg(b / a);
  if (alpha < 0.0) alpha += 2.0 * pi;
  return (alpha - 0.5 * (t2 - t1)) / pi;
}

inline void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw std::invalid_argument("gamma must lie in (0, 2)");
}

/// Harmonic measure of the symmetric arc {zeta : |1 - zeta| <= gamma}.
inline double harmonic_measure_arc(cplx z, double gamma) {
  check_gamma(gamma);
  const double t = arc_half_angle(gamma);
  return harmonic_measure(z, -t, t);
}

/// |g_gamma(z)| = exp(omega_gamma(z)).
inline double outer_modulus(cplx z, double gamma) { return std::exp(harmonic_measure_arc(z, gamma)); }

// ---------------------------------------------------------------------------

inline cplx blaschke_factor(cplx z, cplx lambda) {
  if (!(std::abs(lambda) < 1.0)) throw std::domain_error("blaschke_factor: |lambda| must be < 1");
  if (std::abs(z) > 1.0 + 1e-15) throw std::domain_error("blaschke_factor: |z| must be <= 1");
  const cplx den = 1.0 - std::conj(lambda) * z;
  if (den == cplx{}) throw std::domain_error("blaschke_factor: pole");
  return (z - lambda) / den;
}

/// Signed margin log(1/|b_lambda(z)|) - log(1/|lambda|) / (4 N gamma) for the
/// well-separated configuration |1 - z| = gamma, |1 - lambda| >= 200 N gamma.
/// Non-positive whenever the hypotheses hold.
inline double lemma1_margin(cplx lambda, cplx z, double gamma, int n_points) {
  if (n_points < 1) throw std::invalid_argument("lemma1_margin: N must be positive");
  check_gamma(gamma);
  if (lambda == cplx{} || !(std::abs(lambda) < 1.0))
    throw std::domain_error("lemma1_margin: need 0 < |lambda| < 1");
  if (!(std::abs(z) < 1.0) || std::abs(std::abs(1.0 - z) - gamma) > 1e-12)
    throw std::domain_error("lemma1_margin: need |z| < 1 and |1 - z| = gamma");
  const double separation = 200.0 * n_points * gamma;
  if (std::abs(1.0 - lambda) < separation * (1.0 - 1e-12))
    throw std::domain_error("lemma1_margin: need |1 - lambda| >= 200 N gamma");
  const double lhs = -std::log(std::abs(blaschke_factor(z, lambda)));
  const double rhs = -std::log(std::abs(lambda)) / (4.0 * n_points * gamma);
  return lhs - rhs;
}

/// (q - 1 + eps)_+
inline double exponent_from_q(double q, double eps) { return std::max(q - 1.0 + eps, 0.0); }

/// Sum over zeros of multiplicity * (1-|z|)^a * prod_j |z - zeta_j|^{r_j}.
inline double weighted_zero_sum(const ZeroSet& zeros, const BoundarySet& boundary, const WeightSpec& weight) {
  if (weight.point_powers.size() != boundary.size())
    throw std::invalid_argument("weighted_zero_sum: one point power per boundary point required");
  const auto pts = boundary.points();
  double total = 0.0;
  for (const auto& e : zeros.zeros) {
    double term = e.multiplicity * std::pow(1.0 - std::abs(e.z), weight.radial_power);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      // pow(0, 0) == 1 keeps the r_j = 0 convention.
      term *= std::pow(std::abs(e.z - pts[j]), weight.point_powers[j]);
    }
    total += term;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Circle quadrature.

using Sampler = std::function<cplx(cplx)>;

/// A quadrature node landed on (or numerically at) a zero of the integrand.
class ZeroOnContour : public std::runtime_error {
public:
  explicit ZeroOnContour(double r) : std::runtime_error("circle_log_integral: zero on the circle"), radius(r) {}
  double radius;
};

inline constexpr int default_circle_grid = 2048;

/// Trapezoidal approximation of the mean of log|f| over the circle |z| = r.
template <typename F>
double circle_log_integral(F&& f, double r, int n_grid = default_circle_grid) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("circle_log_integral: r must lie in (0, 1)");
  if (n_grid < 1) throw std::invalid_argument("circle_log_integral: n_grid must be positive");
  double s = 0.0;
  for (int k = 0; k < n_grid; ++k) {
    const cplx z = std::polar(r, 2.0 * pi * k / n_grid);
    const double m = std::abs(f(z));
    if (m < 1e-300) throw ZeroOnContour(r);
    s += std::log(m);
  }
  return s / n_grid;
}

struct BlaschkeBound {
  std::vector<std::pair<double, double>> by_radius;  // (r, integral - log|f(0)|)
  double sup = 0.0;
  bool diverging = false;
};

inline const std::vector<double>& default_sup_radii() {
  static const std::vector<double> radii{0.9, 0.99, 0.999, 0.9999};
  return radii;
}

/// Right-hand side of the classical Blaschke condition: sup over radii of the
/// circle mean of log|f| minus log|f(0)|. `diverging` flags sequences whose
/// increments do not shrink geometrically.
template <typename F>
BlaschkeBound classical_blaschke_bound(F&& f, std::span<const double> radii, int n_grid = default_circle_grid) {
  if (radii.empty()) throw std::invalid_argument("classical_blaschke_bound: no radii");
  const double log_f0 = std::log(std::abs(f(cplx{})));
  BlaschkeBound out;
  out.sup = -std::numeric_limits<double>::infinity();
  for (double r : radii) {
    // Nodes scale with 1/(1-r) so the integrand stays resolved near the circle.
    const int n = std::max(n_grid, static_cast<int>(std::min(16.0 / (1.0 - r), 1e6)));
    const double v = circle_log_integral(f, r, n) - log_f0;
    out.by_radius.emplace_back(r, v);
    out.sup = std::max(out.sup, v);
  }
  const auto& br = out.by_radius;
  if (br.size() >= 3) {
    const double d1 = br[br.size() - 2].second - br[br.size() - 3].second;
    const double d2 = br.back().second - br[br.size() - 2].second;
    out.diverging = d2 > 1e-9 && d2 > 0.5 * d1;
  }
  return out;
}

/// Smallest D with log|f(z)| <= D h(z) on the grid, clipped below at 0.
template <typename F>
double growth_coefficient_estimate(F&& f, const GrowthProfile& profile, std::span<const cplx> grid) {
  if (grid.empty()) throw std::invalid_argument("growth_coefficient_estimate: empty grid");
  profile.validate();
  double d = 0.0;
  for (const auto& z : grid) {
    const double h = profile.envelope(z);
    const double lf = std::log(std::abs(f(z)));
    d = std::max(d, lf / h);
  }
  return d;
}

/// ((1-|z|)/(1-tau|z|), |z-zeta|/|tau z-zeta|, (1+|z|)/(1+tau|z|)); ordered
/// ascending with the last entry below 2.
inline std::tuple<double, double, double> elementary_ratio_bounds(cplx z, cplx zeta, double tau) {
  if (!(std::abs(z) < 1.0)) throw std::domain_error("elementary_ratio_bounds: z must lie in the disk");
  if (!(tau >= 0.0 && tau < 1.0)) throw std::domain_error("elementary_ratio_bounds: tau must lie in [0, 1)");
  const double r = std::abs(z);
  return {(1.0 - r) / (1.0 - tau * r), std::abs(z - zeta) / std::abs(tau * z - zeta), (1.0 + r) / (1.0 + tau * r)};
}

}  // namespace spectool::disk

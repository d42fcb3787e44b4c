#pragma once

// Complex Jacobi operators J = J(a, b, c) that coincide with the free matrix
// J_0 = J(1, 0, 1) beyond a finite support, their finite sections, and
// certified extraction of eigenvalues off [-2, 2].

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "complex_eig.hpp"
#include "disk_analysis.hpp"

namespace spectool::jacobi {

using spectool::cplx;

/// a: subdiagonal (row k+1, col k), b: diagonal, c: superdiagonal (row k,
/// col k+1). Entries past `support()` are the free values 1, 0, 1.
class JacobiOperator {
public:
  JacobiOperator() = default;

  JacobiOperator(std::vector<cplx> a, std::vector<cplx> b, std::vector<cplx> c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    const std::size_t k = std::max({a_.size(), b_.size(), c_.size()});
    a_.resize(k, 1.0);
    b_.resize(k, 0.0);
    c_.resize(k, 1.0);
    for (const auto* seq : {&a_, &b_, &c_})
      for (const auto& v : *seq)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw std::invalid_argument("JacobiOperator: non-finite entry");
  }

  static JacobiOperator free_operator(std::size_t support = 0) {
    return {std::vector<cplx>(support, 1.0), std::vector<cplx>(support, 0.0), std::vector<cplx>(support, 1.0)};
  }

  /// Single diagonal perturbation b_1 = b.
  static JacobiOperator rank_one(cplx b) { return {{1.0}, {b}, {1.0}}; }

  std::size_t support() const noexcept { return b_.size(); }
  std::span<const cplx> a() const noexcept { return a_; }
  std::span<const cplx> b() const noexcept { return b_; }
  std::span<const cplx> c() const noexcept { return c_; }

  cplx sub(std::size_t k) const noexcept { return k < a_.size() ? a_[k] : cplx{1.0}; }
  cplx diag(std::size_t k) const noexcept { return k < b_.size() ? b_[k] : cplx{}; }
  cplx super(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : cplx{1.0}; }

  /// J_0 + s (J - J_0).
  JacobiOperator scaled(double s) const {
    auto a = a_, b = b_, c = c_;
    for (auto& v : a) v = 1.0 + s * (v - 1.0);
    for (auto& v : b) v = s * v;
    for (auto& v : c) v = 1.0 + s * (v - 1.0);
    return {std::move(a), std::move(b), std::move(c)};
  }

  /// J - J_0 restricted to its (support + 1)-sized leading block.
  DenseMatrix perturbation_block() const {
    const std::size_t k = support();
    DenseMatrix d(k + 1);
    for (std::size_t i = 0; i < k; ++i) {
      d(i, i) = b_[i];
      d(i + 1, i) = a_[i] - 1.0;
      d(i, i + 1) = c_[i] - 1.0;
    }
    return d;
  }

  bool operator==(const JacobiOperator&) const = default;

private:
  std::vector<cplx> a_, b_, c_;
};

/// Upper-left N x N section.
inline DenseMatrix truncate(const JacobiOperator& j, std::size_t n) {
  if (n < std::max<std::size_t>(2, j.support() + 1))
    throw std::invalid_argument("truncate: N must be at least max(2, support + 1)");
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = j.diag(i);
    if (i + 1 < n) {
      m(i + 1, i) = j.sub(i);
      m(i, i + 1) = j.super(i);
    }
  }
  return m;
}

inline double perturbation_schatten_norm(const JacobiOperator& j, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("perturbation_schatten_norm: p must be >= 1");
  if (j.support() == 0) return 0.0;
  return schatten_norm(j.perturbation_block(), p);
}

// ---------------------------------------------------------------------------
// Tridiagonal LU with partial pivoting (the gttrf/gttrs scheme).

class TridiagonalLU {
public:
  /// Factor the matrix with subdiagonal dl, diagonal d, superdiagonal du.
  TridiagonalLU(std::vector<cplx> dl, std::vector<cplx> d, std::vector<cplx> du)
      : dl_(std::move(dl)), d_(std::move(d)), du_(std::move(du)), du2_(d_.size(), cplx{}),
        swapped_(d_.size(), false) {
    const std::size_t n = d_.size();
    if (n == 0 || dl_.size() + 1 != n || du_.size() + 1 != n)
      throw std::invalid_argument("TridiagonalLU: inconsistent band sizes");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] != cplx{}) {
          const cplx f = dl_[i] / d_[i];
          dl_[i] = f;
          d_[i + 1] -= f * du_[i];
        }
      } else {
        const cplx f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const cplx tmp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = tmp - f * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du_[i + 1];
        }
        swapped_[i] = true;
      }
    }
    double scale = 0.0;
    for (const auto& v : d_) scale = std::max(scale, std::abs(v));
    tiny_ = std::max(scale, 1.0) * std::numeric_limits<double>::epsilon();
  }

  std::size_t size() const noexcept { return d_.size(); }

  /// Solves in place; exactly-zero pivots are replaced by a tiny value so the
  /// solver doubles as an inverse-iteration kernel.
  void solve(std::span<cplx> x) const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!swapped_[i]) {
        x[i + 1] -= dl_[i] * x[i];
      } else {
        const cplx t = x[i];
        x[i] = x[i + 1];
        x[i + 1] = t - dl_[i] * x[i];
      }
    }
    for (std::size_t i = n; i-- > 0;) {
      cplx s = x[i];
      if (i + 1 < n) s -= du_[i] * x[i + 1];
      if (i + 2 < n) s -= du2_[i] * x[i + 2];
      const cplx piv = d_[i] == cplx{} ? cplx{tiny_} : d_[i];
      x[i] = s / piv;
    }
  }

private:
  std::vector<cplx> dl_, d_, du_, du2_;
  std::vector<bool> swapped_;
  double tiny_ = 0.0;
};

/// Factorization of J_N - shift I for the N-section of J.
inline TridiagonalLU shifted_section(const JacobiOperator& j, std::size_t n, cplx shift) {
  std::vector<cplx> dl(n - 1), d(n), du(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = j.diag(i) - shift;
    if (i + 1 < n) {
      dl[i] = j.sub(i);
      du[i] = j.super(i);
    }
  }
  return {std::move(dl), std::move(d), std::move(du)};
}

/// Unit right eigenvector of the N-section for a computed eigenvalue.
inline std::vector<cplx> section_eigenvector(const JacobiOperator& j, std::size_t n, cplx lambda) {
  const auto lu = shifted_section(j, n, lambda);
  std::vector<cplx> v(n, cplx{1.0 / std::sqrt(static_cast<double>(n))});
  for (int it = 0; it < 3; ++it) {
    lu.solve(v);
    double nrm = 0.0;
    for (const auto& e : v) nrm += std::norm(e);
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
    for (auto& e : v) e /= nrm;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Certified point spectrum.

struct CertifyOptions {
  std::size_t n = 200;
  std::size_t delta_n = 50;
  double exclusion_margin = 0.05;
  double tol_match = 1e-6;
  double tol_tail = 1e-8;
};

enum class RejectReason { near_essential, unmatched, drift, tail };

inline const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::near_essential: return "near-essential";
    case RejectReason::unmatched: return "unmatched";
    case RejectReason::drift: return "drift";
    case RejectReason::tail: return "tail";
  }
  return "unknown";
}

struct CertifiedEigenvalue {
  cplx lambda;
  double drift = 0.0;
  double tail_mass = 0.0;
  int multiplicity = 1;
};

struct RejectedCandidate {
  cplx lambda;
  RejectReason reason;
};

struct CertifiedSpectrum {
  std::vector<CertifiedEigenvalue> accepted;
  std::vector<RejectedCandidate> rejected;
  std::size_t n = 0, n_prime = 0;

  /// Accepted eigenvalues with multiplicity, for the inequality sums.
  std::vector<std::pair<cplx, int>> with_multiplicity() const {
    std::vector<std::pair<cplx, int>> out;
    out.reserve(accepted.size());
    for (const auto& e : accepted) out.emplace_back(e.lambda, e.multiplicity);
    return out;
  }
};

class EigensolverFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<cplx> section_eigenvalues(const JacobiOperator& j, std::size_t n) {
  EigOptions opts;
  opts.balance = Balancing::off;
  auto res = eig_general(truncate(j, n), opts);
  if (!res.converged) throw EigensolverFailure("certified_point_spectrum: QR did not converge at N=" + std::to_string(n));
  return std::move(res.values);
}

inline double tail_mass(std::span<const cplx> v) {
  const std::size_t n = v.size();
  const std::size_t tail = (n + 9) / 10;
  double s = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) s += std::norm(v[i]);
  return s;
}

}  // namespace detail

/// Eigenvalues off [-2, 2] that are stable between the N and N + delta_N
/// sections and whose eigenvectors decay before the truncation edge.
inline CertifiedSpectrum certified_point_spectrum(const JacobiOperator& j, const CertifyOptions& opt = {}) {
  if (opt.n < std::max<std::size_t>(8 * j.support(), std::max<std::size_t>(2, j.support() + 2)))
    throw std::invalid_argument("certified_point_spectrum: N must be at least 8 * support");
  if (opt.delta_n < 16) throw std::invalid_argument("certified_point_spectrum: delta_N must be at least 16");
  if (!(opt.exclusion_margin > 0.0 && opt.tol_match > 0.0 && opt.tol_tail > 0.0))
    throw std::invalid_argument("certified_point_spectrum: tolerances must be positive");

  CertifiedSpectrum out;
  out.n = opt.n;
  out.n_prime = opt.n + opt.delta_n;

  std::vector<cplx> small, large;
  for (const auto& v : detail::section_eigenvalues(j, out.n)) {
    if (disk::dist_to_segment(v) > opt.exclusion_margin)
      small.push_back(v);
    else
      out.rejected.push_back({v, RejectReason::near_essential});
  }
  for (const auto& v : detail::section_eigenvalues(j, out.n_prime))
    if (disk::dist_to_segment(v) > opt.exclusion_margin) large.push_back(v);

  // Greedy matching by distance.
  struct Pair {
    double d;
    std::size_t i, k;
  };
  std::vector<Pair> pairs;
  pairs.reserve(small.size() * large.size());
  for (std::size_t i = 0; i < small.size(); ++i)
    for (std::size_t k = 0; k < large.size(); ++k) pairs.push_back({std::abs(small[i] - large[k]), i, k});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  std::vector<std::optional<double>> drift(small.size());
  std::vector<bool> used(large.size(), false);
  for (const auto& p : pairs) {
    if (drift[p.i] || used[p.k]) continue;
    drift[p.i] = p.d;
    used[p.k] = true;
  }

  std::vector<CertifiedEigenvalue> accepted;
  for (std::size_t i = 0; i < small.size(); ++i) {
    if (!drift[i]) {
      out.rejected.push_back({small[i], RejectReason::unmatched});
      continue;
    }
    if (*drift[i] > opt.tol_match) {
      out.rejected.push_back({small[i], RejectReason::drift});
      continue;
    }
    const double tail = detail::tail_mass(section_eigenvector(j, out.n, small[i]));
    if (!(tail <= opt.tol_tail)) {
      out.rejected.push_back({small[i], RejectReason::tail});
      continue;
    }
    accepted.push_back({small[i], *drift[i], tail, 1});
  }

  // Merge numerically coincident eigenvalues into one entry with multiplicity.
  std::sort(accepted.begin(), accepted.end(), [](const auto& x, const auto& y) {
    return x.lambda.real() != y.lambda.real() ? x.lambda.real() < y.lambda.real() : x.lambda.imag() < y.lambda.imag();
  });
  std::vector<bool> merged(accepted.size(), false);
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (merged[i]) continue;
    CertifiedEigenvalue e = accepted[i];
    cplx sum = e.lambda;
    for (std::size_t k = i + 1; k < accepted.size(); ++k) {
      if (merged[k] || std::abs(accepted[k].lambda - accepted[i].lambda) > opt.tol_match) continue;
      merged[k] = true;
      ++e.multiplicity;
      sum += accepted[k].lambda;
      e.drift = std::max(e.drift, accepted[k].drift);
      e.tail_mass = std::max(e.tail_mass, accepted[k].tail_mass);
    }
    e.lambda = sum / static_cast<double>(e.multiplicity);
    out.accepted.push_back(e);
  }
  return out;
}

/// Eigenvalue b + 1/b of the b_1 = b perturbation, present iff |b| > 1.
inline std::optional<cplx> rank_one_reference(cplx b) {
  if (!(std::abs(b) > 1.0)) return std::nullopt;
  return b + 1.0 / b;
}

// ---------------------------------------------------------------------------
// Random ensembles.

/// Entries a_k - 1, b_k, c_k - 1 (k = 0..K-1) have modulus uniform on
/// [0, t rho^k] and uniform phase.
struct EnsembleParams {
  std::size_t support = 8;
  double scale = 0.3;
  double ratio = 0.7;
  std::uint64_t seed = 1;
  int target_p = 1;

  void validate() const {
    if (support < 1) throw std::invalid_argument("EnsembleParams: support must be >= 1");
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw std::invalid_argument("EnsembleParams: scale must be >= 0");
    if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("EnsembleParams: ratio must lie in (0, 1]");
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double unit_uniform(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Counter-based generator for draw `index`: independent of evaluation order.
inline std::mt19937_64 draw_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(detail::splitmix64(detail::splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL)));
}

inline JacobiOperator ensemble_sample(const EnsembleParams& params, std::uint64_t index) {
  params.validate();
  auto g = draw_engine(params.seed, index);
  auto draw = [&](double bound) {
    const double m = bound * detail::unit_uniform(g);
    const double phi = 2.0 * std::numbers::pi * detail::unit_uniform(g);
    return std::polar(m, phi);
  };
  std::vector<cplx> a(params.support), b(params.support), c(params.support);
  double bound = params.scale;
  for (std::size_t k = 0; k < params.support; ++k) {
    a[k] = 1.0 + draw(bound);
    b[k] = draw(bound);
    c[k] = 1.0 + draw(bound);
    bound *= params.ratio;
  }
  return {std::move(a), std::move(b), std::move(c)};
}

// ---------------------------------------------------------------------------
// JSON: {"a": [[re, im], ...], "b": [...], "c": [...]}; tail implied free.

inline nlohmann::json complex_to_json(cplx v) { return nlohmann::json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument("complex number must be [re, im], got " + j.dump());
}

inline nlohmann::json to_json(const JacobiOperator& op) {
  auto seq = [](std::span<const cplx> s) {
    auto arr = nlohmann::json::array();
    for (const auto& v : s) arr.push_back(complex_to_json(v));
    return arr;
  };
  return {{"a", seq(op.a())}, {"b", seq(op.b())}, {"c", seq(op.c())}};
}

inline JacobiOperator operator_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("operator JSON must be an object");
  for (const auto& [key, value] : j.items())
    if (key != "a" && key != "b" && key != "c") throw std::invalid_argument("operator JSON: unknown key '" + key + "'");
  auto seq = [&](const char* key) {
    std::vector<cplx> out;
    if (!j.contains(key)) return out;
    if (!j.at(key).is_array()) throw std::invalid_argument(std::string("operator JSON: '") + key + "' must be an array");
    for (const auto& v : j.at(key)) out.push_back(complex_from_json(v));
    return out;
  };
  return {seq("a"), seq("b"), seq("c")};
}

}  // namespace spectool::jacobi

#pragma once

// Dense complex linear algebra: Hessenberg reduction, shifted complex QR,
// Hermitian eigenvalues, singular values, Schatten norms, LU determinants.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace spectool {

using cplx = std::complex<double>;

/// Square complex matrix, row-major.
class DenseMatrix {
public:
  DenseMatrix() = default;

  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, cplx{}) {
    if (n == 0) throw std::invalid_argument("DenseMatrix: dimension must be positive");
  }

  DenseMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
      : DenseMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n_) throw std::invalid_argument("DenseMatrix: ragged initializer");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix diagonal(std::span<const cplx> d) {
    DenseMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * n_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * n_ + j];
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& v) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
  }

  double frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  DenseMatrix adjoint() const {
    DenseMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  cplx trace() const noexcept {
    cplx t{};
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("DenseMatrix: dimension mismatch");
    const std::size_t n = a.n_;
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("DenseMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] += b.data_[i];
    return a;
  }

  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("DenseMatrix: dimension mismatch");
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i] -= b.data_[i];
    return a;
  }

  friend DenseMatrix operator*(cplx s, DenseMatrix a) {
    for (auto& v : a.data_) v *= s;
    return a;
  }

private:
  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

struct EigenResult {
  std::vector<cplx> values;
  std::optional<DenseMatrix> vectors;  // column k pairs with values[k]
  int iterations = 0;
  bool converged = false;
};

struct SingularValues {
  std::vector<double> sigmas;  // descending
};

enum class Balancing { automatic, on, off };

struct EigOptions {
  double tol = 1e-10;     // residual tolerance relative to ||A||_F
  int max_iter = 0;       // total QR sweeps; 0 selects 30*n
  bool want_vectors = false;
  Balancing balance = Balancing::automatic;
};

namespace detail {

inline constexpr double ulp = std::numeric_limits<double>::epsilon();
inline constexpr double safe_min = std::numeric_limits<double>::min();

inline double abs1(const cplx& z) noexcept { return std::abs(z.real()) + std::abs(z.imag()); }

/// Rotation G = [c s; -conj(s) c] with G*[f; g] = [r; 0].
struct Givens {
  double c = 1.0;
  cplx s{};

  static Givens make(const cplx& f, const cplx& g) noexcept {
    const double af = std::abs(f);
    const double ag = std::abs(g);
    if (ag == 0.0) return {1.0, cplx{}};
    if (af == 0.0) return {0.0, std::conj(g) / ag};
    const double nrm = std::hypot(af, ag);
    return {af / nrm, (f / af) * std::conj(g) / nrm};
  }

  void apply_rows(cplx& x, cplx& y) const noexcept {
    const cplx nx = c * x + s * y;
    y = -std::conj(s) * x + c * y;
    x = nx;
  }

  // Right multiplication by G^H on the column pair (p, q).
  void apply_cols(cplx& p, cplx& q) const noexcept {
    const cplx np = c * p + std::conj(s) * q;
    q = -s * p + c * q;
    p = np;
  }
};

inline bool is_tridiagonal(const DenseMatrix& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i > j + 1 || j > i + 1) && a(i, j) != cplx{}) return false;
  return true;
}

/// Diagonal similarity D^{-1} A D with power-of-two scales; returns D.
inline std::vector<double> balance(DenseMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> scale(n, 1.0);
  constexpr double radix = 2.0;
  bool done = false;
  for (int sweep = 0; !done && sweep < 100; ++sweep) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double col = 0.0, row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        col += abs1(a(j, i));
        row += abs1(a(i, j));
      }
      if (col == 0.0 || row == 0.0) continue;
      double g = row / radix, f = 1.0;
      const double s = col + row;
      while (col < g) {
        f *= radix;
        col *= radix * radix;
      }
      g = row * radix;
      while (col > g) {
        f /= radix;
        col /= radix * radix;
      }
      if ((col + row) / f < 0.95 * s) {
        done = false;
        scale[i] *= f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
  return scale;
}

/// Householder reduction to upper Hessenberg form; accumulates Q when given.
inline void hessenberg_reduce(DenseMatrix& a, DenseMatrix* q) {
  const std::size_t n = a.size();
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) xnorm += std::norm(a(i, k));
    if (xnorm == 0.0) continue;
    const cplx x0 = a(k + 1, k);
    const double norm = std::sqrt(xnorm + std::norm(x0));
    const cplx phase = std::abs(x0) == 0.0 ? cplx{1.0} : x0 / std::abs(x0);
    const cplx alpha = -phase * norm;
    v[k + 1] = x0 - alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    const double beta = 2.0 / vnorm2;

    // A <- (I - beta v v^H) A
    for (std::size_t j = k; j < n; ++j) {
      cplx dot{};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
      dot *= beta;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * dot;
    }
    // A <- A (I - beta v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      cplx dot{};
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
      dot *= beta;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * std::conj(v[j]);
    }
    if (q != nullptr) {
      for (std::size_t i = 0; i < n; ++i) {
        cplx dot{};
        for (std::size_t j = k + 1; j < n; ++j) dot += (*q)(i, j) * v[j];
        dot *= beta;
        for (std::size_t j = k + 1; j < n; ++j) (*q)(i, j) -= dot * std::conj(v[j]);
      }
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = cplx{};
  }
}

/// Eigenvalue of [[a, b], [c, d]] closest to d.
inline cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx w = 0.5 * (a - d);
  const cplx bc = b * c;
  if (bc == cplx{}) return d;
  const cplx root = std::sqrt(w * w + bc);
  const cplx den = std::abs(w + root) >= std::abs(w - root) ? w + root : w - root;
  if (den == cplx{}) return d;
  return d - bc / den;
}

/// Shifted single-shift complex QR on an upper Hessenberg matrix. When `z` is
/// non-null the full Schur form is produced and the rotations accumulate in z.
/// Returns the number of sweeps, or -1 when the budget is exhausted.
inline int hessenberg_qr(DenseMatrix& h, DenseMatrix* z, std::vector<cplx>& w, int max_sweeps) {
  const std::size_t n = h.size();
  const bool want_t = z != nullptr;
  w.assign(n, cplx{});
  int sweeps = 0;
  int hi = static_cast<int>(n) - 1;
  int stalled = 0;
  double hnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) hnorm = std::max(hnorm, abs1(h(i, j)));

  while (hi >= 0) {
    // Locate the active block [lo, hi].
    int lo = hi;
    while (lo > 0) {
      const std::size_t k = static_cast<std::size_t>(lo);
      double scale = abs1(h(k - 1, k - 1)) + abs1(h(k, k));
      if (scale == 0.0) scale = hnorm;
      if (abs1(h(k, k - 1)) <= ulp * scale || abs1(h(k, k - 1)) <= safe_min) {
        h(k, k - 1) = cplx{};
        break;
      }
      --lo;
    }
    if (lo == hi) {
      w[static_cast<std::size_t>(hi)] = h(static_cast<std::size_t>(hi), static_cast<std::size_t>(hi));
      --hi;
      stalled = 0;
      continue;
    }
    if (sweeps >= max_sweeps) return -1;
    ++sweeps;
    ++stalled;

    const auto l = static_cast<std::size_t>(lo);
    const auto i = static_cast<std::size_t>(hi);
    cplx shift;
    if (stalled % 10 == 0) {
      // Exceptional shift.
      shift = h(i, i) + 0.75 * std::abs(h(i, i - 1).real()) + 0.75 * std::abs(h(i, i - 1).imag());
    } else {
      shift = wilkinson_shift(h(i - 1, i - 1), h(i - 1, i), h(i, i - 1), h(i, i));
    }

    const std::size_t col_end = want_t ? n : i + 1;
    const std::size_t row_begin = want_t ? 0 : l;

    for (std::size_t k = l; k < i; ++k) {
      Givens g;
      if (k == l) {
        g = Givens::make(h(l, l) - shift, h(l + 1, l));
      } else {
        g = Givens::make(h(k, k - 1), h(k + 1, k - 1));
        h(k, k - 1) = g.c * h(k, k - 1) + g.s * h(k + 1, k - 1);
        h(k + 1, k - 1) = cplx{};
      }
      for (std::size_t j = k; j < col_end; ++j) g.apply_rows(h(k, j), h(k + 1, j));
      const std::size_t row_end = std::min(k + 2, i);
      for (std::size_t r = row_begin; r <= row_end; ++r) g.apply_cols(h(r, k), h(r, k + 1));
      if (z != nullptr)
        for (std::size_t r = 0; r < n; ++r) g.apply_cols((*z)(r, k), (*z)(r, k + 1));
    }
  }
  return sweeps;
}

/// Right eigenvectors of an upper triangular T (columns), unnormalized.
inline DenseMatrix triangular_eigenvectors(const DenseMatrix& t) {
  const std::size_t n = t.size();
  DenseMatrix x(n);
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) tnorm = std::max(tnorm, std::abs(t(i, j)));
  const double small = std::max(ulp * tnorm, safe_min);
  for (std::size_t k = n; k-- > 0;) {
    const cplx lam = t(k, k);
    x(k, k) = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      cplx s{};
      for (std::size_t j = i + 1; j <= k; ++j) s += t(i, j) * x(j, k);
      cplx d = t(i, i) - lam;
      if (std::abs(d) < small) d = small;
      x(i, k) = -s / d;
    }
  }
  return x;
}

inline double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e));
  return m;
}

}  // namespace detail

/// Eigenvalues (and optionally right eigenvectors) of a general complex
/// matrix by Hessenberg reduction and shifted complex QR with deflation.
inline EigenResult eig_general(const DenseMatrix& a, const EigOptions& opts = {}) {
  if (a.size() == 0) throw std::invalid_argument("eig_general: empty matrix");
  if (!a.all_finite()) throw std::invalid_argument("eig_general: non-finite entries");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("eig_general: tol must be positive");

  const std::size_t n = a.size();
  DenseMatrix h = a;
  const bool do_balance = opts.balance == Balancing::on ||
                          (opts.balance == Balancing::automatic && !detail::is_tridiagonal(a));
  std::vector<double> scale(n, 1.0);
  if (do_balance) scale = detail::balance(h);

  std::optional<DenseMatrix> q;
  if (opts.want_vectors) q = DenseMatrix::identity(n);
  detail::hessenberg_reduce(h, q ? &*q : nullptr);

  EigenResult res;
  const int budget = opts.max_iter > 0 ? opts.max_iter : 30 * static_cast<int>(n);
  const int sweeps = detail::hessenberg_qr(h, q ? &*q : nullptr, res.values, budget);
  res.converged = sweeps >= 0;
  res.iterations = sweeps >= 0 ? sweeps : budget;
  if (!res.converged || !opts.want_vectors) return res;

  DenseMatrix x = detail::triangular_eigenvectors(h);
  DenseMatrix v = *q * x;
  for (std::size_t k = 0; k < n; ++k) {
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v(i, k) *= scale[i];
      nrm += std::norm(v(i, k));
    }
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) v(i, k) /= nrm;
  }
  res.vectors = std::move(v);

  // Accept only when every pair meets the residual tolerance.
  const double anorm = std::max(a.frobenius_norm(), detail::safe_min);
  std::vector<cplx> r(n);
  for (std::size_t k = 0; k < n && res.converged; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = -res.values[k] * (*res.vectors)(i, k);
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * (*res.vectors)(j, k);
      r[i] = s;
    }
    double rn = 0.0;
    for (const auto& e : r) rn += std::norm(e);
    if (std::sqrt(rn) > opts.tol * anorm) res.converged = false;
  }
  return res;
}

inline EigenResult eig_general(const DenseMatrix& a, double tol, int max_iter) {
  EigOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return eig_general(a, opts);
}

/// Real eigenvalues of a Hermitian matrix, ascending.
inline std::vector<double> eig_hermitian(const DenseMatrix& a) {
  const std::size_t n = a.size();
  const double anorm = a.frobenius_norm();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > 1e-12 * anorm)
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");

  // Symmetrize the rounding noise away, then reuse the complex QR.
  DenseMatrix h(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));

  EigOptions opts;
  opts.balance = Balancing::off;
  EigenResult r = eig_general(h, opts);
  if (!r.converged) throw std::runtime_error("eig_hermitian: QR iteration did not converge");
  std::vector<double> out(n);
  std::transform(r.values.begin(), r.values.end(), out.begin(), [](const cplx& v) { return v.real(); });
  std::sort(out.begin(), out.end());
  return out;
}

/// Singular values as square roots of the eigenvalues of A^H A.
inline SingularValues singular_values(const DenseMatrix& a) {
  std::vector<double> ev = eig_hermitian(a.adjoint() * a);
  SingularValues sv;
  sv.sigmas.reserve(ev.size());
  for (auto it = ev.rbegin(); it != ev.rend(); ++it) sv.sigmas.push_back(std::sqrt(std::max(*it, 0.0)));
  return sv;
}

inline constexpr double infinity_p = std::numeric_limits<double>::infinity();

/// Schatten p-norm from singular values; p = infinity_p gives the operator norm.
inline double schatten_norm(const SingularValues& sv, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("schatten_norm: p must be >= 1");
  if (sv.sigmas.empty()) return 0.0;
  const double smax = sv.sigmas.front();
  if (std::isinf(p) || smax == 0.0) return smax;
  // Scaled sum to avoid overflow for large p.
  double s = 0.0;
  for (double x : sv.sigmas) s += std::pow(x / smax, p);
  return smax * std::pow(s, 1.0 / p);
}

inline double schatten_norm(const DenseMatrix& a, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("schatten_norm: p must be >= 1");
  return schatten_norm(singular_values(a), p);
}

/// Determinant as log-modulus plus unit phase, so huge and tiny values survive.
struct LogDet {
  double log_modulus = 0.0;  // -inf for a singular matrix
  cplx phase{1.0};

  cplx value() const {
    if (std::isinf(log_modulus) && log_modulus < 0) return cplx{};
    return std::exp(log_modulus) * phase;
  }
};

/// LU with partial pivoting.
inline LogDet log_determinant(DenseMatrix a) {
  const std::size_t n = a.size();
  LogDet d;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        piv = i;
      }
    if (best == 0.0) {
      d.log_modulus = -std::numeric_limits<double>::infinity();
      d.phase = 0.0;
      return d;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      d.phase = -d.phase;
    }
    const cplx pivot = a(k, k);
    d.log_modulus += std::log(best);
    d.phase *= pivot / best;
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = a(i, k) / pivot;
      if (f == cplx{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  d.phase /= std::abs(d.phase);
  return d;
}

inline cplx determinant(const DenseMatrix& a) { return log_determinant(a).value(); }

namespace detail {

inline std::vector<cplx> power_traces(const DenseMatrix& a, int kmax) {
  std::vector<cplx> t;
  DenseMatrix p = a;
  for (int k = 1; k <= kmax; ++k) {
    t.push_back(p.trace());
    if (k < kmax) p = p * a;
  }
  return t;
}

inline std::vector<cplx> cubic_roots(cplx a, cplx b, cplx c, cplx d);

inline std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
  const cplx disc = std::sqrt(b * b - 4.0 * a * c);
  const cplx q = -0.5 * (std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc);
  if (q == cplx{}) return {cplx{}, cplx{}};
  return {q / a, c / q};
}

inline std::vector<cplx> cubic_roots(cplx a, cplx b, cplx c, cplx d) {
  // Depressed cubic t^3 + p t + q with x = t - b/(3a).
  b /= a;
  c /= a;
  d /= a;
  const cplx shift = b / 3.0;
  const cplx p = c - b * b / 3.0;
  const cplx q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  cplx u3 = -q / 2.0 + disc;
  if (std::abs(-q / 2.0 - disc) > std::abs(u3)) u3 = -q / 2.0 - disc;
  const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
  std::vector<cplx> roots;
  if (u3 == cplx{}) return {-shift, -shift, -shift};
  const cplx u = std::pow(u3, 1.0 / 3.0);
  cplx uk = u;
  for (int k = 0; k < 3; ++k) {
    roots.push_back(uk - p / (3.0 * uk) - shift);
    uk *= omega;
  }
  return roots;
}

inline std::vector<cplx> quartic_roots(cplx a, cplx b, cplx c, cplx d, cplx e) {
  b /= a;
  c /= a;
  d /= a;
  e /= a;
  // Depressed quartic y^4 + p y^2 + q y + r with x = y - b/4.
  const cplx shift = b / 4.0;
  const cplx p = c - 3.0 * b * b / 8.0;
  const cplx q = d - b * c / 2.0 + b * b * b / 8.0;
  const cplx r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b * b * b * b / 256.0;
  std::vector<cplx> ys;
  // Resolvent cubic 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0.
  auto ms = cubic_roots(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q);
  cplx m = ms[0];
  for (const auto& cand : ms)
    if (std::abs(cand) > std::abs(m)) m = cand;
  if (std::abs(m) < 1e-300) {
    // Biquadratic.
    for (const auto& y2 : quadratic_roots(1.0, p, r)) {
      const cplx s = std::sqrt(y2);
      ys.push_back(s);
      ys.push_back(-s);
    }
  } else {
    const cplx s = std::sqrt(2.0 * m);
    const cplx t = q / (2.0 * s);
    for (const auto& y : quadratic_roots(1.0, -s, p / 2.0 + m + t)) ys.push_back(y);
    for (const auto& y : quadratic_roots(1.0, s, p / 2.0 + m - t)) ys.push_back(y);
  }
  for (auto& y : ys) y -= shift;
  return ys;
}

inline void newton_polish(std::span<const cplx> coeffs, std::vector<cplx>& roots) {
  for (auto& x : roots) {
    for (int it = 0; it < 3; ++it) {
      cplx f = coeffs[0], df{};
      for (std::size_t k = 1; k < coeffs.size(); ++k) {
        df = df * x + f;
        f = f * x + coeffs[k];
      }
      if (df == cplx{}) break;
      const cplx step = f / df;
      if (!(std::isfinite(step.real()) && std::isfinite(step.imag()))) break;
      if (std::abs(step) > 1e-6 * (1.0 + std::abs(x))) break;  // only polish, never jump
      x -= step;
    }
  }
}

}  // namespace detail

/// Closed-form characteristic-polynomial roots for n <= 4. Test oracle only.
inline std::vector<cplx> char_poly_roots_oracle(const DenseMatrix& a) {
  const std::size_t n = a.size();
  if (n > 4) throw std::invalid_argument("char_poly_roots_oracle: n must be <= 4");
  // Elementary symmetric functions from power traces (Newton's identities).
  const auto pt = detail::power_traces(a, static_cast<int>(n));
  std::vector<cplx> e(n + 1);
  e[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    cplx s{};
    for (std::size_t i = 1; i <= k; ++i) {
      const double sign = (i % 2 == 1) ? 1.0 : -1.0;
      s += sign * e[k - i] * pt[i - 1];
    }
    e[k] = s / static_cast<double>(k);
  }
  // lambda^n - e1 lambda^{n-1} + e2 lambda^{n-2} - ...
  std::vector<cplx> coeffs(n + 1);
  for (std::size_t k = 0; k <= n; ++k) coeffs[k] = (k % 2 == 0 ? 1.0 : -1.0) * e[k];

  std::vector<cplx> roots;
  switch (n) {
    case 1: roots = {-coeffs[1]}; break;
    case 2: roots = detail::quadratic_roots(coeffs[0], coeffs[1], coeffs[2]); break;
    case 3: roots = detail::cubic_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3]); break;
    default:
      roots = detail::quartic_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]);
      break;
  }
  detail::newton_polish(coeffs, roots);
  return roots;
}

}  // namespace spectool

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion;
// exits nonzero if any selected criterion fails.
//
//   acceptance            run all criteria
//   acceptance 3 9        run the listed criteria only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <spectool/checks.hpp>
#include <spectool/cli.hpp>
#include <spectool/complex_eig.hpp>
#include <spectool/jacobi_model.hpp>
#include <spectool/lt_verify.hpp>
#include <spectool/pert_determinant.hpp>

using namespace spectool;
using jacobi::JacobiOperator;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// Base ensemble: support 8, amplitude 0.3, geometric decay 0.7.
jacobi::EnsembleParams base_ensemble(int p = 1) {
  jacobi::EnsembleParams ep;
  ep.support = 8;
  ep.scale = 0.3;
  ep.ratio = 0.7;
  ep.seed = 7;
  ep.target_p = p;
  return ep;
}

Verdict free_section_oracle() {
  const std::size_t n = 64;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = eig_general(jacobi::truncate(JacobiOperator::free_operator(), n));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!r.converged) return {false, "QR did not converge"};
  std::vector<double> got;
  for (const auto& v : r.values) got.push_back(v.real());
  std::sort(got.begin(), got.end());
  double err = 0.0;
  for (const auto& v : r.values) err = std::max(err, std::abs(v.imag()));
  for (std::size_t k = 1; k <= n; ++k) {
    const double ref = 2.0 * std::cos(static_cast<double>(n + 1 - k) * std::numbers::pi / (n + 1.0));
    err = std::max(err, std::abs(got[k - 1] - ref));
  }
  return {err < 1e-9 && secs < 1.0, "max error " + fmt(err) + ", runtime " + fmt(secs) + " s"};
}

Verdict rank_one_references() {
  jacobi::CertifyOptions o;  // N = 200, delta N = 50
  const auto s2 = jacobi::certified_point_spectrum(JacobiOperator::rank_one(2.0), o);
  const auto si = jacobi::certified_point_spectrum(JacobiOperator::rank_one(cplx(0, 2)), o);
  const auto sh = jacobi::certified_point_spectrum(JacobiOperator::rank_one(0.5), o);
  const double e2 = s2.accepted.size() == 1 ? std::abs(s2.accepted[0].lambda - 2.5) : INFINITY;
  const double ei = si.accepted.size() == 1 ? std::abs(si.accepted[0].lambda - cplx(0, 1.5)) : INFINITY;
  const bool pass = e2 <= 1e-6 && ei <= 1e-6 && sh.accepted.empty();
  return {pass, "|err(2.5)| " + fmt(e2) + ", |err(1.5i)| " + fmt(ei) + ", accepted for b=0.5: " +
                    std::to_string(sh.accepted.size())};
}

Verdict explicit_constant_inequalities() {
  const double c1 = lt::theorem3_constant(1);
  const double c1_err = std::abs(c1 - 4.0 * std::sqrt(3.0) / (3.0 * std::numbers::pi));
  std::size_t violations = 0, failures = 0, reports = 0, with_eigenvalues = 0;
  double worst = 0.0;
  for (int p : {1, 2}) {
    lt::SweepOptions so;
    so.count = 100;
    so.p = p;
    so.scales = {1.0};
    const auto res = lt::ratio_sweep(base_ensemble(p), so);
    failures += res.failures.size();
    violations += res.summary.violations;
    worst = std::max(worst, res.summary.max_t3_ratio);
    for (const auto& r : res.reports) {
      if (r.id == lt::InequalityId::t3a || r.id == lt::InequalityId::t3b) ++reports;
      if (r.id == lt::InequalityId::t3a && r.lhs > 0.0) ++with_eigenvalues;
    }
  }
  const bool pass = violations == 0 && failures == 0 && reports == 400 && c1_err <= 1e-12;
  return {pass, std::to_string(reports) + " checks, " + std::to_string(violations) + " violations, " +
                    std::to_string(failures) + " failed draws, " + std::to_string(with_eigenvalues) +
                    " with nonzero lhs, max lhs/rhs " + fmt(worst) + ", |c_1 - 4 sqrt3/(3 pi)| " + fmt(c1_err)};
}

// 20 points with dist(lambda, [-2, 2]) > 0.5.
std::vector<cplx> growth_grid() {
  std::vector<cplx> g;
  for (double r : {2.6, 3.0, 4.0, 7.0, 15.0})
    for (int k = 0; k < 4; ++k) g.push_back(std::polar(r, std::numbers::pi * (0.1 + 0.5 * k)));
  return g;
}

Verdict growth_bounds() {
  const auto grid = growth_grid();
  for (const auto& l : grid)
    if (!(disk::dist_to_segment(l) > 0.5)) return {false, "grid point too close to [-2, 2]"};
  const std::size_t n = 200, dn = 50;
  double worst = -INFINITY, worst_f1 = -INFINITY;
  std::size_t samples = 0, unstable = 0;
  const auto ep = base_ensemble();
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto j = jacobi::ensemble_sample(ep, i);
    for (int p : {1, 2, 3}) {
      for (const auto& lambda : grid) {
        const auto st = det::stabilized_determinant(j, lambda, p, n, dn);
        if (!st.stabilized) ++unstable;
        const auto [m, f1] = det::growth_bound_margins(j, lambda, p, n);
        worst = std::max(worst, m);
        if (f1) worst_f1 = std::max(worst_f1, *f1);
        ++samples;
      }
    }
  }
  const bool pass = worst <= 1e-12 && worst_f1 <= 1e-12 && unstable == 0 && samples == 3000;
  return {pass, std::to_string(samples) + " samples, max margin " + fmt(worst) + ", max f1 margin " + fmt(worst_f1) +
                    ", unstabilized " + std::to_string(unstable)};
}

Verdict lemma1() {
  const auto r = checks::lemma1_suite(7, 10000, 1e-3, 1e-2);
  return {r.ok() && r.samples == 10000,
          std::to_string(r.passed) + "/" + std::to_string(r.samples) + ", max margin " + fmt(r.worst)};
}

Verdict function_theory() {
  const auto a = checks::e226_suite(7, 100000);
  const auto b = checks::e202_suite();
  const auto c = checks::e203_suite(7, 300);
  const auto d = checks::e205_suite(7, 10000);
  std::string detail;
  bool pass = true;
  for (const auto* r : {&a, &b, &c, &d}) {
    pass = pass && r->ok();
    if (!detail.empty()) detail += ", ";
    detail += r->id + " " + std::to_string(r->passed) + "/" + std::to_string(r->samples);
  }
  return {pass && a.samples == 100000 && d.samples == 10000, detail};
}

Verdict jensen() {
  std::vector<double> errors;
  const auto r = checks::jensen_suite(7, 20, 6, 4096, 0.95, 1e-6, &errors);
  return {r.ok() && r.samples == 20, std::to_string(r.passed) + "/20 products, max error " + fmt(r.worst)};
}

Verdict equivalence_brackets() {
  const auto s3 = lt::lemma3_ratio_scan(0.3, 200);
  const auto s5 = lt::lemma3_ratio_scan(0.5, 200);
  const auto s7 = lt::lemma3_ratio_scan(0.7, 200);
  bool in = true, monotone = true;
  std::string detail;
  const std::pair<const char*, lt::RatioBracket lt::Lemma3Scan::*> rel[] = {
      {"distance", &lt::Lemma3Scan::distance}, {"endpoint", &lt::Lemma3Scan::endpoint}, {"radial", &lt::Lemma3Scan::radial}};
  for (const auto& [name, m] : rel) {
    const auto& b = s3.*m;
    in = in && b.min >= 0.1 && b.max <= 10.0;
    monotone = monotone && (s5.*m).spread() <= b.spread() && (s7.*m).spread() <= (s5.*m).spread();
    detail += std::string(detail.empty() ? "" : ", ") + name + " [" + fmt(b.min) + ", " + fmt(b.max) + "] spread " +
              fmt(b.spread()) + "/" + fmt((s5.*m).spread()) + "/" + fmt((s7.*m).spread());
  }
  return {in && monotone, detail};
}

Verdict ratio_tracking() {
  double max_ratio = 0.0;
  bool finite = true;
  std::size_t rows = 0, failures = 0;
  std::string per;
  for (int p : {1, 2}) {
    lt::SweepOptions so;
    so.count = 100;
    so.p = p;
    so.eps = 0.1;
    so.scales = {0.5, 1.0, 2.0};
    const auto res = lt::ratio_sweep(base_ensemble(p), so);
    failures += res.failures.size();
    rows += res.summary.count;
    finite = finite && std::isfinite(res.summary.max_ratio);
    max_ratio = std::max(max_ratio, res.summary.max_ratio);
    per += std::string(per.empty() ? "" : ", ") + (p == 1 ? "e8" : "e81") + " max " + fmt(res.summary.max_ratio);
  }
  // Rank-one reference through the certified-spectrum pipeline.
  const auto r1 = JacobiOperator::rank_one(2.0);
  const auto spec = jacobi::certified_point_spectrum(r1);
  const auto reps = lt::evaluate_operator(r1, spec.with_multiplicity(), 1, 0.1);
  // dist = 0.5, |lambda^2 - 4| = 2.25, ||J - J_0||_1 = 2. The often-quoted
  // 0.17358 is a rounding slip; the exact value is 0.1735633.
  const double target = 0.5 / std::pow(2.25, 0.45) / 2.0;
  const double ref_err = std::abs(reps[0].ratio - target);
  const bool pass = finite && max_ratio <= 100.0 && rows == 600 && failures == 0 && ref_err <= 1e-5;
  return {pass, std::to_string(rows) + " ratios, " + per + ", failed draws " + std::to_string(failures) +
                    ", rank-one ratio " + std::to_string(reps[0].ratio) + " vs " + std::to_string(target)};
}

Verdict zero_consistency() {
  // A stronger ensemble so that most draws carry eigenvalues off [-2, 2].
  auto ep = base_ensemble();
  ep.scale = 1.5;
  const std::size_t n = 200;
  double worst = 0.0;
  std::size_t eigenvalues = 0, draws_with = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto j = jacobi::ensemble_sample(ep, i);
    const auto spec = jacobi::certified_point_spectrum(j);
    if (spec.accepted.empty()) continue;
    ++draws_with;
    const double reach = 2.0 + jacobi::perturbation_schatten_norm(j, infinity_p) + 1.0;
    for (int p : {1, 2}) {
      // Reference grid: 16 x 16 polar points between |lambda| = 2.2 and the spectral disk edge.
      double grid_max = 0.0;
      for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
          const cplx lambda = std::polar(2.2 + (reach - 2.2) * a / 15.0, 2.0 * std::numbers::pi * (b + 0.5) / 16.0);
          if (disk::dist_to_segment(lambda) <= 0.05) continue;
          grid_max = std::max(grid_max, std::abs(det::perturbation_determinant(j, lambda, p, n).value));
        }
      for (const auto& e : spec.accepted) {
        const double u = std::abs(det::perturbation_determinant(j, e.lambda, p, n).value);
        worst = std::max(worst, u / grid_max);
        if (p == 1) ++eigenvalues;
      }
    }
  }
  const bool pass = worst <= 1e-5 && eigenvalues > 0;
  return {pass, std::to_string(eigenvalues) + " certified eigenvalues in " + std::to_string(draws_with) +
                    "/20 draws, max |u_p(lambda)| / grid max " + fmt(worst)};
}

Verdict sweep_determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("spectool-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream sink;
  int codes = 0;
  for (const char* w : {"1", "8"}) {
    const std::vector<std::string> args{"lt-sweep", "--set", "count=100", "--workers", w, "--out",
                                        (root / (std::string("w") + w)).string()};
    codes |= cli::main_entry(args, sink, sink);
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(root / "w1")) {
    auto read = [](const fs::path& p) {
      std::ifstream is(p, std::ios::binary);
      std::ostringstream ss;
      ss << is.rdbuf();
      return ss.str();
    };
    ++compared;
    if (read(e.path()) != read(root / "w8" / e.path().filename())) ++differing;
  }
  fs::remove_all(root);
  return {codes == 0 && compared >= 4 && differing == 0,
          std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ, exit codes " +
              (codes == 0 ? "0" : "nonzero")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Verdict()>>> criteria{
      {1, {"free-section eigenvalues", free_section_oracle}},
      {2, {"rank-one reference eigenvalues", rank_one_references}},
      {3, {"explicit-constant eigenvalue inequalities", explicit_constant_inequalities}},
      {4, {"determinant growth bounds", growth_bounds}},
      {5, {"Blaschke-factor lemma", lemma1}},
      {6, {"disk function-theory bounds", function_theory}},
      {7, {"Jensen quadrature", jensen}},
      {8, {"disk/plane equivalence brackets", equivalence_brackets}},
      {9, {"eigenvalue-sum ratio tracking", ratio_tracking}},
      {10, {"determinant zeros at certified eigenvalues", zero_consistency}},
      {11, {"sweep determinism across worker counts", sweep_determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, _] : criteria) selected.push_back(k);

  int failed = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::printf("FAIL criterion %d: no such criterion\n", k);
      ++failed;
      continue;
    }
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%s) [%.1f s]\n", v.pass ? "PASS" : "FAIL", k, it->second.first, v.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

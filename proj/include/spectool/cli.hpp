#pragma once

// Command-line front end for spectool: configuration merging (defaults <-
// JSON file <- --set overrides), command dispatch and artifact assembly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "checks.hpp"
#include "complex_eig.hpp"
#include "disk_analysis.hpp"
#include "jacobi_model.hpp"
#include "lt_verify.hpp"
#include "pert_determinant.hpp"
#include "report.hpp"

namespace spectool::cli {

using report::ordered_json;
using report::format_double;

inline constexpr int exit_ok = 0;
inline constexpr int exit_assertion = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_io = 3;

/// Invalid configuration; `key` names the offending entry.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

private:
  std::string key_;
};

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  ordered_json params = ordered_json::object();  // every known key, merged
  std::filesystem::path out_dir = "spectool-out";
  std::size_t workers = 1;
  std::uint64_t seed = 7;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"eig",        "spectrum",    "det",         "lt-sweep",
                                              "disk-check", "lemma-check", "jensen-check"};
  return names;
}

namespace detail {

inline ordered_json rank_one_operator_json() {
  return ordered_json{{"a", ordered_json::array()}, {"b", ordered_json::array({ordered_json::array({2.0, 0.0})})},
                      {"c", ordered_json::array()}};
}

inline ordered_json certify_defaults() {
  return ordered_json{{"n", 200}, {"delta_n", 50}, {"eta", 0.05}, {"tol_match", 1e-6}, {"tol_tail", 1e-8}};
}

}  // namespace detail

/// Default parameters per command; the key set is also the whitelist.
inline ordered_json default_params(const std::string& command) {
  ordered_json p;
  if (command == "eig") {
    p = {{"operator", detail::rank_one_operator_json()}, {"n", 64}, {"matrix", nullptr}, {"tol", 1e-10},
         {"max_iter", 0}};
  } else if (command == "spectrum") {
    p = {{"operator", detail::rank_one_operator_json()}};
    p.update(detail::certify_defaults());
  } else if (command == "det") {
    p = {{"operator", detail::rank_one_operator_json()},
         {"p", 1},
         {"n", 200},
         {"delta_n", 50},
         {"rays", 8},
         {"ray_points", 24},
         {"check_f1", true}};
  } else if (command == "lt-sweep") {
    p = {{"count", 100},   {"p", 1},          {"eps", 0.1},   {"scales", ordered_json::array({1.0})},
         {"support", 8},   {"scale", 0.3},    {"ratio", 0.7}, {"max_ratio", 100.0}};
    p.update(detail::certify_defaults());
  } else if (command == "disk-check") {
    p = {{"samples", 10000},
         {"grid", 200},
         {"deltas", ordered_json::array({0.3, 0.5, 0.7})},
         {"bracket_lo", 0.1},
         {"bracket_hi", 10.0}};
  } else if (command == "lemma-check") {
    p = {{"lemma1_samples", 10000},
         {"e226_samples", 100000},
         {"e203_samples", 300},
         {"gamma_min", 1e-3},
         {"gamma_max", 1e-2}};
  } else if (command == "jensen-check") {
    p = {{"products", 20}, {"max_zeros", 6}, {"n_grid", 4096}, {"radius", 0.95}, {"tol", 1e-6}};
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  p["seed"] = 7;
  p["workers"] = 1;
  p["out"] = "spectool-out";
  return p;
}

inline std::string usage() {
  return "usage: spectool <command> [--config file.json] [--set key=value ...] [--out dir] [--workers n]\n"
         "\n"
         "commands:\n"
         "  eig           eigenvalues of a dense matrix or of a Jacobi section\n"
         "  spectrum      certified eigenvalues of a Jacobi operator off [-2, 2]\n"
         "  det           perturbation determinants along rays and growth-bound margins\n"
         "  lt-sweep      eigenvalue-sum inequalities over a random ensemble\n"
         "  disk-check    Joukowski round trip, outer-function bounds, disk/plane equivalences\n"
         "  lemma-check   Blaschke-factor lemma, elementary ratio bounds, arc harmonic measure\n"
         "  jensen-check  circle quadrature against Jensen's formula\n"
         "\n"
         "Outputs go to --out (default spectool-out): report.json, *.csv, *.dat.\n"
         "Exit status: 0 all assertions passed, 1 assertion failed, 2 usage/config error, 3 I/O error.\n";
}

inline std::string list_commands() { return usage(); }

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Closest known command, if any is reasonably close.
inline std::optional<std::string> suggest_command(const std::string& name) {
  std::optional<std::string> best;
  std::size_t best_d = 4;
  for (const auto& c : command_names()) {
    const std::size_t d = edit_distance(name, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

namespace detail {

inline bool same_kind(const ordered_json& def, const ordered_json& v) {
  if (def.is_null()) return true;
  if (def.is_number_integer()) return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
  if (def.is_number()) return v.is_number();
  return def.type() == v.type();
}

inline void merge_key(ordered_json& params, const std::string& key, const ordered_json& value) {
  if (!params.contains(key)) throw ConfigError(key, "unknown configuration key '" + key + "'");
  const ordered_json& def = params[key];
  // An operator may be given inline or as a path to a JSON file.
  const bool operator_path = key == "operator" && value.is_string();
  if (!operator_path && !same_kind(def, value)) throw ConfigError(key, "configuration key '" + key + "' has the wrong type");
  if (def.is_number_integer() && value.is_number_float())
    params[key] = static_cast<std::int64_t>(value.get<double>());
  else
    params[key] = value;
}

inline ordered_json parse_set_value(const std::string& text) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::parse_error&) {
    return ordered_json(text);
  }
}

inline ordered_json read_json_file(const std::filesystem::path& path, const std::string& key) {
  std::ifstream is(path);
  if (!is) throw ConfigError(key, "cannot read " + path.string());
  try {
    return ordered_json::parse(is);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(key, path.string() + ": " + e.what());
  }
}

}  // namespace detail

/// Parses the arguments after the program name. Throws UsageError for
/// malformed command lines and ConfigError for bad keys or values.
inline RunConfig parse_args(std::span<const std::string> args) {
  if (args.empty()) throw UsageError("missing command");
  RunConfig cfg;
  cfg.command = args[0];
  if (std::find(command_names().begin(), command_names().end(), cfg.command) == command_names().end()) {
    std::string msg = "unknown command '" + cfg.command + "'";
    if (auto s = suggest_command(cfg.command)) msg += "; did you mean '" + *s + "'?";
    throw UsageError(msg);
  }
  ordered_json params = default_params(cfg.command);

  CLI::App app{"spectool " + cfg.command};
  app.set_help_flag();
  std::string config_file, out_flag;
  std::vector<std::string> sets;
  long workers_flag = 0;
  auto* config_opt = app.add_option("--config", config_file);
  auto* out_opt = app.add_option("--out", out_flag);
  auto* workers_opt = app.add_option("--workers", workers_flag);
  app.add_option("--set", sets)->allow_extra_args(false);
  // CLI11 wants argv order reversed.
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (*config_opt) {
    const ordered_json file = detail::read_json_file(config_file, "--config");
    if (!file.is_object()) throw ConfigError("--config", "configuration file must hold a JSON object");
    for (const auto& [k, v] : file.items()) detail::merge_key(params, k, v);
  }
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
    detail::merge_key(params, kv.substr(0, eq), detail::parse_set_value(kv.substr(eq + 1)));
  }
  if (*out_opt) params["out"] = out_flag;
  if (*workers_opt) params["workers"] = workers_flag;

  if (params["workers"].get<std::int64_t>() < 1) throw ConfigError("workers", "workers must be >= 1");
  if (params["seed"].get<std::int64_t>() < 0) throw ConfigError("seed", "seed must be >= 0");
  cfg.workers = static_cast<std::size_t>(params["workers"].get<std::int64_t>());
  cfg.seed = static_cast<std::uint64_t>(params["seed"].get<std::int64_t>());
  cfg.out_dir = params["out"].get<std::string>();
  if (cfg.out_dir.empty()) throw ConfigError("out", "output directory must not be empty");
  cfg.params = std::move(params);
  return cfg;
}

// ---------------------------------------------------------------------------
// Commands.

namespace detail {

inline double positive(const ordered_json& p, const std::string& key) {
  const double v = p.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "'" + key + "' must be positive");
  return v;
}

inline std::int64_t at_least(const ordered_json& p, const std::string& key, std::int64_t lo) {
  const auto v = p.at(key).get<std::int64_t>();
  if (v < lo) throw ConfigError(key, "'" + key + "' must be >= " + std::to_string(lo));
  return v;
}

inline jacobi::JacobiOperator load_operator(const ordered_json& p) {
  ordered_json j = p.at("operator");
  if (j.is_string()) j = read_json_file(j.get<std::string>(), "operator");
  try {
    return jacobi::operator_from_json(nlohmann::json::parse(j.dump()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("operator", e.what());
  }
}

inline jacobi::CertifyOptions certify_options(const ordered_json& p) {
  jacobi::CertifyOptions o;
  o.n = static_cast<std::size_t>(at_least(p, "n", 2));
  o.delta_n = static_cast<std::size_t>(at_least(p, "delta_n", 16));
  o.exclusion_margin = positive(p, "eta");
  o.tol_match = positive(p, "tol_match");
  o.tol_tail = positive(p, "tol_tail");
  return o;
}

inline ordered_json public_config(const RunConfig& cfg) {
  // Worker count and output location do not influence results.
  ordered_json c = cfg.params;
  c.erase("workers");
  c.erase("out");
  return c;
}

inline ordered_json check_json(const checks::CheckResult& r) {
  return {{"samples", r.samples}, {"passed", r.passed}, {"worst", r.worst}};
}

inline report::Assertion check_assertion(const checks::CheckResult& r) {
  return {r.id, r.ok(), std::to_string(r.passed) + "/" + std::to_string(r.samples) + " passed, worst " + format_double(r.worst)};
}

inline void sort_complex(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
}

inline report::Artifacts run_eig(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  DenseMatrix a;
  if (!p.at("matrix").is_null()) {
    const auto& rows = p.at("matrix");
    if (!rows.is_array() || rows.empty()) throw ConfigError("matrix", "matrix must be a non-empty array of rows");
    a = DenseMatrix(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i].is_array() || rows[i].size() != rows.size()) throw ConfigError("matrix", "matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        try {
          a(i, j) = jacobi::complex_from_json(nlohmann::json::parse(rows[i][j].dump()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("matrix", e.what());
        }
      }
    }
  } else {
    const auto op = load_operator(p);
    const auto n = static_cast<std::size_t>(at_least(p, "n", 2));
    try {
      a = jacobi::truncate(op, n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("n", e.what());
    }
  }
  EigOptions opts;
  opts.tol = positive(p, "tol");
  opts.max_iter = static_cast<int>(at_least(p, "max_iter", 0));
  auto res = eig_general(a, opts);
  sort_complex(res.values);

  auto values = ordered_json::array();
  report::CsvTable table("eigenvalues", {"re", "im"});
  report::PlotData scatter("eigenvalue_scatter");
  scatter.comment("columns: re im");
  for (const auto& v : res.values) {
    values.push_back(report::complex_pair(v));
    table.add_row({format_double(v.real()), format_double(v.imag())});
    scatter.point(v.real(), v.imag());
  }
  art.results = {{"n", a.size()}, {"converged", res.converged}, {"iterations", res.iterations}, {"eigenvalues", values}};
  art.assertions.push_back({"eig-converged", res.converged, "QR sweeps: " + std::to_string(res.iterations)});
  art.tables.push_back(std::move(table));
  art.plots.push_back(std::move(scatter));
  return art;
}

inline report::Artifacts run_spectrum(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  const auto op = load_operator(p);
  const auto opts = certify_options(p);
  if (opts.n < std::max<std::size_t>(8 * op.support(), op.support() + 2))
    throw ConfigError("n", "'n' must be at least 8 * support");
  jacobi::CertifiedSpectrum spec;
  try {
    spec = jacobi::certified_point_spectrum(op, opts);
  } catch (const jacobi::EigensolverFailure& e) {
    art.assertions.push_back({"eigensolver", false, e.what()});
    return art;
  }
  const double norm_inf = jacobi::perturbation_schatten_norm(op, infinity_p);

  auto accepted = ordered_json::array();
  report::CsvTable table("spectrum", {"status", "reason", "lambda_re", "lambda_im", "drift", "tail_mass", "multiplicity"});
  report::PlotData scatter("eigenvalue_scatter");
  scatter.comment("columns: re im; series 1 accepted, series 2 rejected");
  bool inside = true;
  for (const auto& e : spec.accepted) {
    accepted.push_back({{"lambda", report::complex_pair(e.lambda)},
                        {"drift", e.drift},
                        {"tail_mass", e.tail_mass},
                        {"multiplicity", e.multiplicity}});
    table.add_row({"accepted", "", format_double(e.lambda.real()), format_double(e.lambda.imag()),
                   format_double(e.drift), format_double(e.tail_mass), std::to_string(e.multiplicity)});
    scatter.point(e.lambda.real(), e.lambda.imag());
    inside = inside && std::abs(e.lambda) <= 2.0 + norm_inf + 1e-9;
  }
  scatter.break_series();
  std::map<std::string, std::size_t> reasons;
  for (const auto& r : spec.rejected) {
    ++reasons[jacobi::to_string(r.reason)];
    table.add_row({"rejected", jacobi::to_string(r.reason), format_double(r.lambda.real()),
                   format_double(r.lambda.imag()), "", "", ""});
    scatter.point(r.lambda.real(), r.lambda.imag());
  }
  ordered_json rejected = ordered_json::object();
  for (const char* reason : {"near-essential", "unmatched", "drift", "tail"}) rejected[reason] = reasons[reason];

  art.results = {{"truncation_sizes", ordered_json::array({spec.n, spec.n_prime})},
                 {"perturbation_norm_inf", norm_inf},
                 {"accepted", accepted},
                 {"rejected_counts", rejected}};
  art.assertions.push_back({"spectrum-disk", inside, "accepted eigenvalues within |lambda| <= 2 + ||J - J0||"});
  art.tables.push_back(std::move(table));
  art.plots.push_back(std::move(scatter));
  return art;
}

inline report::Artifacts run_det(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  const auto op = load_operator(p);
  const int pp = static_cast<int>(at_least(p, "p", 1));
  const auto n = static_cast<std::size_t>(at_least(p, "n", 2));
  const auto delta_n = static_cast<std::size_t>(at_least(p, "delta_n", 1));
  const auto rays = at_least(p, "rays", 1);
  const auto points = at_least(p, "ray_points", 2);
  const bool check_f1 = p.at("check_f1").get<bool>() && pp == 1;
  if (n < op.support() + 2) throw ConfigError("n", "'n' must be at least support + 2");

  const double norm_p = jacobi::perturbation_schatten_norm(op, pp);
  const double r_min = 2.5;  // |lambda| >= 2.5 keeps dist(lambda, [-2, 2]) >= 0.5
  const double r_max = 1e3 * jacobi::perturbation_schatten_norm(op, infinity_p) + 10.0;

  report::CsvTable table("det_samples", {"lambda_re", "lambda_im", "z_re", "z_im", "p", "logmod", "margin"});
  report::PlotData plot("det_rays");
  plot.comment("columns: |lambda| log|u_p|; one series per ray");
  double max_margin = -std::numeric_limits<double>::infinity();
  double max_f1 = -std::numeric_limits<double>::infinity();
  double worst_far = 0.0;
  std::size_t unstable = 0;
  for (std::int64_t k = 0; k < rays; ++k) {
    const double theta = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(rays);
    for (std::int64_t i = 0; i < points; ++i) {
      const double radius = r_min * std::pow(r_max / r_min, static_cast<double>(i) / static_cast<double>(points - 1));
      const cplx lambda = std::polar(radius, theta);
      const auto st = det::stabilized_determinant(op, lambda, pp, n, delta_n);
      const auto& s = st.sample;
      if (!st.stabilized) ++unstable;
      max_margin = std::max(max_margin, s.bound_margin);
      if (check_f1) max_f1 = std::max(max_f1, *det::growth_bound_margins(op, lambda, pp, n).second);
      table.add_row({format_double(s.lambda.real()), format_double(s.lambda.imag()), format_double(s.z.real()),
                     format_double(s.z.imag()), std::to_string(pp), format_double(s.log_modulus),
                     format_double(s.bound_margin)});
      plot.point(radius, s.log_modulus);
      if (i == points - 1) worst_far = std::max(worst_far, std::abs(s.value - 1.0));
    }
    plot.break_series();
  }
  art.results = {{"p", pp},
                 {"perturbation_norm_p", norm_p},
                 {"samples", table.rows()},
                 {"max_margin", max_margin},
                 {"max_f1_margin", check_f1 ? ordered_json(max_f1) : ordered_json(nullptr)},
                 {"unstabilized_samples", unstable},
                 {"far_field_deviation", worst_far}};
  art.assertions.push_back({"det-growth", max_margin <= 1e-12, "max margin " + format_double(max_margin)});
  if (check_f1) art.assertions.push_back({"det-f1", max_f1 <= 1e-12, "max f1 margin " + format_double(max_f1)});
  art.assertions.push_back({"det-normalization", worst_far <= 0.1, "max |u_p - 1| at the far end " + format_double(worst_far)});
  art.tables.push_back(std::move(table));
  art.plots.push_back(std::move(plot));
  return art;
}

inline report::Artifacts run_lt_sweep(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  jacobi::EnsembleParams ep;
  ep.support = static_cast<std::size_t>(at_least(p, "support", 1));
  ep.scale = p.at("scale").get<double>();
  ep.ratio = p.at("ratio").get<double>();
  ep.seed = cfg.seed;
  ep.target_p = static_cast<int>(at_least(p, "p", 1));
  if (!(ep.scale >= 0.0)) throw ConfigError("scale", "'scale' must be >= 0");
  if (!(ep.ratio > 0.0 && ep.ratio <= 1.0)) throw ConfigError("ratio", "'ratio' must lie in (0, 1]");

  lt::SweepOptions so;
  so.count = static_cast<std::size_t>(at_least(p, "count", 1));
  so.p = ep.target_p;
  so.eps = positive(p, "eps");
  so.scales.clear();
  if (!p.at("scales").is_array() || p.at("scales").empty()) throw ConfigError("scales", "'scales' must be a non-empty array");
  for (const auto& s : p.at("scales")) {
    if (!s.is_number() || !(s.get<double>() > 0.0)) throw ConfigError("scales", "'scales' entries must be positive numbers");
    so.scales.push_back(s.get<double>());
  }
  so.certify = certify_options(p);
  if (so.certify.n < 8 * ep.support) throw ConfigError("n", "'n' must be at least 8 * support");
  so.workers = cfg.workers;
  const double max_ratio = positive(p, "max_ratio");

  const auto res = lt::ratio_sweep(ep, so);
  const auto& s = res.summary;

  report::CsvTable t4("lt_reports", {"id", "index", "seed", "scale", "p", "eps", "lhs", "norm", "ratio"});
  report::CsvTable t3("t3_reports", {"id", "index", "seed", "scale", "p", "lhs", "rhs", "ratio"});
  std::vector<double> ratios;
  for (const auto& r : res.reports) {
    const bool is_t3 = r.id == lt::InequalityId::t3a || r.id == lt::InequalityId::t3b;
    if (is_t3) {
      t3.add_row({lt::to_string(r.id), std::to_string(r.index), std::to_string(r.seed), format_double(r.scale),
                  std::to_string(r.p), format_double(r.lhs), format_double(r.rhs), format_double(r.ratio)});
    } else {
      t4.add_row({lt::to_string(r.id), std::to_string(r.index), std::to_string(r.seed), format_double(r.scale),
                  std::to_string(r.p), format_double(r.eps), format_double(r.lhs), format_double(r.rhs),
                  format_double(r.ratio)});
      ratios.push_back(r.ratio);
    }
  }
  auto per_scale = ordered_json::array();
  for (const auto& row : s.per_scale)
    per_scale.push_back({{"scale", row.scale}, {"count", row.count}, {"max_ratio", row.max_ratio}, {"min_ratio", row.min_ratio}});
  auto failures = ordered_json::array();
  for (const auto& f : res.failures) failures.push_back({{"index", f.index}, {"scale", f.scale}, {"message", f.message}});

  const char* t4_id = so.p == 1 ? "e8" : "e81";
  art.results = {{"summary",
                  {{"count", s.count},
                   {"max_ratio", s.max_ratio},
                   {"min_ratio", s.min_ratio},
                   {"violations", s.violations},
                   {"max_t3_ratio", s.max_t3_ratio},
                   {"per_scale", per_scale}}},
                 {"failures", failures}};
  std::size_t v_a = 0, v_b = 0;
  for (const auto& r : res.reports) {
    if (!lt::violates(r)) continue;
    (r.id == lt::InequalityId::t3a ? v_a : v_b)++;
  }
  art.assertions.push_back({"t3a", v_a == 0, std::to_string(v_a) + " violations"});
  art.assertions.push_back({"t3b", v_b == 0, std::to_string(v_b) + " violations"});
  art.assertions.push_back({"draws", res.failures.empty(), std::to_string(res.failures.size()) + " draws failed"});
  art.assertions.push_back({t4_id, std::isfinite(s.max_ratio) && s.max_ratio <= max_ratio,
                            "max ratio " + format_double(s.max_ratio) + " (tripwire " + format_double(max_ratio) + ")"});
  art.tables.push_back(std::move(t4));
  art.tables.push_back(std::move(t3));
  art.plots.push_back(report::histogram("ratio_histogram", ratios));
  return art;
}

inline report::Artifacts run_disk_check(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  const auto samples = static_cast<std::size_t>(at_least(p, "samples", 1));
  const int grid = static_cast<int>(at_least(p, "grid", 1));
  const double lo = positive(p, "bracket_lo");
  const double hi = positive(p, "bracket_hi");
  std::vector<double> deltas;
  if (!p.at("deltas").is_array() || p.at("deltas").empty()) throw ConfigError("deltas", "'deltas' must be a non-empty array");
  for (const auto& d : p.at("deltas")) {
    if (!d.is_number() || !(d.get<double>() > 0.0 && d.get<double>() < 1.0))
      throw ConfigError("deltas", "'deltas' entries must lie in (0, 1)");
    deltas.push_back(d.get<double>());
  }
  if (!std::is_sorted(deltas.begin(), deltas.end())) throw ConfigError("deltas", "'deltas' must be ascending");

  const auto rt = checks::joukowski_roundtrip_suite(cfg.seed, samples);
  const auto e205 = checks::e205_suite(cfg.seed, samples);

  report::PlotData plot("lemma3_brackets");
  plot.comment("columns: delta ratio; series: distance min, distance max, endpoint min, endpoint max, radial min, radial max");
  std::vector<lt::Lemma3Scan> scans;
  for (double d : deltas) scans.push_back(lt::lemma3_ratio_scan(d, grid));
  auto series = [&](auto getter) {
    for (std::size_t i = 0; i < deltas.size(); ++i) plot.point(deltas[i], getter(scans[i]));
    plot.break_series();
  };
  series([](const lt::Lemma3Scan& s) { return s.distance.min; });
  series([](const lt::Lemma3Scan& s) { return s.distance.max; });
  series([](const lt::Lemma3Scan& s) { return s.endpoint.min; });
  series([](const lt::Lemma3Scan& s) { return s.endpoint.max; });
  series([](const lt::Lemma3Scan& s) { return s.radial.min; });
  series([](const lt::Lemma3Scan& s) { return s.radial.max; });

  const auto& first = scans.front();
  const bool in_bracket = [&] {
    for (const auto* b : {&first.distance, &first.endpoint, &first.radial})
      if (!(b->min >= lo && b->max <= hi)) return false;
    return true;
  }();
  bool monotone = true;
  for (std::size_t i = 1; i < scans.size(); ++i)
    for (auto member : {&lt::Lemma3Scan::distance, &lt::Lemma3Scan::endpoint, &lt::Lemma3Scan::radial}) {
      // Tightness is the equivalence constant max/min. Raw endpoints are not
      // comparable: the outermost grid radius 1 - (1 - delta)/grid moves with delta.
      monotone = monotone && (scans[i].*member).spread() <= (scans[i - 1].*member).spread();
    }

  auto brackets = ordered_json::array();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    auto bj = [](const lt::RatioBracket& b) { return ordered_json::array({b.min, b.max}); };
    brackets.push_back({{"delta", deltas[i]},
                        {"distance", bj(scans[i].distance)},
                        {"endpoint", bj(scans[i].endpoint)},
                        {"radial", bj(scans[i].radial)}});
  }
  art.results = {{"joukowski_roundtrip", check_json(rt)}, {"e205", check_json(e205)}, {"lemma3", brackets}};
  art.assertions.push_back(check_assertion(rt));
  art.assertions.push_back(check_assertion(e205));
  art.assertions.push_back({"lemma3-bracket", in_bracket, "ratios at delta = " + format_double(deltas.front()) + " within [" +
                                                              format_double(lo) + ", " + format_double(hi) + "]"});
  art.assertions.push_back({"lemma3-monotone", monotone, "max/min spread shrinks as delta grows"});
  art.plots.push_back(std::move(plot));
  return art;
}

inline report::Artifacts run_lemma_check(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  const double gmin = positive(p, "gamma_min");
  const double gmax = positive(p, "gamma_max");
  if (gmin > gmax) throw ConfigError("gamma_min", "'gamma_min' must not exceed 'gamma_max'");
  if (gmin * 100.0 >= 1.0) throw ConfigError("gamma_min", "'gamma_min' must be below 1/100");
  const auto l1 = checks::lemma1_suite(cfg.seed, static_cast<std::size_t>(at_least(p, "lemma1_samples", 1)), gmin, gmax);
  const auto e226 = checks::e226_suite(cfg.seed, static_cast<std::size_t>(at_least(p, "e226_samples", 1)));
  const auto e202 = checks::e202_suite();
  const auto e203 = checks::e203_suite(cfg.seed, static_cast<std::size_t>(at_least(p, "e203_samples", 1)));

  report::PlotData plot("harmonic_measure_origin");
  plot.comment("columns: gamma omega_gamma(0); series: computed, gamma/pi, gamma/2");
  for (double g : checks::gamma_grid()) plot.point(g, disk::harmonic_measure_arc(0.0, g));
  plot.break_series();
  for (double g : checks::gamma_grid()) plot.point(g, g / std::numbers::pi);
  plot.break_series();
  for (double g : checks::gamma_grid()) plot.point(g, g / 2.0);

  art.results = {{"lemma1", check_json(l1)}, {"e226", check_json(e226)}, {"e202", check_json(e202)}, {"e203", check_json(e203)}};
  for (const auto* r : {&l1, &e226, &e202, &e203}) art.assertions.push_back(check_assertion(*r));
  art.plots.push_back(std::move(plot));
  return art;
}

inline report::Artifacts run_jensen_check(const RunConfig& cfg) {
  const auto& p = cfg.params;
  report::Artifacts art;
  const auto count = static_cast<std::size_t>(at_least(p, "products", 1));
  const auto max_zeros = static_cast<std::size_t>(at_least(p, "max_zeros", 1));
  const int n_grid = static_cast<int>(at_least(p, "n_grid", 1));
  const double radius = positive(p, "radius");
  if (!(radius < 1.0)) throw ConfigError("radius", "'radius' must lie in (0, 1)");
  const double tol = positive(p, "tol");
  std::vector<double> errors;
  const auto jensen = checks::jensen_suite(cfg.seed, count, max_zeros, n_grid, radius, tol, &errors);
  const auto e100 = checks::classical_blaschke_suite(cfg.seed, count, max_zeros, radius);

  report::PlotData plot("jensen_errors");
  plot.comment("columns: product_index abs_error");
  for (std::size_t i = 0; i < errors.size(); ++i) plot.point(static_cast<double>(i), errors[i]);
  art.results = {{"jensen", check_json(jensen)}, {"e100", check_json(e100)}};
  art.assertions.push_back(check_assertion(jensen));
  art.assertions.push_back(check_assertion(e100));
  art.plots.push_back(std::move(plot));
  return art;
}

}  // namespace detail

/// Runs one command and returns its artifacts; nothing is written here.
inline report::Artifacts run(const RunConfig& cfg) {
  report::Artifacts art;
  const std::string& c = cfg.command;
  if (c == "eig") art = detail::run_eig(cfg);
  else if (c == "spectrum") art = detail::run_spectrum(cfg);
  else if (c == "det") art = detail::run_det(cfg);
  else if (c == "lt-sweep") art = detail::run_lt_sweep(cfg);
  else if (c == "disk-check") art = detail::run_disk_check(cfg);
  else if (c == "lemma-check") art = detail::run_lemma_check(cfg);
  else if (c == "jensen-check") art = detail::run_jensen_check(cfg);
  else throw UsageError("unknown command '" + c + "'");
  art.command = c;
  art.config = detail::public_config(cfg);
  return art;
}

/// Full CLI entry: parse, run, emit. Diagnostics go to `err`, a one-line
/// summary per assertion to `out`.
inline int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return exit_usage;
  }
  if (std::any_of(args.begin(), args.end(), [](const std::string& a) { return a == "--help" || a == "-h"; }) ||
      args[0] == "help") {
    out << usage();
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), args[0]) != names.end())
      out << "\nkeys for '" << args[0] << "' with their defaults:\n" << report::to_json_text(default_params(args[0]));
    return exit_ok;
  }
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const ConfigError& e) {
    err << "spectool: invalid configuration (key '" << e.key() << "'): " << e.what() << "\n";
    return exit_usage;
  } catch (const UsageError& e) {
    err << "spectool: " << e.what() << "\nrun 'spectool --help' for usage\n";
    return exit_usage;
  }

  report::Artifacts art;
  try {
    art = run(cfg);
  } catch (const ConfigError& e) {
    err << "spectool: invalid configuration (key '" << e.key() << "'): " << e.what() << "\n";
    return exit_usage;
  }
  try {
    report::emit_report(art, cfg.out_dir);
  } catch (const std::exception& e) {
    err << "spectool: " << e.what() << "\n";
    return exit_io;
  }
  for (const auto& a : art.assertions) out << (a.passed ? "PASS " : "FAIL ") << a.id << ": " << a.detail << "\n";
  if (!art.passed()) {
    for (const auto& a : art.assertions)
      if (!a.passed) err << "spectool: assertion failed: " << a.id << "\n";
    return exit_assertion;
  }
  return exit_ok;
}

}  // namespace spectool::cli

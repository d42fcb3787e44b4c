#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <spectool/cli.hpp>

using namespace spectool;
using namespace spectool::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("spectool-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("number formatting") {
  CHECK(report::format_double(1.0) == "1.0000000000000000e+00");
  CHECK(report::format_double(-0.0) == "0.0000000000000000e+00");
  CHECK(report::format_double(0.1) == "1.0000000000000001e-01");
  CHECK(report::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(report::format_double(std::nan("")) == "nan");
  // 17 significant digits round-trip every double.
  for (double x : {0.1, 1.0 / 3.0, 2.5e-300, 1.7976931348623157e308}) CHECK(std::stod(report::format_double(x)) == x);
}

TEST_CASE("JSON text keeps key order and fixed float format") {
  report::ordered_json j;
  j["zeta"] = 1.5;
  j["alpha"] = report::ordered_json::array({1, 2});
  j["pair"] = report::complex_pair(cplx(0.5, -1.0));
  j["nan"] = std::nan("");
  j["list"] = report::ordered_json::array({1, 2, 3, 4, 5});
  const std::string t = report::to_json_text(j);
  CHECK(t.find("\"zeta\"") < t.find("\"alpha\""));
  CHECK(t.find("1.5000000000000000e+00") != std::string::npos);
  CHECK(t.find("[5.0000000000000000e-01, -1.0000000000000000e+00]") != std::string::npos);
  CHECK(t.find("\"nan\": null") != std::string::npos);
  CHECK(report::ordered_json::parse(t)["list"].size() == 5);
  CHECK(report::to_json_text(j) == t);
}

TEST_CASE("CSV tables and plot data") {
  report::CsvTable t("x", {"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.text() == "a,b\n1,2\n");
  CHECK_THROWS_AS(t.add_row({"1"}), std::invalid_argument);

  report::PlotData p("y");
  p.comment("c");
  p.point(1.0, 2.0).break_series().point(3.0, 4.0);
  CHECK(p.text() == "# c\n1.0000000000000000e+00 2.0000000000000000e+00\n\n3.0000000000000000e+00 4.0000000000000000e+00\n");
}

TEST_CASE("histogram uses 32 equal bins over the observed range") {
  std::vector<double> v;
  for (int i = 0; i <= 64; ++i) v.push_back(i / 64.0);
  const auto h = report::histogram("h", v);
  const std::string t = h.text();
  CHECK(t.rfind("# bin_edges: 0.0000000000000000e+00", 0) == 0);
  CHECK(t.find("1.0000000000000000e+00\n") != std::string::npos);
  std::istringstream is(t);
  std::string line;
  std::size_t bins = 0;
  double total = 0.0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++bins;
    total += std::stod(line.substr(line.find(' ') + 1));
  }
  CHECK(bins == 32);
  CHECK(total == 65.0);
  // Empty and constant inputs still produce a well-formed file.
  CHECK(count_lines(report::histogram("e", std::vector<double>{}).text()) == 34);
  CHECK(count_lines(report::histogram("c", std::vector<double>{2.0, 2.0}).text()) == 34);
}

TEST_CASE("emit_report writes deterministic files atomically") {
  TempDir dir("emit");
  report::Artifacts empty;
  empty.command = "none";
  const auto files = report::emit_report(empty, dir.path / "a");
  REQUIRE(files.size() == 1);
  const auto j = report::ordered_json::parse(slurp(files[0]));
  CHECK(j["results"].empty());
  CHECK(j["assertions"].empty());
  CHECK(j["passed"] == true);

  report::Artifacts art;
  art.command = "x";
  art.results["v"] = 0.25;
  art.assertions.push_back({"ok", true, "fine"});
  art.tables.emplace_back("t", std::vector<std::string>{"a"});
  art.plots.emplace_back("p");
  report::emit_report(art, dir.path / "b");
  report::emit_report(art, dir.path / "c");
  for (const char* name : {"report.json", "t.csv", "p.dat"})
    CHECK(slurp(dir.path / "b" / name) == slurp(dir.path / "c" / name));
  for (const auto& e : fs::directory_iterator(dir.path / "b")) CHECK(e.path().extension() != ".tmp");

  write_file(dir.path / "blocker", "x");
  CHECK_THROWS_AS(report::emit_report(art, dir.path / "blocker" / "sub"), report::IoError);
}

TEST_CASE("configuration layering: defaults, file, --set") {
  TempDir dir("cfg");
  write_file(dir.path / "c.json", R"({"count": 5, "eps": 0.2, "scales": [1, 2]})");
  const std::vector<std::string> args{"lt-sweep", "--config", (dir.path / "c.json").string(), "--set", "count=9",
                                      "--workers", "3", "--out", "elsewhere"};
  const auto cfg = parse_args(args);
  CHECK(cfg.command == "lt-sweep");
  CHECK(cfg.params["count"] == 9);
  CHECK(cfg.params["eps"] == 0.2);
  CHECK(cfg.params["scales"].size() == 2);
  CHECK(cfg.params["p"] == 1);
  CHECK(cfg.workers == 3);
  CHECK(cfg.seed == 7);
  CHECK(cfg.out_dir == fs::path("elsewhere"));

  // Non-JSON values fall back to strings; integral floats are accepted for integers.
  const auto c2 = parse_args(std::vector<std::string>{"eig", "--set", "operator=op.json", "--set", "n=12.0"});
  CHECK(c2.params["operator"] == "op.json");
  CHECK(c2.params["n"] == 12);
}

TEST_CASE("configuration errors name the offending key") {
  try {
    parse_args(std::vector<std::string>{"det", "--set", "nonsense=1"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "nonsense");
  }
  CHECK_THROWS_AS(parse_args(std::vector<std::string>{"det", "--set", "p=\"x\""}), ConfigError);
  CHECK_THROWS_AS(parse_args(std::vector<std::string>{"det", "--set", "n=2.5"}), ConfigError);
  CHECK_THROWS_AS(parse_args(std::vector<std::string>{"det", "--set", "novalue"}), UsageError);
  CHECK_THROWS_AS(parse_args(std::vector<std::string>{"det", "--workers", "0"}), ConfigError);
  CHECK_THROWS_AS(parse_args(std::vector<std::string>{"det", "--config", "/nonexistent/x.json"}), ConfigError);
  CHECK_THROWS_AS(parse_args(std::vector<std::string>{"det", "--frobnicate"}), UsageError);

  const auto bad = run_cli({"jensen-check", "--set", "tol=-1", "--out", "unused"});
  CHECK(bad.code == exit_usage);
  CHECK(bad.err.find("'tol'") != std::string::npos);

  const auto unknown = run_cli({"lemma-check", "--set", "samples=3"});
  CHECK(unknown.code == exit_usage);
  CHECK(unknown.err.find("samples") != std::string::npos);
}

TEST_CASE("usage and help") {
  const auto none = run_cli({});
  CHECK(none.code == exit_usage);
  CHECK(none.err.find("usage: spectool") != std::string::npos);

  const auto help = run_cli({"--help"});
  CHECK(help.code == exit_ok);
  for (const auto& c : command_names()) CHECK(help.out.find(c) != std::string::npos);
  CHECK(list_commands() == usage());

  const auto cmd_help = run_cli({"det", "--help"});
  CHECK(cmd_help.code == exit_ok);
  CHECK(cmd_help.out.find("\"ray_points\"") != std::string::npos);

  const auto typo = run_cli({"lt-swep"});
  CHECK(typo.code == exit_usage);
  CHECK(typo.err.find("did you mean 'lt-sweep'") != std::string::npos);
  CHECK(suggest_command("spectrm") == std::optional<std::string>("spectrum"));
  CHECK_FALSE(suggest_command("completely-different"));
}

TEST_CASE("lemma-check with defaults reports every suite") {
  TempDir dir("lemma");
  const auto r = run_cli({"lemma-check", "--out", dir.path.string()});
  CHECK(r.code == exit_ok);
  const auto j = report::ordered_json::parse(slurp(dir.path / "report.json"));
  for (const char* id : {"lemma1", "e226", "e202", "e203"}) {
    REQUIRE(j["results"].contains(id));
    CHECK(j["results"][id]["passed"] == j["results"][id]["samples"]);
  }
  CHECK(j["results"]["lemma1"]["samples"] == 10000);
  CHECK(j["results"]["e226"]["samples"] == 100000);
  CHECK_FALSE(j["config"].contains("workers"));
  CHECK_FALSE(j["config"].contains("out"));
  CHECK(fs::exists(dir.path / "harmonic_measure_origin.dat"));
}

TEST_CASE("spectrum on the rank-one operator lists 2.5") {
  TempDir dir("spec");
  const auto r = run_cli({"spectrum", "--out", dir.path.string()});
  CHECK(r.code == exit_ok);
  const auto j = report::ordered_json::parse(slurp(dir.path / "report.json"));
  REQUIRE(j["results"]["accepted"].size() == 1);
  CHECK(std::abs(j["results"]["accepted"][0]["lambda"][0].get<double>() - 2.5) < 1e-6);
  CHECK(fs::exists(dir.path / "eigenvalue_scatter.dat"));
  CHECK(fs::exists(dir.path / "spectrum.csv"));

  // Operator read from a JSON file.
  write_file(dir.path / "op.json", R"({"b": [[0, 2]]})");
  const auto r2 = run_cli({"spectrum", "--set", "operator=" + (dir.path / "op.json").string(), "--out",
                           (dir.path / "two").string()});
  CHECK(r2.code == exit_ok);
  const auto j2 = report::ordered_json::parse(slurp(dir.path / "two" / "report.json"));
  REQUIRE(j2["results"]["accepted"].size() == 1);
  CHECK(std::abs(j2["results"]["accepted"][0]["lambda"][1].get<double>() - 1.5) < 1e-6);

  const auto bad = run_cli({"spectrum", "--set", R"(operator={"q": []})", "--out", (dir.path / "three").string()});
  CHECK(bad.code == exit_usage);
  CHECK(bad.err.find("operator") != std::string::npos);
}

TEST_CASE("eig on an explicit matrix") {
  TempDir dir("eig");
  const auto r = run_cli({"eig", "--set", "matrix=[[0,1],[1,0]]", "--out", dir.path.string()});
  CHECK(r.code == exit_ok);
  const auto j = report::ordered_json::parse(slurp(dir.path / "report.json"));
  REQUIRE(j["results"]["eigenvalues"].size() == 2);
  CHECK(j["results"]["eigenvalues"][0][0].get<double>() == Catch::Approx(-1.0));
  CHECK(j["results"]["eigenvalues"][1][0].get<double>() == Catch::Approx(1.0));
  CHECK(run_cli({"eig", "--set", "matrix=[[0,1]]", "--out", dir.path.string()}).code == exit_usage);
}

TEST_CASE("lt-sweep rows, determinism across workers and histogram") {
  TempDir dir("lt");
  const auto a = run_cli({"lt-sweep", "--set", "count=100", "--workers", "1", "--out", (dir.path / "w1").string()});
  const auto b = run_cli({"lt-sweep", "--set", "count=100", "--workers", "4", "--out", (dir.path / "w4").string()});
  CHECK(a.code == exit_ok);
  CHECK(b.code == exit_ok);
  const std::string csv = slurp(dir.path / "w1" / "lt_reports.csv");
  CHECK(count_lines(csv) == 101);
  CHECK(csv.rfind("id,index,seed,scale,p,eps,lhs,norm,ratio\n", 0) == 0);
  for (const char* f : {"report.json", "lt_reports.csv", "t3_reports.csv", "ratio_histogram.dat"})
    CHECK(slurp(dir.path / "w1" / f) == slurp(dir.path / "w4" / f));
  CHECK(slurp(dir.path / "w1" / "ratio_histogram.dat").rfind("# bin_edges:", 0) == 0);
}

TEST_CASE("assertion failures exit 1 and name the inequality") {
  TempDir dir("fail");
  const auto r = run_cli({"jensen-check", "--set", "tol=1e-30", "--set", "products=3", "--out", dir.path.string()});
  CHECK(r.code == exit_assertion);
  CHECK(r.err.find("jensen") != std::string::npos);
  const auto j = report::ordered_json::parse(slurp(dir.path / "report.json"));
  CHECK(j["passed"] == false);
}

TEST_CASE("unwritable output directory exits 3") {
  TempDir dir("io");
  write_file(dir.path / "file", "x");
  const auto r = run_cli({"lemma-check", "--set", "lemma1_samples=10", "--set", "e226_samples=10", "--out",
                          (dir.path / "file" / "sub").string()});
  CHECK(r.code == exit_io);
}

TEST_CASE("det and disk-check commands") {
  TempDir dir("det");
  const auto d = run_cli({"det", "--out", (dir.path / "d").string()});
  CHECK(d.code == exit_ok);
  const std::string csv = slurp(dir.path / "d" / "det_samples.csv");
  CHECK(csv.rfind("lambda_re,lambda_im,z_re,z_im,p,logmod,margin\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 8 * 24);

  // Small perturbations break the f_1 bound: K e^K < 1 for K < 0.567 while f_1 stays near 1.
  const auto weak = run_cli({"det", "--set", R"(operator={"b": [0.3]})", "--out", (dir.path / "w").string()});
  CHECK(weak.code == exit_assertion);
  CHECK(weak.out.find("FAIL det-f1") != std::string::npos);
  CHECK(weak.out.find("PASS det-growth") != std::string::npos);

  const auto k = run_cli({"disk-check", "--set", "samples=500", "--out", (dir.path / "k").string()});
  CHECK(k.code == exit_ok);
  CHECK(run_cli({"disk-check", "--set", "deltas=[0.7, 0.3]", "--out", (dir.path / "k2").string()}).code == exit_usage);
}

#pragma once

// Deterministic artifact emission: JSON with stable key order and fixed
// 17-significant-digit floats, CSV tables, whitespace-separated plot data,
// all staged in memory and committed with temp-file + rename.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

namespace spectool::report {

using ordered_json = nlohmann::ordered_json;

/// Scientific notation with 17 significant digits.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

namespace detail {

inline void write_string(std::string& out, const std::string& s) { out += ordered_json(s).dump(); }

inline void write_value(std::string& out, const ordered_json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        write_string(out, key);
        out += ": ";
        write_value(out, value, indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays (complex pairs, small vectors) stay on one line.
      const bool flat = j.size() <= 4 && std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) out += ", ";
          write_value(out, j[i], indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        out += pad;
        write_value(out, j[i], indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      out += format_double(x);
      return;
    }
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// JSON text with insertion-ordered keys and fixed float formatting.
inline std::string to_json_text(const ordered_json& j) {
  std::string out;
  detail::write_value(out, j, 2, 0);
  out += "\n";
  return out;
}

inline ordered_json complex_pair(std::complex<double> v) { return ordered_json::array({v.real(), v.imag()}); }

class CsvTable {
public:
  CsvTable(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {}

  const std::string& name() const noexcept { return name_; }
  std::size_t rows() const noexcept { return rows_.size(); }

  CsvTable& add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("CsvTable: row width mismatch in " + name_);
    rows_.push_back(std::move(cells));
    return *this;
  }

  std::string text() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

private:
  std::string name_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Two-column "x y" plot data; blank lines separate series.
class PlotData {
public:
  explicit PlotData(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

  PlotData& comment(const std::string& c) {
    comments_.push_back(c);
    return *this;
  }
  PlotData& point(double x, double y) {
    body_ += format_double(x) + " " + format_double(y) + "\n";
    return *this;
  }
  PlotData& break_series() {
    body_ += "\n";
    return *this;
  }

  std::string text() const {
    std::string out;
    for (const auto& c : comments_) out += "# " + c + "\n";
    return out + body_;
  }

private:
  std::string name_;
  std::vector<std::string> comments_;
  std::string body_;
};

inline constexpr int histogram_bins = 32;

/// 32 equal bins over the observed range; the edges go in the header comment
/// and each line holds (bin center, count).
inline PlotData histogram(std::string name, std::span<const double> values) {
  PlotData d(std::move(name));
  double lo = 0.0, hi = 0.0;
  if (!values.empty()) {
    lo = *std::min_element(values.begin(), values.end());
    hi = *std::max_element(values.begin(), values.end());
  }
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / histogram_bins;
  std::vector<std::size_t> counts(histogram_bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    counts[std::min<std::size_t>(b, histogram_bins - 1)]++;
  }
  std::string edges = "bin_edges:";
  for (int i = 0; i <= histogram_bins; ++i) edges += " " + format_double(lo + i * width);
  d.comment(edges);
  d.comment("columns: bin_center count");
  for (int i = 0; i < histogram_bins; ++i) d.point(lo + (i + 0.5) * width, static_cast<double>(counts[static_cast<std::size_t>(i)]));
  return d;
}

struct Assertion {
  std::string id;
  bool passed = true;
  std::string detail;
};

/// Everything a command produces.
struct Artifacts {
  std::string command;
  ordered_json config = ordered_json::object();
  ordered_json results = ordered_json::object();
  std::vector<Assertion> assertions;
  std::vector<CsvTable> tables;
  std::vector<PlotData> plots;

  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }

  ordered_json report_json() const {
    ordered_json j;
    j["command"] = command;
    j["config"] = config;
    j["results"] = results;
    auto arr = ordered_json::array();
    for (const auto& a : assertions) arr.push_back({{"id", a.id}, {"passed", a.passed}, {"detail", a.detail}});
    j["assertions"] = std::move(arr);
    j["passed"] = passed();
    return j;
  }
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Writes report.json, one CSV per table and one .dat per plot into `dir`.
/// Files go to temporaries first and are renamed only after every write
/// succeeded. Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const Artifacts& art, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.json", to_json_text(art.report_json()));
  for (const auto& t : art.tables) files.emplace_back(t.name() + ".csv", t.text());
  for (const auto& p : art.plots) files.emplace_back(p.name() + ".dat", p.text());

  std::vector<std::pair<fs::path, fs::path>> staged;
  auto cleanup = [&] {
    for (const auto& [tmp, _] : staged) fs::remove(tmp, ec);
  };
  for (const auto& [name, content] : files) {
    const fs::path final_path = dir / name;
    const fs::path tmp = dir / ("." + name + ".tmp");
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    os << content;
    os.close();
    staged.emplace_back(tmp, final_path);
    if (!os) {
      cleanup();
      throw IoError("failed writing " + tmp.string());
    }
  }
  std::vector<fs::path> out;
  for (const auto& [tmp, final_path] : staged) {
    fs::rename(tmp, final_path, ec);
    if (ec) {
      cleanup();
      throw IoError("failed renaming " + tmp.string() + " to " + final_path.string() + ": " + ec.message());
    }
    out.push_back(final_path);
  }
  return out;
}

}  // namespace spectool::report

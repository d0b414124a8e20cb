#pragma once

#include <charconv>
#include <deque>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adiabatic/errors.hpp"

namespace adiabatic::lab {

/// Method labels attached to result columns.
namespace method {
inline constexpr const char* kParam = "param";  // independent variable / input echo
inline constexpr const char* kOde = "ode";
inline constexpr const char* kBessel = "bessel-series";
inline constexpr const char* kPhase = "phase-recursion";
inline constexpr const char* kDyson = "dyson2";
inline constexpr const char* kOracle = "oracle";
inline constexpr const char* kResidual = "residual";
}  // namespace method

struct Column {
  std::string name;
  std::string method;
  friend bool operator==(const Column&, const Column&) = default;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) {
      throw ContractError("table '" + name + "': row has " + std::to_string(row.size()) + " values, expected " +
                          std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
  }

  friend bool operator==(const Table& a, const Table& b) {
    if (a.name != b.name || a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
      if (a.rows[r].size() != b.rows[r].size()) return false;
      for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
        const double x = a.rows[r][c], y = b.rows[r][c];
        if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
      }
    }
    return true;
  }
};

struct RunReport {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::deque<Table> tables;  // deque: table() references stay valid
  std::vector<std::string> flags;  // non-convergence and verdict flags
  std::vector<std::string> notes;
  std::optional<double> timing_seconds;  // only when requested; breaks bitwise determinism

  Table& table(const std::string& name, std::vector<Column> columns) {
    tables.push_back(Table{name, std::move(columns), {}});
    return tables.back();
  }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Shortest representation would also round-trip, but 17 significant digits
/// keeps columns uniform for downstream tools.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const RunReport& report) {
  bool first = true;
  for (const auto& t : report.tables) {
    if (!first) os << '\n';
    first = false;
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c].name;
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
      os << '\n';
    }
  }
}

namespace detail {

inline nlohmann::ordered_json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from_json(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ContractError("report: expected a number, got " + j.dump());
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunReport& report) {
  nlohmann::ordered_json j;
  j["command"] = report.command;
  j["parameters"] = report.parameters;
  auto tables = nlohmann::ordered_json::array();
  for (const auto& t : report.tables) {
    nlohmann::ordered_json jt;
    jt["name"] = t.name;
    auto cols = nlohmann::ordered_json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"method", c.method}});
    jt["columns"] = cols;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      auto jr = nlohmann::ordered_json::array();
      for (double v : row) jr.push_back(detail::number_to_json(v));
      rows.push_back(std::move(jr));
    }
    jt["rows"] = rows;
    tables.push_back(std::move(jt));
  }
  j["tables"] = tables;
  j["flags"] = report.flags;
  j["notes"] = report.notes;
  if (report.timing_seconds) j["timing_seconds"] = *report.timing_seconds;
  return j;
}

inline RunReport report_from_json(const nlohmann::ordered_json& j) {
  RunReport r;
  r.command = j.at("command").get<std::string>();
  r.parameters = j.at("parameters");
  for (const auto& jt : j.at("tables")) {
    Table t;
    t.name = jt.at("name").get<std::string>();
    for (const auto& jc : jt.at("columns"))
      t.columns.push_back({jc.at("name").get<std::string>(), jc.at("method").get<std::string>()});
    for (const auto& jr : jt.at("rows")) {
      std::vector<double> row;
      for (const auto& v : jr) row.push_back(detail::number_from_json(v));
      t.add_row(std::move(row));
    }
    r.tables.push_back(std::move(t));
  }
  r.flags = j.at("flags").get<std::vector<std::string>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("timing_seconds")) r.timing_seconds = j.at("timing_seconds").get<double>();
  return r;
}

enum class Format { Csv, Json };

inline void write_report(std::ostream& os, const RunReport& report, Format format) {
  if (format == Format::Csv) {
    write_csv(os, report);
  } else {
    os << to_json(report).dump(2) << '\n';
  }
}

/// Writes to `path`, or to stdout when `path` is empty.
inline void emit(const RunReport& report, Format format, const std::string& path) {
  if (path.empty()) {
    write_report(std::cout, report, format);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_report(out, report, format);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace adiabatic::lab

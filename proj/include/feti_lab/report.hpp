#pragma once

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace feti_lab {

/// Values are printed with 12 significant digits; JSON carries the same rounded values.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline double round_to_printed(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

/// Flat result table shared by the CSV and JSON writers.
struct Table {
  using Cell = std::variant<long long, double, std::string>;

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, double>> summary;  // e.g. fitted slopes

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string to_text(const Table::Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

/// Header line, one line per row, then one "# key=value" line per summary entry.
inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << to_text(row[c]);
    os << '\n';
  }
  for (const auto& [key, value] : t.summary) os << "# " << key << '=' << format_number(value) << '\n';
}

inline nlohmann::ordered_json to_json(const Table& t, const std::string& command) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) obj[t.columns[c]] = round_to_printed(v);
            else obj[t.columns[c]] = v;
          },
          row[c]);
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json out;
  out["command"] = command;
  out["rows"] = std::move(rows);
  if (!t.summary.empty()) {
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [key, value] : t.summary) s[key] = round_to_printed(value);
    out["summary"] = std::move(s);
  }
  return out;
}

inline void write_json(std::ostream& os, const Table& t, const std::string& command) {
  os << to_json(t, command).dump(2) << '\n';
}

}  // namespace feti_lab

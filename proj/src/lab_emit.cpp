#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/core.h>
#include <json.hpp>

#include "esaloha/error.hpp"
#include "esaloha/lab.hpp"

namespace esaloha {

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  return std::nullopt;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

Table results_table(const std::vector<ResultRow>& rows) {
  Table table;
  for (std::size_t start = 0;;) {
    const auto comma = kResultsHeader.find(',', start);
    table.header.emplace_back(kResultsHeader.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  auto num = [](const std::optional<double>& v) -> Cell {
    return v ? Cell{*v} : Cell{};
  };
  for (const auto& r : rows) {
    table.rows.push_back({num(r.param_value), r.scheme, num(r.total_throughput), num(r.degradation),
                          num(r.poa), num(r.pos), num(r.mean_total),
                          r.nep_count ? Cell{static_cast<std::int64_t>(*r.nep_count)} : Cell{},
                          r.status});
  }
  return table;
}

namespace {

std::string csv_cell(const Cell& cell) {
  struct {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_number(v); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string quoted = "\"";
      for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + '"';
    }
  } visitor;
  return std::visit(visitor, cell);
}

nlohmann::ordered_json json_cell(const Cell& cell) {
  struct {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const {
      if (!std::isfinite(v)) return format_number(v);
      return v;
    }
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  } visitor;
  return std::visit(visitor, cell);
}

}  // namespace

void emit_table(const Table& table, OutputFormat format, std::ostream& out) {
  for (const auto& row : table.rows)
    if (row.size() != table.header.size())
      throw ConfigError(fmt::format("table row has {} cells for {} columns", row.size(),
                                    table.header.size()));

  if (format == OutputFormat::Csv) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
      out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
      out << '\n';
    }
    return;
  }

  auto doc = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json object = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) object[table.header[c]] = json_cell(row[c]);
    doc.push_back(std::move(object));
  }
  out << doc.dump(2) << '\n';
}

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, std::ostream& out) {
  emit_table(results_table(rows), format, out);
}

void write_table(const Table& table, OutputFormat format, const std::string& path) {
  if (path.empty() || path == "-") {
    emit_table(table, format, std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("cannot write to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path));
  emit_table(table, format, out);
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing {}", path));
}

}  // namespace esaloha

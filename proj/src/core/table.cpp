#include "core/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "core/error.hpp"
#include "json.hpp"

namespace nfloc {

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw Error(ErrorCode::Config, "unknown output format '" + name + "' (expected csv|json)");
}

const char* extension(OutputFormat format) {
  return format == OutputFormat::Csv ? "csv" : "json";
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "row width does not match table columns");
  }
  rows_.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* d = std::get_if<double>(&cell)) return format_real(*d);
  return std::to_string(std::get<std::int64_t>(cell));
}

nlohmann::ordered_json cell_json(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* d = std::get_if<double>(&cell)) {
    if (!std::isfinite(*d)) return format_real(*d);
    return *d;
  }
  return std::get<std::int64_t>(cell);
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    os << (i ? "," : "") << columns_[i];
  }
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << cell_text(row[i]);
    }
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  auto doc = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = cell_json(row[i]);
    doc.push_back(std::move(obj));
  }
  os << doc.dump(2) << '\n';
}

void Table::write(std::ostream& os, OutputFormat format) const {
  if (format == OutputFormat::Csv) {
    write_csv(os);
  } else {
    write_json(os);
  }
}

std::filesystem::path Table::save(const std::filesystem::path& dir, const std::string& stem,
                                  OutputFormat format) const {
  const auto path = dir / (stem + "." + extension(format));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  write(out, format);
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
  return path;
}

}  // namespace nfloc

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace nfloc {

// Round-trippable, locale-independent formatting ("%.17g"); nan/inf spelled out.
std::string format_real(double value);

using Cell = std::variant<std::string, double, std::int64_t>;

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& name);
const char* extension(OutputFormat format);

// Column-oriented record set emitted by the experiment runners.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void write_csv(std::ostream& os) const;
  // Array of objects keyed by column name.
  void write_json(std::ostream& os) const;
  void write(std::ostream& os, OutputFormat format) const;

  // Writes <dir>/<stem>.<ext>; throws Io on failure.
  std::filesystem::path save(const std::filesystem::path& dir, const std::string& stem,
                             OutputFormat format) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace nfloc

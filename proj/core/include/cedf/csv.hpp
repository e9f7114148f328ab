#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cedf::csv {

// Locale-independent numeric formatting (std::to_chars, shortest form that
// round-trips). CSV bodies must be byte-identical across runs and machines,
// so iostream/locale formatting is off-limits here.
std::string format(double v);
std::string format(std::int64_t v);
std::string format(std::uint64_t v);

// Minimal CSV document: one header row, then data rows of equal width.
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);

  std::size_t rows() const { return rows_.size(); }
  std::size_t columns() const { return header_.size(); }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }

  // Serialize with '\n' line endings and a trailing newline.
  std::string to_string() const;
  // Write atomically-ish (temp file + rename) so partial files never appear.
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace cedf::csv

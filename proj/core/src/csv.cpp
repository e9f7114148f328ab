#include "cedf/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace cedf::csv {

namespace {

template <class T>
std::string to_chars_string(T v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("csv: to_chars failed");
  return std::string(buf, ptr);
}

}  // namespace

std::string format(double v) { return to_chars_string(v); }
std::string format(std::int64_t v) { return to_chars_string(v); }
std::string format(std::uint64_t v) { return to_chars_string(v); }

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw std::invalid_argument("csv::Table: empty header");
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw std::invalid_argument("csv::Table: row width does not match header");
  }
  rows_.push_back(std::move(cells));
}

std::string Table::to_string() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += cells[i];
    }
    out.push_back('\n');
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void Table::write_file(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("csv: cannot open " + tmp);
    const std::string body = to_string();
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("csv: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("csv: rename failed for " + path);
  }
}

}  // namespace cedf::csv

#pragma once

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace fracmc {

/// Minimal CSV writer: header row, then rows of doubles / integers / raw
/// cells.  Doubles are serialized with 17 significant digits so files
/// round-trip bit-exactly.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  void header(const std::string& line) { out_ << line << "\n"; }

  CsvWriter& cell(double v) {
    sep();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out_ << buf;
    return *this;
  }
  CsvWriter& cell(long long v) {
    sep();
    out_ << v;
    return *this;
  }
  CsvWriter& cell(const std::string& v) {
    sep();
    out_ << v;
    return *this;
  }
  void end_row() {
    out_ << "\n";
    first_ = true;
  }
  void raw_row(const std::string& line) { out_ << line << "\n"; }

 private:
  void sep() {
    if (!first_) out_ << ",";
    first_ = false;
  }
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace fracmc

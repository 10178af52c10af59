#pragma once

#include <cstdio>
#include <initializer_list>
#include <string>

namespace finsler {

/// Round-trippable, locale-independent number formatting for CSV output.
inline std::string csv_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Append one LF-terminated CSV row.
class CsvWriter {
 public:
  explicit CsvWriter(std::string& out) : out_(out) {}
  CsvWriter& header(std::initializer_list<const char*> cols) {
    bool first = true;
    for (const char* c : cols) {
      if (!first) out_ += ',';
      out_ += c;
      first = false;
    }
    out_ += '\n';
    return *this;
  }
  CsvWriter& cell(double x) { return raw(csv_num(x)); }
  CsvWriter& cell(long long x) { return raw(std::to_string(x)); }
  CsvWriter& cell(int x) { return raw(std::to_string(x)); }
  CsvWriter& cell(const std::string& s) { return raw(s); }
  CsvWriter& cell(const char* s) { return raw(s); }
  void end() {
    out_ += '\n';
    fresh_ = true;
  }

 private:
  CsvWriter& raw(const std::string& s) {
    if (!fresh_) out_ += ',';
    out_ += s;
    fresh_ = false;
    return *this;
  }
  std::string& out_;
  bool fresh_ = true;
};

}  // namespace finsler

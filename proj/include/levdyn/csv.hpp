#pragma once

// Deterministic text output: fixed number formatting, a config-hash header
// line on every CSV, and file writes that report unwritable paths.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace levdyn {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Round-trip representation ("%.17g"); nan/inf spelled as lowercase words.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::string_view config_hash, std::initializer_list<std::string_view> columns) {
    text_ += "# config_hash=";
    text_ += config_hash;
    text_ += '\n';
    bool first = true;
    for (auto c : columns) {
      if (!first) text_ += ',';
      text_ += c;
      first = false;
    }
    text_ += '\n';
  }

  CsvWriter& cell(double v) { return raw(format_double(v)); }
  CsvWriter& cell(long long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::size_t v) { return raw(std::to_string(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::string_view s) { return raw(s); }
  CsvWriter& cell(const char* s) { return raw(s); }

  void end_row() {
    text_ += '\n';
    row_open_ = false;
  }

  const std::string& text() const { return text_; }

 private:
  CsvWriter& raw(std::string_view s) {
    if (row_open_) text_ += ',';
    text_ += s;
    row_open_ = true;
    return *this;
  }

  std::string text_;
  bool row_open_ = false;
};

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot open " + path.string() + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  f.flush();
  if (!f) throw OutputError("failed writing " + path.string());
}

}  // namespace levdyn

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axon/errors.hpp"

namespace axon::csv {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

/// RFC-4180-style quoting: quote when the field holds a comma, quote or
/// newline; embedded quotes are doubled.
inline std::string escape(std::string_view field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path) {
    if (!out_) throw IoError("csv: cannot open '" + path + "' for writing");
    path_ = path;
  }

  void row(std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << escape(fields[i]);
    }
    out_ << '\n';
  }

  void row(std::initializer_list<std::string> fields) {
    row(std::span<const std::string>(fields.begin(), fields.size()));
  }

  void close() {
    out_.close();
    if (out_.fail()) throw IoError("csv: write to '" + path_ + "' failed");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace axon::csv

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <system_error>

#include "dtbh/common.hpp"

namespace dtbh {

// Shortest decimal form that round-trips through a double ("0.15", "1e-06").
// Integral values print without a trailing ".0" ("3", not "3.0").
inline void append_csv_number(std::string& out, double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  out.append(buf.data(), res.ptr);
}

inline std::string csv_number(double value) {
  std::string out;
  append_csv_number(out, value);
  return out;
}

inline std::string csv_number(long long value) {
  return std::to_string(value);
}

// Joins fields with commas and terminates the row with LF.
inline std::string csv_row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out.push_back(',');
    out += f;
    first = false;
  }
  out.push_back('\n');
  return out;
}

// Writes `content` to `path`, creating parent directories as needed.
inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::error_code ec;
  const auto parent = path.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent, ec);
    if (ec) {
      throw ConfigError("cannot create directory " + parent.string() + ": " +
                        ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("short write to " + path.string());
}

}  // namespace dtbh

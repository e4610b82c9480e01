#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace semihyp {

/// Minimal CSV writer; numbers are written with round-trip precision.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(std::string_view s);
  void end_row();

 private:
  void sep();

  std::ofstream out_;
  bool row_started_ = false;
};

/// "%.17g" formatting with "nan" / "inf" spelled out.
std::string format_double(double v);

}  // namespace semihyp

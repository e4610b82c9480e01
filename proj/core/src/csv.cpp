#include "semihyp/csv.hpp"

#include <cmath>
#include <cstdio>

#include "semihyp/error.hpp"

namespace semihyp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : out_(path) {
  if (!out_) raise(ErrorCode::format, "cannot open " + path.string() + " for writing");
  for (auto h : header) *this << h;
  end_row();
}

void CsvWriter::sep() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  sep();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

}  // namespace semihyp

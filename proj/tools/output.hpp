#pragma once

#include "railyard/frozen.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace railyard::cli {

// RFC-4180 style CSV with a header row; doubles printed with 17
// significant digits so they round-trip exactly.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  CsvWriter& operator<<(const std::string& s);
  void end_row();

private:
  void sep();
  std::ofstream out_;
  bool row_started_ = false;
};

std::string format_double(double v);

// Plain SVG 1.1 with one polyline per curve piece, kappa pointing up.
struct SvgCurve {
  std::vector<std::vector<CurveSample>> pieces;
  std::string color;
};
void write_svg(const std::filesystem::path& path, const std::vector<SvgCurve>& curves, const std::string& title);

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace railyard::cli

#include "output.hpp"

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <locale>
#include <sstream>

namespace railyard::cli {

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
  for (const auto& h : header) *this << h;
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

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  sep();
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    out_ << s;
    return *this;
  }
  out_ << '"';
  for (char c : s) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  row_started_ = false;
}

void write_svg(const std::filesystem::path& path, const std::vector<SvgCurve>& curves, const std::string& title) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : curves)
    for (const auto& piece : c.pieces)
      for (const auto& s : piece) {
        if (!std::isfinite(s.chi) || !std::isfinite(s.kappa)) continue;
        x0 = std::min(x0, s.chi);
        x1 = std::max(x1, s.chi);
        y0 = std::min(y0, s.kappa);
        y1 = std::max(y1, s.kappa);
      }
  if (!(x1 > x0)) x0 = 0.0, x1 = 1.0;
  if (!(y1 > y0)) y0 = 0.0, y1 = 1.0;
  const double W = 600.0, H = 600.0, pad = 20.0;
  auto X = [&](double v) { return pad + (v - x0) / (x1 - x0) * (W - 2 * pad); };
  auto Y = [&](double v) { return H - pad - (v - y0) / (y1 - y0) * (H - 2 * pad); };
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(7);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<title>" << title << "</title>\n"
     << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
     << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
  for (const auto& c : curves)
    for (const auto& piece : c.pieces) {
      if (piece.size() < 2) continue;
      os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& s : piece)
        if (std::isfinite(s.chi) && std::isfinite(s.kappa)) os << X(s.chi) << ',' << Y(s.kappa) << ' ';
      os << "\"/>\n";
    }
  os << "</svg>\n";
  write_text(path, os.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

} // namespace railyard::cli

#include "shockform/io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shockform/errors.hpp"

namespace shock {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) {
  f_ = std::fopen(path.c_str(), "w");
  if (!f_) throw Error(Errc::ValidationError, "cannot open " + path + " for writing");
  std::string line;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) line += ',';
    line += header[k];
  }
  line += '\n';
  std::fputs(line.c_str(), f_);
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(std::span<const double> values) {
  buf_.clear();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) buf_ += ',';
    buf_ += format_real(values[k]);
  }
  buf_ += '\n';
  std::fputs(buf_.c_str(), f_);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return static_cast<int>(k);
  throw Error(Errc::ParseError, "missing column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const int c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path);
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << path << ":" << lineno << ": expected " << t.header.size() << " fields, got " << cells.size();
      throw Error(Errc::ParseError, os.str());
    }
    std::vector<double> row(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      char* end = nullptr;
      row[k] = std::strtod(cells[k].c_str(), &end);
      if (end == cells[k].c_str() || *end != '\0') {
        std::ostringstream os;
        os << path << ":" << lineno << ": not a number: '" << cells[k] << "'";
        throw Error(Errc::ParseError, os.str());
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(Errc::ParseError, path + ": empty file");
  return t;
}

void ensure_directory(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::ValidationError, "cannot create directory " + dir + ": " + ec.message());
}

}  // namespace shock

#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace shock {

/// Round-trip representation of a double ("%.17g"; nan and inf spelled out).
std::string format_real(double v);

/// Comma-separated writer with a header row. Reals are written with
/// format_real so that reading them back is exact.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

 private:
  std::FILE* f_ = nullptr;
  std::string buf_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column index by name; ParseError if absent.
  int column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

/// ParseError (with the line number) on malformed input.
CsvTable read_csv(const std::string& path);

/// Creates the directory and its parents if needed.
void ensure_directory(const std::string& dir);

}  // namespace shock

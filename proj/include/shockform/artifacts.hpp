#pragma once

#include <string>
#include <vector>

#include "shockform/solver2d.hpp"

namespace shock {

/// Tables of one 2-D run as stored on disk. Reading back what was written
/// gives bit-identical values.
struct RunTables {
  std::vector<SeriesRow> series;
  std::vector<CharRecord> chars;
  std::vector<ResidualRow> residuals;
};

void write_series(const std::string& path, const std::vector<SeriesRow>& rows);
void write_chars(const std::string& path, const std::vector<CharRecord>& rows);
void write_residuals(const std::string& path, const std::vector<ResidualRow>& rows);

std::vector<SeriesRow> read_series(const std::string& path);
std::vector<CharRecord> read_chars(const std::string& path);
std::vector<ResidualRow> read_residuals(const std::string& path);

/// series.csv, chars.csv and residuals.csv in dir.
void write_tables(const std::string& dir, const RunTables& t);
RunTables read_tables(const std::string& dir);

/// Names of the residual identities in table order.
const std::vector<std::string>& residual_names();
/// Value of the named identity in a row.
double residual_value(const ResidualRow& r, const std::string& name);

}  // namespace shock

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pmm2::io {

/// A univariate series read from CSV, e.g. a FRED export with columns
/// `observation_date,DCOILWTICO`. Missing markers (empty cell or ".") are
/// dropped and counted.
struct CsvSeries {
    std::vector<std::string> dates;  // empty when the file has no date column
    std::vector<double> values;
    std::string value_column;
    std::size_t rows_read = 0;
    std::size_t gaps_dropped = 0;
};

struct CsvOptions {
    /// Header name of the value column; empty selects the last column.
    std::string column;
};

/// Throws DataError on malformed content (non-numeric, non-missing value,
/// unknown column, no data rows).
CsvSeries read_series(std::istream& in, const CsvOptions& opts = {});
/// Throws DataError when the file cannot be opened.
CsvSeries read_series_file(const std::string& path, const CsvOptions& opts = {});

/// Writes `t,value` rows (1-based t) with 10 significant digits.
void write_series(std::ostream& os, std::span<const double> values);

}  // namespace pmm2::io

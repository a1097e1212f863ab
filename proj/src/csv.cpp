#include "pmm2/csv.hpp"

#include "pmm2/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace pmm2::io {

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
            cell += c;
        } else if (c == ',' && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

bool is_missing(const std::string& s) { return s.empty() || s == "." || s == "NA" || s == "NaN"; }

bool looks_like_date(const std::string& s) {
    // YYYY-MM-DD prefix
    return s.size() >= 10 && std::isdigit(static_cast<unsigned char>(s[0])) && s[4] == '-' && s[7] == '-';
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

CsvSeries read_series(std::istream& in, const CsvOptions& opts) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        rows.push_back(split_row(line));
    }
    if (rows.empty()) throw DataError("csv: no rows");

    // A header is present when the candidate value cell of the first row is
    // neither numeric nor a missing marker.
    std::vector<std::string> header;
    const auto& first = rows.front();
    if (!parse_number(first.back()) && !is_missing(first.back())) {
        header = first;
        rows.erase(rows.begin());
    }
    const std::size_t width = header.empty() ? rows.empty() ? 0 : rows.front().size() : header.size();
    if (width == 0) throw DataError("csv: empty header");

    std::size_t value_col = width - 1;
    std::optional<std::size_t> date_col;
    if (!opts.column.empty()) {
        auto it = std::find(header.begin(), header.end(), opts.column);
        if (it == header.end()) throw DataError("csv: column '" + opts.column + "' not found");
        value_col = static_cast<std::size_t>(it - header.begin());
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string h = lower(header[c]);
        if (c != value_col && (h == "observation_date" || h == "date")) date_col = c;
    }
    if (!date_col && width >= 2 && value_col != 0 && !rows.empty() && looks_like_date(rows.front()[0])) {
        date_col = 0;
    }

    CsvSeries out;
    out.value_column = header.empty() ? std::string("column") + std::to_string(value_col + 1) : header[value_col];
    std::vector<std::string> dates;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        ++out.rows_read;
        const std::size_t line_no = r + 1 + (header.empty() ? 0 : 1);
        if (row.size() <= value_col) {
            throw DataError("csv: line " + std::to_string(line_no) + " has too few columns");
        }
        const std::string& cell = row[value_col];
        if (is_missing(cell)) {
            ++out.gaps_dropped;
            continue;
        }
        const auto v = parse_number(cell);
        if (!v || !std::isfinite(*v)) {
            throw DataError("csv: line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
        }
        out.values.push_back(*v);
        if (date_col) dates.push_back(row.size() > *date_col ? row[*date_col] : std::string());
    }
    if (out.values.empty()) throw DataError("csv: no valid observations");

    if (date_col && !std::is_sorted(dates.begin(), dates.end())) {
        std::vector<std::size_t> order(dates.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dates[a] < dates[b]; });
        std::vector<std::string> d2;
        std::vector<double> v2;
        for (std::size_t i : order) {
            d2.push_back(dates[i]);
            v2.push_back(out.values[i]);
        }
        dates = std::move(d2);
        out.values = std::move(v2);
    }
    out.dates = std::move(dates);
    return out;
}

CsvSeries read_series_file(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_series(in, opts);
}

void write_series(std::ostream& os, std::span<const double> values) {
    os << "t,value\n";
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.10g", values[i]);
        os << (i + 1) << ',' << buf << '\n';
    }
}

}  // namespace pmm2::io

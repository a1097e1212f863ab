#include "pmm2/csv.hpp"
#include "pmm2/errors.hpp"

#include <doctest.h>

#include <sstream>

using namespace pmm2;
using namespace pmm2::io;

TEST_CASE("FRED export with missing markers") {
    std::istringstream in(
        "observation_date,DCOILWTICO\n"
        "2020-01-02,61.17\n"
        "2020-01-03,.\n"
        "2020-01-06,63.27\n"
        "2020-01-07,\n"
        "2020-01-08,59.65\n");
    const auto s = read_series(in);
    CHECK(s.values == std::vector<double>{61.17, 63.27, 59.65});
    CHECK(s.dates == std::vector<std::string>{"2020-01-02", "2020-01-06", "2020-01-08"});
    CHECK(s.gaps_dropped == 2);
    CHECK(s.rows_read == 5);
    CHECK(s.value_column == "DCOILWTICO");
}

TEST_CASE("rows are ordered by date") {
    std::istringstream in("date,value\n2021-03-01,3\n2021-01-01,1\n2021-02-01,2\n");
    const auto s = read_series(in);
    CHECK(s.values == std::vector<double>{1, 2, 3});
    CHECK(s.dates.front() == "2021-01-01");
}

TEST_CASE("column selection and headerless input") {
    std::istringstream in("date,a,b\n2021-01-01,1,10\n2021-01-02,2,20\n");
    CsvOptions opts;
    opts.column = "a";
    CHECK(read_series(in, opts).values == std::vector<double>{1, 2});

    std::istringstream bare("1.5\n2.5\nNA\n3.5\n");
    const auto s = read_series(bare);
    CHECK(s.values == std::vector<double>{1.5, 2.5, 3.5});
    CHECK(s.gaps_dropped == 1);
    CHECK(s.dates.empty());
}

TEST_CASE("malformed input is a data error") {
    std::istringstream bad("date,value\n2021-01-01,abc\n");
    CHECK_THROWS_AS(read_series(bad), DataError);
    std::istringstream empty("date,value\n");
    CHECK_THROWS_AS(read_series(empty), DataError);
    std::istringstream in("date,value\n2021-01-01,1\n");
    CsvOptions opts;
    opts.column = "missing";
    CHECK_THROWS_AS(read_series(in, opts), DataError);
    CHECK_THROWS_AS(read_series_file("/nonexistent/file.csv"), DataError);
}

TEST_CASE("write then read round trip") {
    const std::vector<double> v{0.0, -1.25, 3.14159265358979, 1e-7};
    std::stringstream io;
    write_series(io, v);
    const auto s = read_series(io);
    REQUIRE(s.values.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(s.values[i] == doctest::Approx(v[i]).epsilon(1e-9));
    CHECK(s.value_column == "value");
}

#include "ngrid/csv.hpp"
#include "ngrid/errors.hpp"

#include <doctest.h>

using namespace ngrid;

TEST_CASE("csv parse skips comments and blank lines") {
    const auto t = csv::parse("# comment\na,b\n\n1, 2\n3,4\n");
    REQUIRE(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "2");
    CHECK(t.column("b") == 1);
    CHECK(t.find_column("c") == -1);
    CHECK_THROWS_AS(t.column("c"), ValidationError);
}

TEST_CASE("csv field count mismatch is a validation error") {
    CHECK_THROWS_AS(csv::parse("a,b\n1\n"), ValidationError);
}

TEST_CASE("csv number conversion reports location") {
    const auto t = csv::parse("x\nabc\n", "file.csv");
    try {
        (void)csv::to_double(t.rows[0][0], t, 0, "x");
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("file.csv:2") != std::string::npos);
    }
    CHECK_THROWS_AS(csv::to_int("1.5", t, 0, "x"), ValidationError);
    CHECK(csv::to_int("7", t, 0, "x") == 7);
}

TEST_CASE("csv fmt is fixed notation without negative zero") {
    CHECK(csv::fmt(1.5) == "1.500000");
    CHECK(csv::fmt(-0.0) == "0.000000");
    CHECK(csv::fmt(-1e-12, 3) == "0.000");
    CHECK(csv::fmt(2.0, 0) == "2");
}

TEST_CASE("csv read_file on a missing path is an I/O error") {
    CHECK_THROWS_AS(csv::read_file("/nonexistent/dir/file.csv"), IoError);
}

#include <sstream>

#include "doctest.h"

#include "diamond/csv.hpp"
#include "diamond/core.hpp"

using namespace diamond;

TEST_CASE("csv reader handles plain and quoted records") {
    std::istringstream in("a,b,c\n\"x,1\",\"he said \"\"hi\"\"\",\"line\nbreak\"\r\nlast,,\n");
    csv::Reader r(in);
    std::vector<std::string> f;
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"x,1", "he said \"hi\"", "line\nbreak"});
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"last", "", ""});
    CHECK_FALSE(r.next(f));
}

TEST_CASE("csv writer quotes only when needed and round-trips") {
    std::ostringstream out;
    csv::write_record(out, {"plain", "with,comma", "with\"quote", "nl\nhere"});
    CHECK(out.str() == "plain,\"with,comma\",\"with\"\"quote\",\"nl\nhere\"\n");

    std::istringstream in(out.str());
    csv::Reader r(in);
    std::vector<std::string> f;
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"plain", "with,comma", "with\"quote", "nl\nhere"});
}

TEST_CASE("unterminated quote raises an ingest error") {
    std::istringstream in("\"oops\n");
    csv::Reader r(in);
    std::vector<std::string> f;
    CHECK_THROWS_AS(r.next(f), IngestError);
}

TEST_CASE("doubles format shortest and parse back") {
    CHECK(csv::format_double(3.4) == "3.4");
    CHECK(csv::format_double(1.0) == "1");
    CHECK(csv::format_double(0.1) == "0.1");
    CHECK(csv::parse_double(" 2.5\t", 1, "m") == 2.5);
    CHECK_THROWS_AS(csv::parse_double("2.5x", 7, "m"), IngestError);
    CHECK_THROWS_AS(csv::parse_double("", 7, "m"), IngestError);
}

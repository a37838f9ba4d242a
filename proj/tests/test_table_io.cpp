#include "psdist/table_io.hpp"

#include "doctest.h"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

using namespace psdist;

TEST_CASE("floating-point cells print shortest round-trip digits") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(-2.5) == "-2.5");
    CHECK(io::format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(io::format_double(0.5849625007211562) == "0.584962500721");
    CHECK(io::format_double(1e-300) == "1e-300");
    CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()).empty());
}

TEST_CASE("csv has a header, fixed order, and newline endings") {
    io::Table t;
    t.columns = {"a", "b", "c"};
    t.rows.push_back({1.5, static_cast<long long>(7), std::string("x")});
    t.rows.push_back({std::monostate{}, 0.25, std::string("y,z")});
    const std::string csv = io::to_csv(t);
    CHECK(csv ==
          "a,b,c\n"
          "1.5,7,x\n"
          ",0.25,\"y,z\"\n");
}

TEST_CASE("csv quoting escapes embedded quotes") {
    io::Table t;
    t.columns = {"v"};
    t.rows.push_back({std::string("say \"hi\"")});
    CHECK(io::to_csv(t) == "v\n\"say \"\"hi\"\"\"\n");
}

TEST_CASE("csv rejects ragged rows") {
    io::Table t;
    t.columns = {"a", "b"};
    t.rows.push_back({1.0});
    CHECK_THROWS_AS((void)io::to_csv(t), std::invalid_argument);
}

TEST_CASE("json carries ordered meta plus typed rows") {
    io::Table t;
    t.columns = {"x", "label"};
    t.rows.push_back({2.5, std::string("p")});
    t.rows.push_back({std::monostate{}, std::string("q")});
    const std::string text = io::to_json(
        t, {{"command", std::string("demo")}, {"n", static_cast<long long>(2)}});
    CHECK(text.back() == '\n');

    const auto j = nlohmann::json::parse(text);
    CHECK(j["meta"]["command"] == "demo");
    CHECK(j["meta"]["n"] == 2);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["x"] == 2.5);
    CHECK(j["rows"][0]["label"] == "p");
    CHECK(j["rows"][1]["x"].is_null());
    // meta keys keep insertion order
    CHECK(text.find("\"command\"") < text.find("\"n\""));
}

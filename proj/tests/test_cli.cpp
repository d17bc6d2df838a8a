#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reflectionless/cli.hpp"
#include "reflectionless/errors.hpp"

using namespace refl;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "cli_test_" + name + ".json";
    std::ofstream(path) << text;
    return path;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config parsing") {
    CHECK(parse_config(R"({"k":[1],"c":[2]})").size() == 1);
    CHECK_THROWS_WITH_AS(parse_config(R"({"k":[2,1],"c":[1,1]})"), "k not strictly ascending", ValidationError);
    const SolitonConfig t = parse_config(R"({"k":[1,2],"c":[6,12],"times":{"3":0.1}})");
    CHECK(t.times.at(3) == 0.1);
    CHECK(t.c[0] == 6.0);
    CHECK_THROWS_AS(parse_config(R"({"k":[1]})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"k":[1],"c":["a"]})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"k":[1],"c":[1],"x":1})"), ValidationError);
    CHECK_THROWS_AS(parse_config("not json"), ValidationError);
    CHECK(parse_config(config_to_json(t)).times == t.times);
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-6.0) == "-6");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("argument parsing") {
    const RunConfig rc = parse_args({"potential", "c.json", "--grid", "-8", "8", "2001", "--order", "2"});
    CHECK(rc.command == "potential");
    REQUIRE(rc.grid.has_value());
    CHECK(rc.grid->xmin == -8.0);
    CHECK(rc.grid->points == 2001);
    CHECK(rc.order == 2);
    const RunConfig t = parse_args({"transform", "c.json", "--scheme", "am-add", "--e", "1=3", "--e", "2=0.5",
                                    "--delete", "1,3"});
    CHECK(t.e.at(1) == 3.0);
    CHECK(t.e.at(2) == 0.5);
    CHECK(t.deleted == std::vector<int>{1, 3});
    CHECK_THROWS_AS(parse_args({"bogus"}), UsageError);
    CHECK_THROWS_AS(parse_args({"potential", "c.json", "--grid", "8", "-8", "10"}), UsageError);
    CHECK_THROWS_AS(parse_args({"potential", "c.json", "--grid", "0", "1", "1"}), UsageError);
    CHECK_THROWS_AS(parse_args({"transform", "c.json", "--e", "oops"}), UsageError);
}

TEST_CASE("commands and exit codes") {
    const std::string two = write_temp("two", R"({"k":[1,2],"c":[6,12]})");
    const std::string bad = write_temp("bad", R"({"k":[2,1],"c":[1,1]})");

    const Run pot = invoke({"potential", two, "--grid", "-8", "8", "2001"});
    CHECK(pot.code == 0);
    std::istringstream lines(pot.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,U");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 2001);
    CHECK(pot.out.find('\r') == std::string::npos);
    CHECK(invoke({"potential", two, "--grid", "-8", "8", "2001"}).out == pot.out);

    const Run ka = invoke({"transform", two, "--scheme", "krein-adler", "--delete", "1"});
    CHECK(ka.code == 2);
    CHECK(ka.err.find("Krein-Adler") != std::string::npos);

    const Run ground = invoke({"transform", two, "--scheme", "darboux-ground"});
    CHECK(ground.code == 0);
    const auto g = nlohmann::json::parse(ground.out);
    CHECK(g["k"] == nlohmann::json::array({1.0}));
    CHECK(g["c"][0].get<double>() == doctest::Approx(2.0));

    CHECK(invoke({"potential", bad}).code == 2);
    CHECK(invoke({"potential", "missing_file.json"}).code == 2);

    const Run ver = invoke({"verify", two, "--all"});
    CHECK(ver.code == 0);
    const auto v = nlohmann::json::parse(ver.out);
    CHECK(v["pass"] == true);
    for (const auto& r : v["reports"]) {
        CHECK(r.contains("equation"));
        CHECK(r.contains("tolerance"));
        CHECK(r.contains("max_abs_deviation"));
    }
    CHECK(invoke({"verify", two, "--all", "--tol", "1e-30"}).code == 1);

    const Run evo = invoke({"evolve", two, "--grid", "-5", "5", "11", "--tgrid", "0", "0.2", "3"});
    CHECK(evo.code == 0);
    CHECK(evo.out.rfind("# t=0\nx,U\n", 0) == 0);
    CHECK(evo.out.find("# t=0.2\n") != std::string::npos);

    CHECK(invoke({"spectrum", two}).code == 0);
    CHECK(invoke({"scatter", two, "--k", "0.5", "--k", "1.7"}).code == 0);
    CHECK(invoke({"hirota-check", two}).code == 0);
    CHECK(invoke({"phase-shift", two, "--T", "3"}).code == 0);
    CHECK(invoke({"phase-shift", two, "--T", "0.1"}).code == 3);
    CHECK(invoke({"eigen", two, "--order", "2", "--grid", "-1", "1", "3"}).code == 0);

    std::remove(two.c_str());
    std::remove(bad.c_str());
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <ringpol/io.hpp>

#include "reference_points.hpp"

using namespace ringpol;

namespace {

std::vector<double> csv_numbers(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) out.push_back(std::strtod(cell.c_str(), nullptr));
    }
    return out;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content = "")
        : path("io_test_" + name) {
        if (!content.empty()) {
            std::ofstream f(path);
            f << content;
        }
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("number formatting round-trips exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, kPi, reference::kSymmetricKa,
                     reference::kFamilyRoots[1].ka, 5e-324, 1.7976931348623157e308, -2.5e-7}) {
        const std::string s = io::fmt17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(io::fmt17(0.0) == "0");
    CHECK(io::fmt17(-0.0) == "0");
    CHECK(io::fmt17(1.0) == "1");
}

TEST_CASE("csv escaping quotes the delicate fields") {
    io::Table t;
    t.metadata.emplace_back("note", "plain");
    t.columns = {"x", "a,b", "quo\"te"};
    t.rows.push_back({io::Cell(1.5), io::Cell(std::string("v,w")), io::Cell::none()});
    std::ostringstream os;
    io::write_csv(os, t);
    CHECK(os.str() ==
          "# note = plain\n"
          "x,\"a,b\",\"quo\"\"te\"\n"
          "1.5,\"v,w\",\n");
}

TEST_CASE("csv and json emissions carry identical numbers") {
    io::Table t;
    t.metadata.emplace_back("tool", "ringpol");
    t.columns = {"a", "b", "c"};
    t.rows.push_back({io::Cell(0.1), io::Cell(-0.0), io::Cell(reference::kSymmetricSo)});
    t.rows.push_back({io::Cell(1e-300), io::Cell(-7.25), io::Cell(2.0 * kPi)});

    std::ostringstream csv_os, json_os;
    io::write_csv(csv_os, t);
    io::write_json(json_os, t);

    const auto from_csv = csv_numbers(csv_os.str());
    const auto doc = nlohmann::json::parse(json_os.str());
    REQUIRE(doc["columns"].size() == 3);
    std::vector<double> from_json;
    for (const auto& row : doc["rows"])
        for (const auto& cell : row) from_json.push_back(cell.get<double>());

    REQUIRE(from_csv.size() == from_json.size());
    for (std::size_t i = 0; i < from_csv.size(); ++i) CHECK(from_csv[i] == from_json[i]);
}

TEST_CASE("empty cells become empty csv fields and json nulls") {
    io::Table t;
    t.columns = {"a", "b"};
    t.rows.push_back({io::Cell::none(), io::Cell(2.0)});
    std::ostringstream csv_os, json_os;
    io::write_csv(csv_os, t);
    io::write_json(json_os, t);
    CHECK(csv_os.str() == "a,b\n,2\n");
    const auto doc = nlohmann::json::parse(json_os.str());
    CHECK(doc["rows"][0][0].is_null());
    CHECK(doc["rows"][0][1].get<double>() == 2.0);
}

TEST_CASE("write_table reports unwritable destinations") {
    io::Table t;
    t.columns = {"a"};
    CHECK_THROWS_AS(io::write_table("no_such_dir/out.csv", io::Format::csv, t), io::io_error);
}

TEST_CASE("format names parse") {
    CHECK(io::format_from_string("csv") == io::Format::csv);
    CHECK(io::format_from_string("json") == io::Format::json);
    CHECK_THROWS_AS(io::format_from_string("yaml"), std::invalid_argument);
}

TEST_CASE("minimal configuration parses with defaults") {
    const auto cfg = io::parse_config(nlohmann::json::parse(R"({
        "params": {"so_ratio": 3.05, "ka": 1.38}
    })"));
    REQUIRE(cfg.params.has_value());
    CHECK(cfg.params->so_ratio == 3.05);
    CHECK(cfg.params->ka == 1.38);
    CHECK_FALSE(cfg.geometry.has_value());
    CHECK_FALSE(cfg.sweep.has_value());
    CHECK(cfg.texture_samples == 721);
    CHECK(cfg.output.path.empty());
    CHECK(cfg.output.format == io::Format::csv);
}

TEST_CASE("full configuration parses") {
    const auto cfg = io::parse_config(nlohmann::json::parse(R"({
        "geometry": {"gamma1": 1.0, "gamma2": 4.1887902047863905},
        "params": {"so_ratio": 2.27, "ka": 10.0},
        "sweep": {
            "variable": "ka",
            "range": [9.2, 13.0],
            "samples": 2000,
            "case": "b",
            "geometry_rule": {"type": "family", "anchor": "gamma2", "index": 6, "sign": -1}
        },
        "input_mode": {"pure": {"up": [0.6, 0.0], "down": [0.0, 0.8]}},
        "texture_samples": 360,
        "output": {"path": "out.csv", "format": "csv", "points_path": "points.csv"}
    })"));
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->variable == search::SweepVariable::ka);
    CHECK(cfg.sweep->lo == 9.2);
    CHECK(cfg.sweep->hi == 13.0);
    CHECK(cfg.sweep->samples == 2000);
    CHECK(cfg.sweep->case_tag == polar::PolarizationCase::b);
    CHECK(cfg.sweep->rule.use_family);
    CHECK(cfg.sweep->rule.family.anchor == polar::FamilyAnchor::fixed_gamma2);
    CHECK(cfg.sweep->rule.family.index == 6);
    CHECK(cfg.sweep->rule.family.sign == -1);
    REQUIRE(cfg.input_mode.has_value());
    CHECK(cfg.input_mode->kind == polar::InputKind::pure_state);
    CHECK(cfg.input_mode->state.up == cplx{0.6, 0.0});
    CHECK(cfg.input_mode->state.down == cplx{0.0, 0.8});
    CHECK(cfg.texture_samples == 360);
    CHECK(cfg.output.points_path == "points.csv");
}

TEST_CASE("unknown keys are rejected at every level") {
    const auto bad = [](const char* text) {
        CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(text)), std::invalid_argument);
    };
    bad(R"({"geom": {}})");
    bad(R"({"geometry": {"gamma1": 1.0, "gamma2": 2.0, "gamma3": 3.0}})");
    bad(R"({"params": {"so_ratio": 1.0, "ka": 1.0, "kb": 2.0}})");
    bad(R"({"sweep": {"variable": "ka", "range": [1, 2], "step": 0.1}})");
    bad(R"({"sweep": {"variable": "ka", "range": [1, 2],
            "geometry_rule": {"type": "family", "offset": 3}}})");
    bad(R"({"output": {"path": "x", "append": true}})");
    bad(R"({"input_mode": {"pure": {"up": [1, 0], "left": [0, 1]}}})");
}

TEST_CASE("malformed configuration values are rejected") {
    const auto bad = [](const char* text) {
        CHECK_THROWS_AS(io::parse_config(nlohmann::json::parse(text)), std::invalid_argument);
    };
    bad(R"([1, 2, 3])");
    bad(R"({"geometry": {"gamma1": 1.0}})");
    bad(R"({"params": {"so_ratio": "big", "ka": 1.0}})");
    bad(R"({"sweep": {"variable": "ka"}})");
    bad(R"({"sweep": {"variable": "phi", "range": [1, 2]}})");
    bad(R"({"sweep": {"variable": "ka", "range": [1, 2, 3]}})");
    bad(R"({"sweep": {"variable": "ka", "range": [1, 2], "samples": 5.5}})");
    bad(R"({"sweep": {"variable": "ka", "range": [1, 2], "case": "c"}})");
    bad(R"({"sweep": {"variable": "ka", "range": [1, 2],
            "geometry_rule": {"type": "circle"}}})");
    bad(R"({"input_mode": "mixed"})");
    bad(R"({"input_mode": {"pure": {"up": [1]}}})");
    bad(R"({"texture_samples": 1})");
    bad(R"({"texture_samples": 2.5})");
    bad(R"({"output": {"format": "yaml"}})");
}

TEST_CASE("configurations round-trip through their json form") {
    const auto cfg = io::parse_config(nlohmann::json::parse(R"({
        "geometry": {"gamma1": 2.0943951023931953, "gamma2": 4.1887902047863905},
        "params": {"so_ratio": 3.05, "ka": 1.38},
        "sweep": {"variable": "so_ratio", "range": [2.9, 3.2], "samples": 500, "case": "a"},
        "input_mode": "eigen_mixture",
        "output": {"path": "t.json", "format": "json"}
    })"));
    const auto j1 = io::config_to_json(cfg);
    const auto cfg2 = io::parse_config(j1);
    const auto j2 = io::config_to_json(cfg2);
    CHECK(j1.dump() == j2.dump());
}

TEST_CASE("config files load with clear failure modes") {
    CHECK_THROWS_AS(io::load_config("definitely_missing.json"), io::io_error);
    TempFile broken("broken.json", "{ not json");
    CHECK_THROWS_AS(io::load_config(broken.path), std::invalid_argument);
    TempFile good("good.json", R"({"params": {"so_ratio": 1.0, "ka": 2.0}})");
    const auto cfg = io::load_config(good.path);
    REQUIRE(cfg.params.has_value());
    CHECK(cfg.params->ka == 2.0);
}

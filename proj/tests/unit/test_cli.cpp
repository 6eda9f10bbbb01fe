#include "catch_amalgamated.hpp"

#include "torus_atlas/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using torus_atlas::cli::run;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run call(std::vector<std::string> args) {
    std::ostringstream o, e;
    int c = run(args, o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("torus_atlas_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("usage and exit codes", "[cli]") {
    Run r = call({"frobnicate"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(call({}).code == 1);
    Run h = call({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("monodromy") != std::string::npos);
    CHECK(call({"monodromy", "--jobs", "0"}).code == 1);
}

TEST_CASE("default monodromy loop", "[cli]") {
    fs::path d = scratch("monodromy");
    Run r = call({"monodromy", "--out", d.string(), "--quiet"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(slurp(d / "monodromy" / "monodromy.json"));
    CHECK(j["matrix"] == nlohmann::json::parse("[[1,1],[0,1]]"));
    auto m = nlohmann::json::parse(slurp(d / "monodromy" / "manifest.json"));
    CHECK(m["command"] == "monodromy");
    CHECK(m["config_sha256"].get<std::string>().size() == 64);
    CHECK(m["files"][0]["name"] == "monodromy.json");
}

TEST_CASE("freqmap on a 2x2 grid", "[cli]") {
    fs::path d = scratch("freqmap");
    fs::path cfg = write_config(
        d, R"({"schema_version": 1, "freqmap": {"n": 2, "m": 2, "window": {"I": [0.2, 0.4], "E": [0.3, 0.6]}}})");
    REQUIRE(call({"freqmap", "--config", cfg.string(), "--out", d.string(), "--quiet"}).code == 0);
    std::istringstream csv(slurp(d / "freqmap" / "freqmap.csv"));
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(csv, line)) lines.push_back(line);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "I,E,J,T,Theta,omega1,omega2,detJac");
    // 17 significant digits
    CHECK(lines[1].rfind("0.20000000000000001,", 0) == 0);
}

TEST_CASE("config validation", "[cli]") {
    fs::path d = scratch("config");
    auto code = [&](const std::string& text) {
        return call({"monodromy", "--config", write_config(d, text).string(), "--out", d.string(), "--quiet"}).code;
    };
    CHECK(code(R"({"schema_version": 1})") == 0);
    CHECK(code(R"({"monodromy": {}})") == 1);
    CHECK(code(R"({"schema_version": 2})") == 1);
    CHECK(code(R"({"schema_version": 1, "monodromy": {"loop": {"radius": 0.3, "colour": 1}}})") == 1);
    CHECK(code(R"({"schema_version": 1, "plot": {}})") == 1);
    CHECK(code(R"({"schema_version": 1, "monodromy": {"loop": {"radius": "big"}}})") == 1);
    CHECK(code("{not json") == 1);
    // a loop through the focus-focus value
    CHECK(code(R"({"schema_version": 1, "monodromy": {"loop": {"points": [[0.3,1],[0,1],[0.3,1.2],[0.3,1]]}}})") == 1);
}

TEST_CASE("numerical failures exit with 2", "[cli]") {
    fs::path d = scratch("numerical");
    fs::path cfg = write_config(d, R"({"schema_version": 1, "solve-tori": {
        "n": 4, "m": 4, "hamiltonian": {"epsilon": 0.5}, "validate": {"samples": 0},
        "charts": [{"I": [0.2, 0.3], "E": [0.4, 0.6]}]}})");
    Run r = call({"solve-tori", "--config", cfg.string(), "--out", d.string(), "--quiet"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("reruns are byte-identical and seed flag overrides", "[cli]") {
    fs::path a = scratch("det_a"), b = scratch("det_b");
    fs::path cfg = write_config(a, R"({"schema_version": 1, "diophantine": {"n": 5, "m": 5, "samples": 1000,
        "gamma_sweep": [0.01], "seed": 3}})");
    REQUIRE(call({"diophantine", "--config", cfg.string(), "--out", a.string(), "--quiet", "--jobs", "1"}).code == 0);
    REQUIRE(call({"diophantine", "--config", cfg.string(), "--out", b.string(), "--quiet", "--jobs", "3"}).code == 0);
    for (auto f : {"diophantine_grid.csv", "diophantine_samples.csv", "diophantine.json", "manifest.json"})
        CHECK(slurp(a / "diophantine" / f) == slurp(b / "diophantine" / f));
    REQUIRE(call({"diophantine", "--config", cfg.string(), "--out", b.string(), "--quiet", "--seed", "4"}).code == 0);
    CHECK(slurp(a / "diophantine" / "diophantine_samples.csv") != slurp(b / "diophantine" / "diophantine_samples.csv"));
    auto m = nlohmann::json::parse(slurp(b / "diophantine" / "manifest.json"));
    CHECK(m["seed"] == 4);
}

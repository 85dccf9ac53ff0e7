#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "moire/commands.hpp"
#include "moire/output.hpp"

using namespace moire;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / "moire_cli_test";
    fs::create_directories(d);
    return d;
}

int shell(const std::string& args) {
    const std::string cmd = std::string(MOIRE_BANDS_EXE) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(R"({"alpha":1,"beta":1,"U":0,"phi":4.18879,"h":0.05})");
    CHECK(c.params.phi == 4.18879);
    CHECK_FALSE(c.gcut.has_value());
    CHECK(c.bands.nbands == 6);

    CHECK_THROWS_WITH_AS(parse_config(R"({"h":-1})"), "h must be positive", ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"h":0.1,"gamma":2})"), doctest::Contains("gamma"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"h":0.1,"bands":{"nbandz":2}})"), doctest::Contains("bands.nbandz"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"h":0.1,"chern":{"nbands":"two"}})"), doctest::Contains("chern.nbands"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"beta":1})"), doctest::Contains("'h'"), ValidationError);
    CHECK_THROWS_AS(parse_config("{not json"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"h":0.1,"bands":{"path":["G","Z"]}})"), ValidationError);
}

TEST_CASE("canonical serialisation round-trips") {
    const std::vector<std::string> corpus{
        R"({"h":0.05})",
        R"({"alpha":1,"beta":1,"U":0,"phi":4.1887902047863905,"h":0.05,"gcut":7})",
        R"({"h":0.1,"U":0.3,"bands":{"path":["K","G","M"],"n_per_segment":5,"nbands":3}})",
        R"({"h":0.08,"chern":{"nbands":1,"grid":[12,14]},"agmon":{"E":-5.5,"dump_rho":true}})",
        R"({"h":0.1,"scan":{"h_list":[0.2,0.1,0.05,0.04],"grid":8},"harmonic":{"mode":"papermode"}})",
        R"({"h":0.1,"well":{"L":2.0,"n":128},"wells":{"mode":"papermode"},"fourier-check":{"seed":7}})",
    };
    for (const auto& text : corpus) {
        const std::string once = serialize_config(parse_config(text));
        CHECK(serialize_config(parse_config(once)) == once);
    }
    for (const auto& name : preset_names()) {
        const std::string s = serialize_config(preset(name));
        CHECK(serialize_config(parse_config(s)) == s);
    }
    CHECK_THROWS_AS(preset("fig9"), ValidationError);
    CHECK(preset("fig4-b").params.h == 1.0 / 9.0);
    CHECK(preset("fig1-b").params.beta == 5.0);
}

TEST_CASE("JSON writer prints 17 significant digits") {
    nlohmann::ordered_json j;
    j["x"] = 0.1;
    j["n"] = 3;
    j["v"] = {1.0 / 3.0, 2.0};
    const std::string s = dump_json(j, 0);
    CHECK(s == R"({"x":0.10000000000000001,"n":3,"v":[0.33333333333333331,2]})");
    CHECK(fmt17(std::numbers::pi) == "3.1415926535897931");
}

TEST_CASE("commands write artifacts and map errors to exit codes") {
    const fs::path dir = scratch();
    std::ostringstream diag;
    RunConfig cfg = preset("p0");
    cfg.gcut = 4.0;

    CommandOptions opt;
    opt.out = (dir / "wells.json").string();
    CHECK(run("wells", cfg, opt, diag) == 0);
    const auto wells = nlohmann::json::parse(slurp(opt.out));
    CHECK(wells["assumption1_holds"] == true);
    CHECK(wells["provenance"]["version"] == "0.1.0");

    cfg.bands.n_per_segment = 4;
    cfg.bands.nbands = 3;
    opt.out = (dir / "bands.csv").string();
    CHECK(run("bands", cfg, opt, diag) == 0);
    std::istringstream lines(slurp(opt.out));
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# provenance: ", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "arclength,k1,k2,E1,E2,E3");
    double last = -1;
    int rows = 0;
    while (std::getline(lines, line)) {
        const double s = std::stod(line.substr(0, line.find(',')));
        CHECK(s >= last);
        last = s;
        ++rows;
    }
    CHECK(rows == 13);

    opt.out = (dir / "fourier.json").string();
    CHECK(run("fourier-check", cfg, opt, diag) == 0);
    CHECK(nlohmann::json::parse(slurp(opt.out))["pass"] == true);

    RunConfig bad = cfg;
    bad.params.phi = 1.0;
    opt.out = (dir / "agmon.json").string();
    CHECK(run("agmon", bad, opt, diag) == 2);
    CHECK(run("bogus", cfg, opt, diag) == 2);

    ModelParams free;
    free.alpha = free.beta = free.U = 0;
    RunConfig closing = cfg;
    closing.params = free;
    closing.chern.nbands = 1;
    closing.chern.grid = {4, 4};
    opt.out = (dir / "chern.json").string();
    CHECK(run("chern", closing, opt, diag) == 3);
}

TEST_CASE("executable: flags, presets and exit codes") {
    const fs::path dir = scratch();
    CHECK(shell("") == 2);
    CHECK(shell("wells --preset nope") == 2);
    CHECK(shell("wells --preset p0 --out " + (dir / "w.json").string()) == 0);
    {
        std::ofstream f(dir / "bad.json");
        f << R"({"h":-1})";
    }
    CHECK(shell("wells --config " + (dir / "bad.json").string()) == 2);
    CHECK(shell("wells --config " + (dir / "missing.json").string()) == 2);
    {
        std::ofstream f(dir / "land.json");
        f << R"({"h":0.05,"phi":4.1887902047863905,"landscape":{"n":8}})";
    }
    const fs::path a = dir / "land_a.csv", b = dir / "land_b.csv";
    CHECK(shell("landscape --config " + (dir / "land.json").string() + " --out " + a.string()) == 0);
    CHECK(shell("landscape --config " + (dir / "land.json").string() + " --workers 3 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find("x1,x2,lambda_minus,lambda_plus") != std::string::npos);
}

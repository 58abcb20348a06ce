/*
   Copyright 2026 The critchain Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "critchain");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = critchain::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("critchain-cli-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("analyze the reference chain")
{
    auto dir = scratch("analyze");
    auto r = cli({"analyze", "reference-chain", "--out", dir.string(), "--echo-spec"});
    CHECK(r.code == 0);
    std::string report = slurp(dir / "report.json");
    CHECK(report == r.out);
    CHECK(report.find("\"k_eff\": 1.0") != std::string::npos);
    CHECK(report.find("\"k\": 0.16172") != std::string::npos);

    // the echoed spec re-ingests to the identical normalized spec
    auto again = scratch("analyze-again");
    auto r2 = cli({"analyze", (dir / "spec.json").string(), "--out", again.string(), "--echo-spec"});
    CHECK(r2.code == 0);
    CHECK(slurp(again / "spec.json") == slurp(dir / "spec.json"));
    CHECK(slurp(again / "report.json") == report);
}

TEST_CASE("profile endpoints")
{
    auto dir = scratch("profile");
    REQUIRE(cli({"profile", "reference-chain", "--steps", "2", "--out", dir.string()}).code == 0);
    std::string csv = slurp(dir / "profile.csv");
    CHECK(csv == "H,lethargy,p,step_loss_share\n"
                 "100,0,1,0\n"
                 "1,4.605170185988092,0.26953454087916173,0.7304654591208383\n");
}

TEST_CASE("validation failures exit with 2")
{
    auto dir = scratch("bad");
    {
        std::ofstream f(dir / "bad.json");
        f << "{\n  \"spec_version\": 1,\n  \"mystery\": 3\n}\n";
    }
    auto r = cli({"analyze", (dir / "bad.json").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("/mystery (line 3)") != std::string::npos);

    CHECK(cli({"analyze", "no-such-chain"}).code == 2);
    CHECK(cli({"profile", "reference-chain", "--steps", "1"}).code == 2);
    CHECK(cli({"sample", "reference-chain", "--mile", "middle"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
}

TEST_CASE("numeric failures exit with 3")
{
    auto dir = scratch("numeric");
    {
        std::ofstream f(dir / "stall.json");
        std::string text = R"({"spec_version": 1, "H_max": 100, "H_c": 1, "item_inertia": 1,
          "market_temperature": 0.1, "total_flow": 10,
          "entry": {"interactors": [{"name": "r", "role": "receptor", "factors": {"entry": {"sigma": {"form": "constant", "c": 1}}}}]},
          "forwarding": {"interactors": [{"name": "m", "role": "mediator", "capacity": 1e9,
                        "factors": {"forwarding": {"sigma": {"form": "constant", "c": 1}}}}]},
          "lastmile": {"interactors": [{"name": "c", "role": "courier", "factors": {"delivery": {"sigma": {"form": "constant", "c": 1}}}}]},
          "diffusion": {"segments": [{"D": 1, "sigma_d": 1}], "phi0": 1, "x_max": 6}})";
        f << text;
    }
    auto r = cli({"montecarlo", (dir / "stall.json").string(), "--n", "2", "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("step cap") != std::string::npos);
}

TEST_CASE("seeded outputs are byte stable")
{
    auto a = scratch("seed-a"), b = scratch("seed-b");
    REQUIRE(cli({"montecarlo", "reference-chain", "--n", "20000", "--seed", "5", "--workers", "1", "--out", a.string()}).code == 0);
    REQUIRE(cli({"montecarlo", "reference-chain", "--n", "20000", "--seed", "5", "--workers", "3", "--out", b.string()}).code == 0);
    CHECK(slurp(a / "mc.json") == slurp(b / "mc.json"));
    CHECK(slurp(a / "q_histogram.csv") == slurp(b / "q_histogram.csv"));

    REQUIRE(cli({"optimize", "reference-chain", "--seed", "9", "--out", a.string()}).code == 0);
    REQUIRE(cli({"optimize", "reference-chain", "--seed", "9", "--out", b.string()}).code == 0);
    CHECK(slurp(a / "optimum.json") == slurp(b / "optimum.json"));

    for (const char* mile : {"first", "last"}) {
        REQUIRE(cli({"sample", "reference-chain", "--mile", mile, "--out", a.string()}).code == 0);
        REQUIRE(cli({"sample", "reference-chain", "--mile", mile, "--out", b.string()}).code == 0);
        CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
    }
    REQUIRE(cli({"diffuse", "reference-chain", "--out", a.string()}).code == 0);
    REQUIRE(cli({"diffuse", "reference-chain", "--method", "numeric", "--out", b.string()}).code == 0);
    CHECK(slurp(a / "flux.csv") == slurp(b / "flux.csv"));
}

TEST_CASE("seed falls back to CHAIN_SEED")
{
    auto a = scratch("env-a"), b = scratch("env-b");
    ::setenv("CHAIN_SEED", "12", 1);
    REQUIRE(cli({"montecarlo", "reference-chain", "--n", "5000", "--out", a.string()}).code == 0);
    ::unsetenv("CHAIN_SEED");
    REQUIRE(cli({"montecarlo", "reference-chain", "--n", "5000", "--seed", "12", "--out", b.string()}).code == 0);
    CHECK(slurp(a / "mc.json") == slurp(b / "mc.json"));
    CHECK(slurp(a / "mc.json").find("\"seed\": 12") != std::string::npos);

    ::setenv("CHAIN_SEED", "twelve", 1);
    CHECK(cli({"montecarlo", "reference-chain", "--n", "10", "--out", a.string()}).code == 2);
    ::unsetenv("CHAIN_SEED");
}

TEST_CASE("option overrides")
{
    auto dir = scratch("override");
    REQUIRE(cli({"analyze", "reference-chain", "--feasibility-multiple", "5", "--lastmile-mode", "pointwise-mean",
                 "--out", dir.string()})
                .code == 0);
    std::string report = slurp(dir / "report.json");
    CHECK(report.find("\"feasibility_radius\": 10.0") != std::string::npos);
    CHECK(report.find("\"lastmile_escape_mode\": \"pointwise-mean\"") != std::string::npos);

    REQUIRE(cli({"analyze", "reference-chain", "--feasibility-multiple", "9", "--out", dir.string()}).code == 0);
    report = slurp(dir / "report.json");
    CHECK(report.find("clamped") != std::string::npos);
}

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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "critchain/critchain.h"

namespace critchain::cli {

namespace {

namespace fs = std::filesystem;

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_numeric = 3;

struct Failure {
    int code;
    std::string message;
};

struct ChainDeleter {
    void operator()(cc_chain* c) const { cc_chain_free(c); }
};
using ChainPtr = std::unique_ptr<cc_chain, ChainDeleter>;

void check(cc_status st)
{
    if (st != CC_OK)
        throw Failure{cc_status_is_numeric(st) ? exit_numeric : exit_validation, cc_last_error()};
}

std::string take(char* text)
{
    std::string s(text);
    cc_string_free(text);
    return s;
}

struct RunConfig {
    std::string subcommand;
    std::string input;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::uint64_t n_items = 100'000;
    std::size_t n_steps = 50;
    std::size_t workers = 1;
    std::optional<std::string> lastmile_mode;
    std::optional<double> feasibility_multiple;
    bool echo_spec = false;
    std::string diffuse_method = "numeric";
    std::string mile = "last";
    std::size_t points = 201;
    std::string objective = "k";
    std::string opt_method = "anneal";
    std::uint64_t iterations = 10'000;
};

ChainPtr load_chain(const RunConfig& cfg)
{
    cc_chain* raw = nullptr;
    std::error_code ec;
    if (fs::is_regular_file(cfg.input, ec)) {
        std::ifstream in(cfg.input, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        if (!in && !in.eof())
            throw Failure{exit_validation, "cannot read " + cfg.input};
        std::string text = ss.str();
        check(cc_chain_from_json(text.data(), text.size(), &raw));
    } else {
        cc_status st = cc_chain_builtin(cfg.input.c_str(), &raw);
        if (st == CC_IO)
            throw Failure{exit_validation,
                          "'" + cfg.input + "' is neither a readable file nor a built-in chain"};
        check(st);
    }
    ChainPtr chain(raw);
    if (cfg.lastmile_mode)
        check(cc_chain_set_lastmile_mode(chain.get(), cfg.lastmile_mode->c_str()));
    if (cfg.feasibility_multiple)
        check(cc_chain_set_feasibility_multiple(chain.get(), *cfg.feasibility_multiple));
    return chain;
}

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content)
{
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    fs::path path = fs::path(cfg.out_dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f)
        throw Failure{exit_validation, "cannot write " + path.string()};
}

std::uint64_t resolve_seed(const RunConfig& cfg)
{
    if (cfg.seed)
        return *cfg.seed;
    if (const char* env = std::getenv("CHAIN_SEED")) {
        std::string s = env;
        std::size_t used = 0;
        try {
            std::uint64_t v = std::stoull(s, &used, 10);
            if (used == s.size() && !s.empty() && s[0] != '-')
                return v;
        } catch (const std::exception&) {
        }
        throw Failure{exit_validation, "CHAIN_SEED must be a non-negative integer, got '" + s + "'"};
    }
    return 0;
}

void execute(const RunConfig& cfg, std::ostream& out)
{
    ChainPtr chain = load_chain(cfg);
    char* text = nullptr;
    if (cfg.subcommand == "analyze") {
        check(cc_report_json(chain.get(), &text));
        std::string report = take(text);
        write_file(cfg, "report.json", report);
        out << report;
        if (cfg.echo_spec) {
            check(cc_chain_to_json(chain.get(), &text));
            std::string spec = take(text);
            write_file(cfg, "spec.json", spec);
        }
    } else if (cfg.subcommand == "profile") {
        check(cc_profile_csv(chain.get(), cfg.n_steps, &text));
        write_file(cfg, "profile.csv", take(text));
    } else if (cfg.subcommand == "diffuse") {
        auto method = cfg.diffuse_method == "analytic" ? CC_FLUX_ANALYTIC : CC_FLUX_NUMERIC;
        check(cc_flux_csv(chain.get(), method, &text));
        write_file(cfg, "flux.csv", take(text));
    } else if (cfg.subcommand == "sample") {
        check(cc_spectrum_csv(chain.get(), cfg.mile == "first" ? CC_MILE_FIRST : CC_MILE_LAST,
                              cfg.points, &text));
        write_file(cfg, "spectrum.csv", take(text));
    } else if (cfg.subcommand == "montecarlo") {
        char* hist = nullptr;
        check(cc_montecarlo(chain.get(), cfg.n_items, resolve_seed(cfg), cfg.workers, &text, &hist));
        std::string mc = take(text);
        write_file(cfg, "mc.json", mc);
        write_file(cfg, "q_histogram.csv", take(hist));
        out << mc;
    } else if (cfg.subcommand == "optimize") {
        auto objective = cfg.objective == "ma" ? CC_OBJECTIVE_MA : CC_OBJECTIVE_K;
        auto method = cfg.opt_method == "exhaustive" ? CC_OPT_EXHAUSTIVE : CC_OPT_ANNEAL;
        check(cc_optimize(chain.get(), objective, method, resolve_seed(cfg), cfg.iterations, &text));
        std::string optimum = take(text);
        write_file(cfg, "optimum.json", optimum);
        out << optimum;
    }
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"critchain: supply chain criticality analysis"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("chain", cfg.input, "Chain document path or built-in name (reference-chain)")
            ->required();
        sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--lastmile-mode", cfg.lastmile_mode, "rate-ratio or pointwise-mean")
            ->check(CLI::IsMember({"rate-ratio", "pointwise-mean"}));
        sub->add_option("--feasibility-multiple", cfg.feasibility_multiple,
                        "Multiple of the diffusion length, clamped to [5, 6]");
    };

    auto* analyze = app.add_subcommand("analyze", "Escape probabilities and criticality report");
    common(analyze);
    analyze->add_flag("--echo-spec", cfg.echo_spec, "Also write the normalized chain as spec.json");

    auto* profile = app.add_subcommand("profile", "Forwarding escape profile over lethargy");
    common(profile);
    profile->add_option("--steps", cfg.n_steps, "Number of profile points")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1'000'000}))
        ->capture_default_str();

    auto* diffuse = app.add_subcommand("diffuse", "Last-mile flux profile");
    common(diffuse);
    diffuse->add_option("--method", cfg.diffuse_method, "numeric or analytic")
        ->check(CLI::IsMember({"numeric", "analytic"}))
        ->capture_default_str();

    auto* sample = app.add_subcommand("sample", "Enthalpy spectrum table");
    common(sample);
    sample->add_option("--mile", cfg.mile, "first or last")
        ->check(CLI::IsMember({"first", "last"}))
        ->capture_default_str();
    sample->add_option("--points", cfg.points, "Number of table rows")
        ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}))
        ->capture_default_str();

    auto* mc = app.add_subcommand("montecarlo", "Item-level simulation of the chain");
    common(mc);
    mc->add_option("--n", cfg.n_items, "Number of items")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1'000'000'000}))
        ->capture_default_str();
    mc->add_option("--seed", cfg.seed, "Seed (falls back to CHAIN_SEED, then 0)");
    mc->add_option("--workers", cfg.workers, "Worker threads")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1024}))
        ->capture_default_str();

    auto* opt = app.add_subcommand("optimize", "Mediator selection under the catalog budget");
    common(opt);
    opt->add_option("--objective", cfg.objective, "k or ma")
        ->check(CLI::IsMember({"k", "ma"}))
        ->capture_default_str();
    opt->add_option("--method", cfg.opt_method, "anneal or exhaustive")
        ->check(CLI::IsMember({"anneal", "exhaustive"}))
        ->capture_default_str();
    opt->add_option("--seed", cfg.seed, "Seed (falls back to CHAIN_SEED, then 0)");
    opt->add_option("--iterations", cfg.iterations, "Annealing iterations")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    try {
        execute(cfg, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << "\n";
        return f.code;
    }
    return exit_ok;
}

} // namespace critchain::cli

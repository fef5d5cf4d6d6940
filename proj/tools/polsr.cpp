// Command-line front end: validate, run, sweep and presets.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polsr/analysis.hpp"
#include "polsr/engine.hpp"
#include "polsr/presets.hpp"
#include "polsr/scenario.hpp"
#include "polsr/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace polsr;

namespace {

enum Exit { kOk = 0, kValidation = 2, kRuntime = 3, kIo = 4 };

constexpr const char* kOutEnv = "POLSR_OUT_DIR";

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path default_out()
{
    const char* env = std::getenv(kOutEnv);
    return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("results");
}

/// Loads a scenario file or builds a preset. Presets honour the protocol
/// override; files take it from their own content unless overridden.
Scenario resolve(const std::string& what, std::optional<Protocol> protocol)
{
    if (presets::exists(what)) {
        return presets::make(what, protocol.value_or(Protocol::Olsr));
    }
    const fs::path p(what);
    if (!fs::exists(p)) {
        if (p.has_extension()) {
            throw IoError("cannot read " + what);
        }
        throw ScenarioError({"unknown preset or missing file '" + what + "'"});
    }
    std::ifstream in(p);
    if (!in) {
        throw IoError("cannot read " + what);
    }
    auto sc = load_scenario(p);
    if (protocol) {
        sc.protocol = *protocol;
        if (*protocol == Protocol::Olsr) {
            sc.params.beta = 0.0;
        }
    }
    return sc;
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

json manifest_base(const std::string& command)
{
    return json{{"tool", "polsr"}, {"version", kVersion}, {"command", command}};
}

std::string stem(const Scenario& sc, std::uint64_t seed)
{
    return sc.name + "-" + to_string(sc.protocol) + "-" + hash_hex(scenario_hash(sc)) + "-s" + std::to_string(seed);
}

int cmd_validate(const std::string& file)
{
    const auto sc = resolve(file, std::nullopt);
    validate(sc);
    std::cout << to_json_string(sc, 2) << "\n";
    std::cout << "scenario_hash " << hash_hex(scenario_hash(sc)) << "\nOK\n";
    return kOk;
}

int cmd_run(const std::string& what, std::optional<std::uint64_t> seed, const fs::path& out,
            std::optional<Protocol> protocol)
{
    std::vector<Scenario> scenarios;
    if (presets::exists(what) && !protocol) {
        scenarios.push_back(presets::make(what, Protocol::Olsr));
        scenarios.push_back(presets::make(what, Protocol::Polsr));
    } else {
        scenarios.push_back(resolve(what, protocol));
    }
    ensure_dir(out);
    json manifest = manifest_base("run");
    manifest["runs"] = json::array();
    for (const auto& sc : scenarios) {
        validate(sc);
        const auto s = seed.value_or(sc.seed);
        const auto result = engine::run(sc, s);
        const auto base = stem(sc, s);
        std::ostringstream series;
        std::ostringstream changes;
        engine::write_series_csv(series, result);
        engine::write_route_changes_csv(changes, result);
        write_file(out / (base + "-series.csv"), series.str());
        write_file(out / (base + "-routes.csv"), changes.str());
        write_file(out / (base + "-scenario.json"), to_json_string(sc, 2) + "\n");
        const auto& c = result.counters;
        manifest["runs"].push_back(json{
            {"scenario", sc.name},
            {"protocol", to_string(sc.protocol)},
            {"scenario_hash", hash_hex(scenario_hash(sc))},
            {"seed", s},
            {"outage_time_s", result.outage_time},
            {"mean_goodput_bps", result.mean_goodput},
            {"counters",
             {{"offered", c.offered},
              {"delivered", c.delivered},
              {"lost_channel", c.lost_channel},
              {"lost_no_route", c.lost_no_route},
              {"lost_late", c.lost_late},
              {"lost_ttl", c.lost_ttl}}},
            {"files", {base + "-series.csv", base + "-routes.csv", base + "-scenario.json"}}});
        std::cout << sc.name << " " << to_string(sc.protocol) << " seed " << s << ": outage_time "
                  << result.outage_time << " s, mean goodput " << result.mean_goodput << " bit/s\n";
    }
    const std::string name = scenarios.size() == 1 ? stem(scenarios.front(), seed.value_or(scenarios.front().seed))
                                                   : scenarios.front().name + "-s" +
                                                         std::to_string(seed.value_or(scenarios.front().seed));
    write_file(out / (name + "-manifest.json"), manifest.dump(2) + "\n");
    return kOk;
}

struct SweepGrid {
    std::vector<double> hi;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;
    std::vector<std::string> protocols;
};

int cmd_sweep(const std::string& what, const SweepGrid& grid, int reps, std::optional<std::uint64_t> seed,
              const fs::path& out, int workers)
{
    std::vector<Protocol> protocols;
    for (const auto& p : grid.protocols) {
        protocols.push_back(protocol_from_string(p));
    }
    ensure_dir(out);
    std::vector<std::pair<analysis::SweepConfig, engine::CampaignResult>> done;
    json manifest = manifest_base("sweep");
    manifest["base"] = what;
    manifest["repetitions"] = reps;
    manifest["campaigns"] = json::array();
    std::vector<std::string> failures;

    for (auto protocol : protocols) {
        auto base = resolve(what, protocol);
        const auto betas = protocol == Protocol::Olsr ? std::vector<double>{0.0} : grid.beta;
        const auto gammas = protocol == Protocol::Olsr ? std::vector<double>{base.params.gamma} : grid.gamma;
        for (double hi : grid.hi) {
            for (double a : grid.alpha) {
                for (double b : betas) {
                    for (double g : gammas) {
                        auto sc = base;
                        sc.params = {a, b, g, hi};
                        analysis::SweepConfig cfg{protocol, hi, a, b, protocol == Protocol::Olsr ? 0.0 : g};
                        const auto s = seed.value_or(sc.seed);
                        try {
                            auto res = engine::run_campaign(sc, reps, s, workers);
                            manifest["campaigns"].push_back(json{{"protocol", to_string(protocol)},
                                                                 {"hello_interval", hi},
                                                                 {"alpha", a},
                                                                 {"beta", cfg.beta},
                                                                 {"gamma", cfg.gamma},
                                                                 {"scenario_hash", hash_hex(scenario_hash(sc))},
                                                                 {"first_seed", s},
                                                                 {"repetitions", reps}});
                            std::cout << to_string(protocol) << " HI=" << hi << " alpha=" << a << " beta=" << cfg.beta
                                      << " gamma=" << cfg.gamma << ": outage " << res.mean_outage << " s, goodput "
                                      << res.mean_goodput << " bit/s\n";
                            done.emplace_back(cfg, std::move(res));
                        } catch (const std::exception& e) {
                            failures.push_back(std::string(to_string(protocol)) + " HI=" + std::to_string(hi) + ": " + e.what());
                        }
                    }
                }
            }
        }
    }

    std::vector<analysis::SweepRow> rows;
    try {
        rows = analysis::sweep_table(done);
    } catch (const analysis::MissingBaseline& e) {
        failures.push_back(e.what());
        for (const auto& [cfg, res] : done) {
            rows.push_back({cfg, res.mean_outage, res.mean_goodput, static_cast<int>(res.runs.size()), std::nullopt});
        }
    }
    std::ostringstream table;
    analysis::write_sweep_csv(table, rows);
    const std::string name = "sweep-" + hash_hex(scenario_hash(resolve(what, protocols.front())));
    write_file(out / (name + ".csv"), table.str());
    manifest["failures"] = failures;
    manifest["files"] = {name + ".csv"};
    write_file(out / (name + "-manifest.json"), manifest.dump(2) + "\n");
    std::cout << table.str();
    if (!failures.empty()) {
        for (const auto& f : failures) {
            std::cerr << "failed: " << f << "\n";
        }
        return kRuntime;
    }
    return kOk;
}

int cmd_presets(const std::string& action, const std::string& name, std::optional<Protocol> protocol)
{
    if (action == "list") {
        for (const auto& n : presets::names()) {
            std::cout << n << "\n";
        }
        return kOk;
    }
    if (action == "show") {
        if (!presets::exists(name)) {
            throw ScenarioError({"unknown preset '" + name + "'"});
        }
        std::cout << to_json_string(presets::make(name, protocol.value_or(Protocol::Olsr)), 2) << "\n";
        return kOk;
    }
    throw ScenarioError({"presets expects 'list' or 'show <name>'"});
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Link-state routing simulator for UAV networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string file;
    auto* validate_cmd = app.add_subcommand("validate", "check a scenario file and print the effective config");
    validate_cmd->add_option("file", file, "scenario JSON or preset name")->required();

    std::string target;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string protocol_name;
    auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
    run_cmd->add_option("scenario", target, "scenario JSON or preset name")->required();
    run_cmd->add_option("--seed", seed, "seed (default: the scenario's)");
    run_cmd->add_option("--out", out, std::string("output directory (default: $") + kOutEnv + " or ./results)");
    run_cmd->add_option("--protocol", protocol_name, "olsr or polsr")->check(CLI::IsMember({"olsr", "polsr"}));

    SweepGrid grid{{0.5, 1.0, 2.0}, {0.1, 0.2, 0.4}, {0.1, 0.2, 0.4}, {0.04, 0.08, 0.16}, {"olsr", "polsr"}};
    int reps = 10;
    int workers = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "campaigns over a parameter grid");
    sweep_cmd->add_option("scenario", target, "scenario JSON or preset name")->required();
    sweep_cmd->add_option("--hi", grid.hi, "hello intervals, s")->delimiter(',');
    sweep_cmd->add_option("--alpha", grid.alpha, "link-quality aging values")->delimiter(',');
    sweep_cmd->add_option("--beta", grid.beta, "speed weights (P-OLSR)")->delimiter(',');
    sweep_cmd->add_option("--gamma", grid.gamma, "speed aging values (P-OLSR)")->delimiter(',');
    sweep_cmd->add_option("--protocols", grid.protocols, "protocols to include")->delimiter(',');
    sweep_cmd->add_option("--reps", reps, "repetitions per configuration")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--seed", seed, "first seed (default: the scenario's)");
    sweep_cmd->add_option("--out", out, "output directory");
    sweep_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

    std::string action;
    std::string preset_name;
    auto* presets_cmd = app.add_subcommand("presets", "list or show built-in scenarios");
    presets_cmd->add_option("action", action, "list | show")->required();
    presets_cmd->add_option("name", preset_name, "preset to show");
    presets_cmd->add_option("--protocol", protocol_name, "olsr or polsr")->check(CLI::IsMember({"olsr", "polsr"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    std::optional<Protocol> protocol;
    if (!protocol_name.empty()) {
        protocol = protocol_from_string(protocol_name);
    }
    const fs::path out_dir = out.empty() ? default_out() : fs::path(out);

    try {
        if (*validate_cmd) {
            return cmd_validate(file);
        }
        if (*run_cmd) {
            return cmd_run(target, seed, out_dir, protocol);
        }
        if (*sweep_cmd) {
            return cmd_sweep(target, grid, reps, seed, out_dir, workers);
        }
        return cmd_presets(action, preset_name, protocol);
    } catch (const ScenarioError& e) {
        std::cerr << "invalid scenario:\n";
        for (const auto& p : e.problems()) {
            std::cerr << "  " << p << "\n";
        }
        return kValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

// contbell: command-line front end for the continuous-outcome Bell toolkit.
//
//   contbell theory     --config hd.ini
//   contbell simulate   --config hd.ini --seed 42 --pairs 1000000 --out runs/p1
//   contbell spin-demo  --config spin.ini
//   contbell tomography --config tomo.ini
//   contbell validate-config --config hd.ini
//
// Exit status: 0 success, 2 configuration/usage error, 3 runtime error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "contbell/commands.hpp"
#include "contbell/config.hpp"
#include "contbell/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

void print_chsh(const char* what, const contbell::CorrelationReport& r) {
    std::printf("%-9s E = %.6f  (E_rt %.6f, E_rs %.6f, E_qt %.6f, E_qs %.6f)%s\n", what,
                r.chsh_value, r.e_rt, r.e_rs, r.e_qt, r.e_qs, r.violated ? "  violated" : "");
}

void print_summary(const contbell::RunReport& r) {
    using namespace contbell;
    if (r.theory) print_chsh("theory", *r.theory);
    if (r.estimate) print_chsh("estimate", *r.estimate);
    if (r.verdict) {
        std::printf("PPT: %s (min PT eigenvalue %.3e)\n", to_string(r.verdict->classification),
                    r.verdict->min_pt_eigenvalue);
    } else {
        std::printf("PPT: Undetermined\n");
    }
    for (const auto& t : r.spin) {
        std::printf("%s  ++ %llu  +- %llu  -+ %llu  -- %llu\n", t.name.c_str(),
                    static_cast<unsigned long long>(t.counts[0]),
                    static_cast<unsigned long long>(t.counts[1]),
                    static_cast<unsigned long long>(t.counts[2]),
                    static_cast<unsigned long long>(t.counts[3]));
    }
    if (r.tomography) {
        if (r.tomography->p_hat) std::printf("p_hat = %.6f\n", *r.tomography->p_hat);
        if (!r.tomography->missing.empty()) {
            std::printf("missing pairs:");
            for (const auto& m : r.tomography->missing) std::printf(" (%s)", m.c_str());
            std::printf("\n");
        }
    }
    for (const auto& t : r.tables) std::printf("wrote %s\n", t.string().c_str());
    for (const auto& h : r.histograms) std::printf("wrote %s\n", h.csv.string().c_str());
    std::printf("report %s (%.2f s)\n", r.report_path.string().c_str(), r.duration_seconds);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell/CHSH tests with continuous measurement outcomes"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    contbell::ConfigOverrides overrides;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    app.add_option("--config", config_path, "Scenario file (INI)");
    app.add_option("--seed", overrides.seed, "Master RNG seed");
    app.add_option("--pairs", overrides.pairs, "Number of simulated pairs")->check(CLI::PositiveNumber);
    app.add_option("--bins", overrides.bins, "Bins per continuous axis")->check(CLI::PositiveNumber);
    app.add_option("--p-scatter", overrides.p_scatter, "Scattering probability per channel")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    auto* theory = app.add_subcommand("theory", "CHSH value and PPT verdict over a Werner sweep");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the scattering experiment");
    auto* spin = app.add_subcommand("spin-demo", "Spin-1/2 Stern-Gerlach count tables");
    auto* tomo = app.add_subcommand("tomography", "Reconstruct rho from measured spectra");
    auto* validate = app.add_subcommand("validate-config", "Parse and check a scenario file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    contbell::ScenarioConfig config;
    try {
        if (!config_path.empty()) config = contbell::parse_config(config_path);
        if (out_dir) overrides.output_dir = *out_dir;
        if (format) overrides.format = contbell::parse_report_format(*format);
        contbell::apply_overrides(config, overrides);
    } catch (const contbell::Error& e) {
        std::cerr << "contbell: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        contbell::RunReport report;
        if (validate->parsed()) {
            std::printf("%s: ok (%s, state %s)\n",
                        config_path.empty() ? "<defaults>" : config_path.c_str(),
                        contbell::to_string(config.scenario), config.state.describe().c_str());
            return 0;
        }
        if (theory->parsed()) report = contbell::cmd_theory(config);
        else if (simulate->parsed()) report = contbell::cmd_simulate(config);
        else if (spin->parsed()) report = contbell::cmd_spin_demo(config);
        else if (tomo->parsed()) report = contbell::cmd_tomography(config);
        print_summary(report);
    } catch (const contbell::ConfigError& e) {
        std::cerr << "contbell: " << e.what() << "\n";
        return kConfigError;
    } catch (const contbell::UsageError& e) {
        std::cerr << "contbell: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "contbell: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}

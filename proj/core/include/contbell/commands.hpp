#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contbell/bell.hpp"
#include "contbell/config.hpp"
#include "contbell/histogram.hpp"
#include "contbell/montecarlo.hpp"
#include "contbell/tomography.hpp"

namespace contbell {

/// A histogram CSV written to disk plus its JSON sidecar.
struct HistogramArtifact {
    std::string name;
    std::string first_setting;
    std::string second_setting;
    std::filesystem::path csv;
    std::filesystem::path sidecar;
    std::uint64_t total = 0;
};

struct HistogramMetadata {
    std::string name;
    std::string first_setting;
    std::string second_setting;
    std::uint64_t seed = 0;
    std::uint64_t n_pairs = 0;
    double p_scatter = 0.0;
};

// Writes <dir>/<name>.csv and <dir>/<name>.json.
HistogramArtifact write_histogram_artifact(const std::filesystem::path& dir,
                                           const HistogramMetadata& meta, const Histogram2D& hist);

struct LoadedHistogram {
    HistogramMetadata meta;
    Histogram2D hist;
};

// Reads a sidecar and the CSV it points to.
LoadedHistogram read_histogram_artifact(const std::filesystem::path& sidecar);

struct TheoryRow {
    double p = 0.0;  // NaN when the state is not a Werner family
    double e_analytic = 0.0;
    double e_spectrum = 0.0;
    bool ppt_entangled = false;
    double min_pt_eigenvalue = 0.0;
};

// One row per p on a Werner family, or a single row for any other state.
std::vector<TheoryRow> theory_sweep(const ScenarioConfig& config, std::span<const double> ps);

// CSV "p,E_analytic,E_spectrum,ppt_entangled".
std::string theory_csv(std::span<const TheoryRow> rows);
std::vector<TheoryRow> read_theory_csv(const std::filesystem::path& path);

struct SpinTable {
    std::string name;  // 1z2z, 1z2x, ...
    std::string first_setting;
    std::string second_setting;
    std::array<std::uint64_t, 4> counts{};   // ++, +-, -+, --
    std::array<double, 4> expected{};        // diagonal weights of the state
};

struct TomographySummary {
    std::vector<std::string> required;
    std::vector<std::string> supplied;
    std::vector<std::string> missing;
    std::vector<MeasuredPair> fits;
    ReconstructionResult reconstruction;
    std::optional<double> p_hat;  // 2 Re rho_23 when known
};

struct RunReport {
    std::string command;
    ScenarioConfig config;
    std::uint64_t seed = 0;
    std::vector<HistogramArtifact> histograms;
    std::vector<std::filesystem::path> tables;
    std::optional<CorrelationReport> theory;
    std::optional<CorrelationReport> estimate;
    std::optional<EntanglementVerdict> verdict;
    std::array<std::uint64_t, 4> branch_pairs{};
    std::vector<TheoryRow> sweep;
    std::vector<SpinTable> spin;
    std::optional<TomographySummary> tomography;
    double duration_seconds = 0.0;
    std::filesystem::path report_path;
};

std::string report_json(const RunReport& report);
// "key,value" rows with JSON-pointer keys.
std::string report_csv(const RunReport& report);
// Writes run_report.{json,csv} into the output directory per config.format.
std::filesystem::path write_report(RunReport& report);

RunReport cmd_theory(const ScenarioConfig& config);
RunReport cmd_simulate(const ScenarioConfig& config);
RunReport cmd_spin_demo(const ScenarioConfig& config);
RunReport cmd_tomography(const ScenarioConfig& config);

// Measurement pairs needed for complete tomography: {Z, X, Y} x {Z, X, Y}.
std::vector<std::pair<std::string, std::string>> tomography_pairs();

}  // namespace contbell

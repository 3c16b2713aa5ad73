#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contbell/scenarios.hpp"
#include "contbell/tomography.hpp"

namespace contbell {

enum class ScenarioKind { HdScattering, SpinDemo, Custom };
enum class ReportFormat { Csv, Json };
enum class TomographySource { Exact, Simulate, Files };

const char* to_string(ScenarioKind k);
const char* to_string(ReportFormat f);
const char* to_string(TomographySource s);

/// [profile.<Label>] section.
struct ProfileSpec {
    enum class Type { Default, Gaussian, Table, Projective };

    Type type = Type::Default;
    double center_plus = 0.0;
    double center_minus = 0.0;
    double width = 0.0;
    std::filesystem::path plus_file;
    std::filesystem::path minus_file;
};

struct TheoryGrid {
    double p_min = 0.0;
    double p_max = 1.0;
    double p_step = 0.05;
    // Optional finer window merged into the base grid.
    std::optional<double> refine_min;
    std::optional<double> refine_max;
    double refine_step = 0.001;

    // Sorted, duplicates (within 1e-12) removed.
    std::vector<double> points() const;
};

struct TomographyOptions {
    TomographySource source = TomographySource::Exact;
    std::filesystem::path input_dir;
    AmplitudeModel model = AmplitudeModel::General;
};

/// Everything a CLI run needs. Defaults reproduce the HD scattering
/// scenario: N = 10^6 pairs, p_scatter = 0.4, 18 bins.
struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::HdScattering;
    StateSpec state;

    std::uint64_t n_pairs = 1'000'000;
    double p_scatter = 0.4;
    std::uint64_t seed = 0;
    std::size_t bins = 18;
    unsigned workers = 0;
    std::size_t grid_points = OutcomeSpace::kDefaultGridPoints;

    ChannelLabels channels;
    std::map<std::string, ProfileSpec> profiles;
    TheoryGrid theory;
    TomographyOptions tomography;

    std::filesystem::path output_dir = "contbell_out";
    ReportFormat format = ReportFormat::Json;

    // Throws ConfigError.
    void validate() const;
    ProfileLibrary profile_library() const;
    SimConfig sim_config() const;
};

// Flat INI sections: [scenario] [state] [simulation] [channels]
// [profile.<Label>] [theory] [tomography] [output]. Relative file paths are
// resolved against the config file's directory. Errors carry the file,
// line and field.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<string>",
                                 const std::filesystem::path& base_dir = {});

/// Command-line overrides, applied after the file.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> pairs;
    std::optional<std::size_t> bins;
    std::optional<double> p_scatter;
    std::optional<std::filesystem::path> output_dir;
    std::optional<ReportFormat> format;
};

void apply_overrides(ScenarioConfig& config, const ConfigOverrides& overrides);

ReportFormat parse_report_format(const std::string& s);

}  // namespace contbell

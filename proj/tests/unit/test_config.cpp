#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "contbell/config.hpp"
#include "contbell/errors.hpp"

using namespace contbell;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "t.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsWhenEmpty) {
    const auto c = parse_config_text("");
    EXPECT_EQ(c.scenario, ScenarioKind::HdScattering);
    EXPECT_EQ(c.n_pairs, 1'000'000u);
    EXPECT_DOUBLE_EQ(c.p_scatter, 0.4);
    EXPECT_EQ(c.bins, 18u);
    EXPECT_EQ(c.channels.second_scattered, "ZpX");
    EXPECT_EQ(c.format, ReportFormat::Json);
}

TEST(Config, ParsesAllSections) {
    const auto c = parse_config_text(R"(
# comment
[scenario]
kind = hd_scattering
[state]
kind = werner
p = 0.75
[simulation]
pairs = 5000
p_scatter = 0.25
seed = 9
bins = 60
workers = 2
[channels]
second_unscattered = X
[profile.ZpX]
type = gaussian
center_plus = 20
center_minus = 160
width = 30
[theory]
p_step = 0.1
refine_min = 0.7
refine_max = 0.71
[output]
format = csv
)");
    EXPECT_EQ(c.state.kind, StateSpec::Kind::Werner);
    EXPECT_DOUBLE_EQ(c.state.p, 0.75);
    EXPECT_EQ(c.n_pairs, 5000u);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.bins, 60u);
    EXPECT_EQ(c.workers, 2u);
    EXPECT_EQ(c.channels.second_unscattered, "X");
    ASSERT_EQ(c.profiles.count("ZpX"), 1u);
    EXPECT_EQ(c.profiles.at("ZpX").type, ProfileSpec::Type::Gaussian);
    EXPECT_DOUBLE_EQ(c.profiles.at("ZpX").width, 30.0);
    EXPECT_EQ(c.format, ReportFormat::Csv);
    const auto pts = c.theory.points();
    EXPECT_EQ(pts.front(), 0.0);
    EXPECT_NEAR(pts.back(), 1.0, 1e-12);
    EXPECT_EQ(std::count_if(pts.begin(), pts.end(), [](double p) { return p > 0.7 && p < 0.71; }), 9);
    const auto sim = c.sim_config();
    EXPECT_EQ(sim.second.unscattered.setting().label(), "X");
}

TEST(Config, ErrorsCarryLocation) {
    EXPECT_EQ(error_of("[simulation]\n\nbins = x2\n"), "t.ini:3: [simulation] bins: expected a number, got 'x2'");
    EXPECT_NE(error_of("[simulation]\nfoo = 1\n").find("t.ini:2"), std::string::npos);
    EXPECT_NE(error_of("[nope]\n").find("nope"), std::string::npos);
    EXPECT_NE(error_of("[state]\nkind = werner\np = 1.5\n").find("[state] p"), std::string::npos);
    EXPECT_NE(error_of("[state]\nkind = werner\ncase = I\n").find("case"), std::string::npos);
    EXPECT_NE(error_of("[channels]\nfirst_scattered = Q\n").find("first_scattered"), std::string::npos);
    EXPECT_NE(error_of("[profile.Z]\ntype = gaussian\nwidth = 10\n").find("center_plus"), std::string::npos);
    EXPECT_NE(error_of("[output]\nformat = xml\n").find("format"), std::string::npos);
}

TEST(Config, TableProfilesResolveRelativeToFile) {
    const fs::path dir = fs::temp_directory_path() / "contbell_cfg_test";
    fs::create_directories(dir);
    std::ofstream(dir / "p.txt") << "0 1\n90 2\n180 1\n";
    std::ofstream(dir / "m.txt") << "0 2\n90 1\n180 2\n";
    std::ofstream(dir / "c.ini") << "[profile.Z]\ntype = table\nplus_file = p.txt\nminus_file = m.txt\n";
    const auto c = parse_config(dir / "c.ini");
    EXPECT_EQ(c.profiles.at("Z").plus_file, dir / "p.txt");
    EXPECT_TRUE(c.profile_library().overridden("Z"));
    std::ofstream(dir / "bad.ini") << "[profile.Z]\ntype = table\nplus_file = none.txt\nminus_file = m.txt\n";
    EXPECT_THROW(parse_config(dir / "bad.ini"), ConfigError);
    EXPECT_THROW(parse_config(dir / "missing.ini"), ConfigError);
    fs::remove_all(dir);
}

TEST(Config, OverridesApplyAndValidate) {
    auto c = parse_config_text("[simulation]\nseed = 1\n");
    ConfigOverrides o;
    o.seed = 42;
    o.pairs = 10;
    o.format = parse_report_format("csv");
    apply_overrides(c, o);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.n_pairs, 10u);
    EXPECT_EQ(c.format, ReportFormat::Csv);
    ConfigOverrides bad;
    bad.p_scatter = 2.0;
    EXPECT_THROW(apply_overrides(c, bad), ConfigError);
    EXPECT_THROW(parse_report_format("xml"), ConfigError);
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "contbell/commands.hpp"
#include "contbell/errors.hpp"
#include "oracles.hpp"

using namespace contbell;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("contbell_cmd_" + name);
    fs::remove_all(d);
    return d;
}

ScenarioConfig small_config(const fs::path& out) {
    ScenarioConfig c;
    c.n_pairs = 20000;
    c.seed = 5;
    c.output_dir = out;
    return c;
}

}  // namespace

TEST(HistogramArtifact, RoundTrip) {
    const fs::path dir = scratch("artifact");
    fs::create_directories(dir);
    Histogram2D h(HistogramAxis::uniform(0, 180, 3), HistogramAxis::labeled({"+", "-"}));
    h.add(1, 0, 4);
    h.add(2, 1, 6);
    const HistogramMetadata meta{"hist_x", "Z", "ZmX", 7, 10, 0.4};
    const auto art = write_histogram_artifact(dir, meta, h);
    EXPECT_TRUE(fs::exists(art.csv));
    EXPECT_TRUE(fs::exists(art.sidecar));
    const auto loaded = read_histogram_artifact(art.sidecar);
    EXPECT_EQ(loaded.hist, h);
    EXPECT_EQ(loaded.meta.first_setting, "Z");
    EXPECT_EQ(loaded.meta.second_setting, "ZmX");
    EXPECT_EQ(loaded.meta.seed, 7u);
    fs::remove_all(dir);
}

TEST(TheoryCsv, RoundTrip) {
    const std::vector<TheoryRow> rows{{0.5, 1.41, 1.42, true, -0.125}, {1.0, 2.82, 2.83, true, -0.5}};
    const fs::path dir = scratch("theorycsv");
    fs::create_directories(dir);
    std::ofstream(dir / "t.csv") << theory_csv(rows);
    const auto back = read_theory_csv(dir / "t.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_DOUBLE_EQ(back[1].e_spectrum, 2.83);
    EXPECT_TRUE(back[0].ppt_entangled);
    EXPECT_EQ(theory_csv(rows).substr(0, theory_csv(rows).find('\n')), "p,E_analytic,E_spectrum,ppt_entangled");
    fs::remove_all(dir);
}

TEST(CmdTheory, SweepAndReport) {
    const fs::path dir = scratch("theory");
    auto c = small_config(dir);
    c.theory.p_step = 0.25;
    const auto r = cmd_theory(c);
    ASSERT_EQ(r.sweep.size(), 5u);
    for (const auto& row : r.sweep) {
        EXPECT_NEAR(row.e_analytic, 2 * std::sqrt(2.0) * row.p, 1e-12);
        EXPECT_NEAR(row.e_spectrum, row.e_analytic, 1e-6);
        EXPECT_EQ(row.ppt_entangled, row.p > 1.0 / 3.0);
    }
    EXPECT_TRUE(fs::exists(dir / "theory.csv"));
    const auto j = nlohmann::json::parse(slurp(dir / "run_report.json"));
    EXPECT_EQ(j["command"], "theory");
    fs::remove_all(dir);
}

TEST(CmdSimulate, WritesArtifactsAndIsReproducible) {
    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    auto ca = small_config(a);
    ca.workers = 1;
    auto cb = small_config(b);
    cb.workers = 3;
    const auto ra = cmd_simulate(ca);
    cmd_simulate(cb);
    ASSERT_EQ(ra.histograms.size(), 4u);
    ASSERT_TRUE(ra.estimate.has_value());
    for (const auto& h : ra.histograms) {
        EXPECT_TRUE(fs::exists(h.csv));
        EXPECT_EQ(slurp(h.csv), slurp(b / h.csv.filename()));
    }
    cmd_simulate(ca);
    for (const auto& h : ra.histograms) EXPECT_EQ(slurp(h.csv), slurp(b / h.csv.filename()));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(CmdSimulate, CsvReport) {
    const fs::path dir = scratch("sim_csv");
    auto c = small_config(dir);
    c.format = ReportFormat::Csv;
    const auto r = cmd_simulate(c);
    EXPECT_EQ(r.report_path.filename(), "run_report.csv");
    const std::string text = slurp(r.report_path);
    EXPECT_EQ(text.substr(0, text.find('\n')), "key,value");
    EXPECT_NE(text.find("/command,simulate"), std::string::npos);
    fs::remove_all(dir);
}

TEST(CmdSpinDemo, CaseTablesMatchExpectations) {
    for (SpinCase sc : {SpinCase::I, SpinCase::II, SpinCase::III}) {
        const fs::path dir = scratch("spin");
        auto c = small_config(dir);
        c.scenario = ScenarioKind::SpinDemo;
        c.state.kind = StateSpec::Kind::SpinCase;
        c.state.spin = sc;
        c.n_pairs = 100000;
        const auto r = cmd_spin_demo(c);
        ASSERT_EQ(r.spin.size(), 4u);
        const auto rho = spin_case_state(sc);
        for (const auto& t : r.spin) {
            const auto truth = diag_coefficients(rho, settings::by_label(t.first_setting),
                                                 settings::by_label(t.second_setting));
            double n = 0;
            for (auto k : t.counts) n += static_cast<double>(k);
            EXPECT_EQ(n, 100000.0);
            for (int k = 0; k < 4; ++k) {
                EXPECT_NEAR(t.expected[k], truth[k], 1e-12);
                EXPECT_NEAR(t.counts[k] / n, truth[k], oracle::four_sigma(truth[k], n)) << t.name << " " << k;
            }
        }
        EXPECT_TRUE(fs::exists(dir / "spin_tables.csv"));
        fs::remove_all(dir);
    }
}

TEST(CmdSpinDemo, RejectsContinuousStates) {
    auto c = small_config(scratch("spin_bad"));
    c.state.kind = StateSpec::Kind::CustomMatrix;
    c.state.custom = Matrix4c::Identity() / 4.0;
    EXPECT_THROW(cmd_spin_demo(c), ConfigError);
}

TEST(CmdTomography, ExactWerner) {
    const fs::path dir = scratch("tomo");
    auto c = small_config(dir);
    c.state.p = 0.6;
    const auto r = cmd_tomography(c);
    ASSERT_TRUE(r.tomography.has_value());
    ASSERT_TRUE(r.tomography->p_hat.has_value());
    EXPECT_NEAR(*r.tomography->p_hat, 0.6, 1e-6);
    EXPECT_TRUE(r.tomography->missing.empty());
    EXPECT_TRUE(r.verdict->entangled());
    fs::remove_all(dir);
}

TEST(CmdTomography, MissingPairsReported) {
    const fs::path in = scratch("tomo_in"), out = scratch("tomo_out");
    fs::create_directories(in);
    Histogram2D h(HistogramAxis::labeled({"+", "-"}), HistogramAxis::labeled({"+", "-"}));
    h.add(0, 0, 10);
    h.add(1, 1, 10);
    write_histogram_artifact(in, {"only_xx", "X", "X", 1, 20, 1.0}, h);
    auto c = small_config(out);
    c.tomography.source = TomographySource::Files;
    c.tomography.input_dir = in;
    try {
        cmd_tomography(c);
        FAIL() << "expected UsageError";
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("Z,Z"), std::string::npos) << msg;
        EXPECT_NE(msg.find("X,X"), std::string::npos) << msg;
    }

    // Z is continuous by default, so its histogram carries angular bins.
    h = Histogram2D(HistogramAxis::uniform(0, 180, 18), HistogramAxis::uniform(0, 180, 18));
    h.add(8, 4, 10);
    h.add(4, 8, 10);
    h.add(8, 13, 10);
    h.add(13, 8, 10);
    write_histogram_artifact(in, {"only_zz", "Z", "Z", 1, 40, 1.0}, h);
    const auto r = cmd_tomography(c);
    ASSERT_TRUE(r.tomography.has_value());
    EXPECT_FALSE(r.tomography->missing.empty());
    EXPECT_FALSE(r.tomography->reconstruction.complete());
    EXPECT_FALSE(r.verdict.has_value());
    fs::remove_all(in);
    fs::remove_all(out);
}

TEST(TomographyPairs, NineCombinations) {
    const auto p = tomography_pairs();
    EXPECT_EQ(p.size(), 9u);
    EXPECT_EQ(p.front(), (std::pair<std::string, std::string>{"Z", "Z"}));
}

#include "contbell/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "contbell/errors.hpp"

namespace contbell {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Files written by a command; removed again if the command fails.
class OutputGuard {
public:
    explicit OutputGuard(const fs::path& dir) { fs::create_directories(dir); }
    ~OutputGuard() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : files_) fs::remove(p, ec);
    }
    void track(const fs::path& p) { files_.push_back(p); }
    void track(const HistogramArtifact& a) {
        track(a.csv);
        track(a.sidecar);
    }
    void commit() { committed_ = true; }

private:
    std::vector<fs::path> files_;
    bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

json axis_json(const HistogramAxis& a) {
    if (a.is_continuous()) return json{{"edges", a.edges()}};
    return json{{"labels", a.labels()}};
}

HistogramAxis axis_from_json(const json& j) {
    if (j.contains("edges")) return HistogramAxis::from_edges(j.at("edges").get<std::vector<double>>());
    return HistogramAxis::labeled(j.at("labels").get<std::vector<std::string>>());
}

json report_json_value(const CorrelationReport& r) {
    return json{{"method", to_string(r.method)},
                {"E_rt", r.e_rt},
                {"E_rs", r.e_rs},
                {"E_qt", r.e_qt},
                {"E_qs", r.e_qs},
                {"chsh_value", r.chsh_value},
                {"violated", r.violated}};
}

json verdict_json(const std::optional<EntanglementVerdict>& v) {
    if (!v) return json{{"classification", "Undetermined"}};
    return json{{"classification", to_string(v->classification)},
                {"min_pt_eigenvalue", v->min_pt_eigenvalue},
                {"tolerance", v->tolerance}};
}

json config_json(const ScenarioConfig& c) {
    json profiles = json::object();
    for (const auto& [label, spec] : c.profiles) {
        static const char* names[] = {"default", "gaussian", "table", "projective"};
        json p{{"type", names[static_cast<int>(spec.type)]}};
        if (spec.type == ProfileSpec::Type::Gaussian) {
            p["center_plus"] = spec.center_plus;
            p["center_minus"] = spec.center_minus;
            p["width"] = spec.width;
        }
        if (spec.type == ProfileSpec::Type::Table) {
            p["plus_file"] = spec.plus_file.string();
            p["minus_file"] = spec.minus_file.string();
        }
        profiles[label] = p;
    }
    json theory{{"p_min", c.theory.p_min}, {"p_max", c.theory.p_max}, {"p_step", c.theory.p_step}};
    if (c.theory.refine_min && c.theory.refine_max) {
        theory["refine_min"] = *c.theory.refine_min;
        theory["refine_max"] = *c.theory.refine_max;
        theory["refine_step"] = c.theory.refine_step;
    }
    return json{
        {"kind", to_string(c.scenario)},
        {"state", c.state.describe()},
        {"n_pairs", c.n_pairs},
        {"p_scatter", c.p_scatter},
        {"seed", c.seed},
        {"bins", c.bins},
        {"workers", c.workers},
        {"grid_points", c.grid_points},
        {"channels",
         {{"first_scattered", c.channels.first_scattered},
          {"first_unscattered", c.channels.first_unscattered},
          {"second_scattered", c.channels.second_scattered},
          {"second_unscattered", c.channels.second_unscattered}}},
        {"profiles", profiles},
        {"theory", theory},
        {"tomography",
         {{"source", to_string(c.tomography.source)},
          {"input_dir", c.tomography.input_dir.string()},
          {"model", c.tomography.model == AmplitudeModel::Real ? "real" : "general"}}},
        {"output_dir", c.output_dir.string()},
        {"format", to_string(c.format)},
    };
}

std::string pair_name(const std::string& a, const std::string& b) { return a + "," + b; }

// Histogram of the scattered/scattered branch, which is the only one
// populated when p_scatter = 1.
Histogram2D measure_pair(const BipartiteDensity& rho, const SpectralProfile& first,
                         const SpectralProfile& second, const ScenarioConfig& config,
                         std::uint64_t seed) {
    SimConfig sim{.n_pairs = config.n_pairs,
                  .p_scatter = 1.0,
                  .seed = seed,
                  .bins = config.bins,
                  .state = rho,
                  .first = {first, first},
                  .second = {second, second},
                  .workers = config.workers};
    return run_experiment(sim).histogram(Branch::ScatteredScattered);
}

RunReport new_report(const char* command, const ScenarioConfig& config) {
    RunReport r;
    r.command = command;
    r.config = config;
    r.seed = config.seed;
    return r;
}

}  // namespace

HistogramArtifact write_histogram_artifact(const fs::path& dir, const HistogramMetadata& meta,
                                           const Histogram2D& hist) {
    fs::create_directories(dir);
    HistogramArtifact a{meta.name,
                        meta.first_setting,
                        meta.second_setting,
                        dir / (meta.name + ".csv"),
                        dir / (meta.name + ".json"),
                        hist.total()};
    write_histogram_csv(a.csv, hist);
    const json side{{"kind", "histogram"},
                    {"name", meta.name},
                    {"csv", a.csv.filename().string()},
                    {"first_setting", meta.first_setting},
                    {"second_setting", meta.second_setting},
                    {"seed", meta.seed},
                    {"n_pairs", meta.n_pairs},
                    {"p_scatter", meta.p_scatter},
                    {"total", hist.total()},
                    {"first_axis", axis_json(hist.first())},
                    {"second_axis", axis_json(hist.second())}};
    write_text(a.sidecar, side.dump(2) + "\n");
    return a;
}

LoadedHistogram read_histogram_artifact(const fs::path& sidecar) {
    std::ifstream in(sidecar);
    if (!in) throw ValidationError("cannot open " + sidecar.string());
    json j;
    try {
        j = json::parse(in);
        if (j.value("kind", "") != "histogram")
            throw ValidationError(sidecar.string() + " is not a histogram sidecar");
        LoadedHistogram out;
        out.meta.name = j.at("name").get<std::string>();
        out.meta.first_setting = j.at("first_setting").get<std::string>();
        out.meta.second_setting = j.at("second_setting").get<std::string>();
        out.meta.seed = j.at("seed").get<std::uint64_t>();
        out.meta.n_pairs = j.at("n_pairs").get<std::uint64_t>();
        out.meta.p_scatter = j.at("p_scatter").get<double>();
        out.hist = read_histogram_csv(sidecar.parent_path() / j.at("csv").get<std::string>(),
                                      axis_from_json(j.at("first_axis")),
                                      axis_from_json(j.at("second_axis")));
        if (out.hist.total() != j.at("total").get<std::uint64_t>())
            throw ValidationError(sidecar.string() + ": CSV total does not match the sidecar");
        return out;
    } catch (const json::exception& e) {
        throw ValidationError(sidecar.string() + ": " + e.what());
    }
}

namespace {

// The spectrum integral is linear in the diagonal weights A^{j1 j2}, so each
// setting pair reduces to four responses: the integral for the pure product
// eigenstate |j1 j2>. Computing them once makes a fine p grid cheap.
struct SpectrumResponse {
    MeasurementSetting first;
    MeasurementSetting second;
    std::array<double, 4> response{};

    SpectrumResponse(const ChshChannel& a, const ChshChannel& b)
        : first(a.setting), second(b.setting) {
        const AuxFunction aux1 = build_aux(*a.profile);
        const AuxFunction aux2 = build_aux(*b.profile);
        for (Outcome j1 : kOutcomes) {
            for (Outcome j2 : kOutcomes) {
                const auto rho = product_state(PureState2::eigenstate(first, j1),
                                               PureState2::eigenstate(second, j2));
                response[pair_index(j1, j2)] = correlation_from_spectrum(
                    joint_spectrum(rho, *a.profile, *b.profile), aux1, aux2);
            }
        }
    }

    double operator()(const BipartiteDensity& rho) const {
        const auto w = diag_coefficients(rho, first, second);
        return w[0] * response[0] + w[1] * response[1] + w[2] * response[2] + w[3] * response[3];
    }
};

}  // namespace

std::vector<TheoryRow> theory_sweep(const ScenarioConfig& config, std::span<const double> ps) {
    const ProfileLibrary lib = config.profile_library();
    const ChshSettings settings = chsh_settings(config.channels, lib);
    const SpectrumResponse rt(settings.r, settings.t), rs(settings.r, settings.s),
        qt(settings.q, settings.t), qs(settings.q, settings.s);
    auto row = [&](double p, const BipartiteDensity& rho) {
        const EntanglementVerdict v = ppt_classify(rho);
        const double spectrum =
            CorrelationReport::from_correlations(rt(rho), rs(rho), qt(rho), qs(rho),
                                                 CorrelationMethod::SpectrumIntegral)
                .chsh_value;
        return TheoryRow{p, chsh(rho, settings, CorrelationMethod::Analytic).chsh_value, spectrum,
                         v.entangled(), v.min_pt_eigenvalue};
    };
    std::vector<TheoryRow> rows;
    if (config.state.kind == StateSpec::Kind::Werner) {
        for (double p : ps) rows.push_back(row(p, werner_state(p)));
    } else {
        rows.push_back(row(std::numeric_limits<double>::quiet_NaN(), config.state.build()));
    }
    return rows;
}

std::string theory_csv(std::span<const TheoryRow> rows) {
    std::string out = "p,E_analytic,E_spectrum,ppt_entangled\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%s\n", r.p, r.e_analytic, r.e_spectrum,
                      r.ppt_entangled ? "true" : "false");
        out += buf;
    }
    return out;
}

std::vector<TheoryRow> read_theory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "p,E_analytic,E_spectrum,ppt_entangled")
        throw ValidationError(path.string() + ": unexpected header");
    std::vector<TheoryRow> rows;
    for (int n = 2; std::getline(in, line); ++n) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f[4];
        for (auto& s : f) std::getline(ls, s, ',');
        char* end = nullptr;
        TheoryRow r;
        double* dst[] = {&r.p, &r.e_analytic, &r.e_spectrum};
        for (int k = 0; k < 3; ++k) {
            *dst[k] = std::strtod(f[k].c_str(), &end);
            if (f[k].empty() || *end != '\0')
                throw ValidationError(path.string() + ":" + std::to_string(n) + ": bad number");
        }
        if (f[3] != "true" && f[3] != "false")
            throw ValidationError(path.string() + ":" + std::to_string(n) + ": bad flag");
        r.ppt_entangled = f[3] == "true";
        rows.push_back(r);
    }
    return rows;
}

std::string report_json(const RunReport& r) {
    json j{{"command", r.command},
           {"seed", r.seed},
           {"duration_seconds", r.duration_seconds},
           {"scenario", config_json(r.config)},
           {"entanglement", verdict_json(r.verdict)}};
    json hs = json::array();
    for (const auto& h : r.histograms) {
        hs.push_back({{"name", h.name},
                      {"first_setting", h.first_setting},
                      {"second_setting", h.second_setting},
                      {"csv", h.csv.string()},
                      {"sidecar", h.sidecar.string()},
                      {"total", h.total}});
    }
    j["histograms"] = hs;
    json tables = json::array();
    for (const auto& t : r.tables) tables.push_back(t.string());
    j["tables"] = tables;
    if (r.theory) j["theory"] = report_json_value(*r.theory);
    if (r.estimate) j["estimate"] = report_json_value(*r.estimate);
    if (r.command == "simulate") {
        json bp;
        for (Branch b : kBranches) bp[branch_name(b)] = r.branch_pairs[static_cast<int>(b)];
        j["branch_pairs"] = bp;
    }
    if (!r.sweep.empty()) {
        json rows = json::array();
        for (const auto& s : r.sweep) {
            rows.push_back({{"p", s.p},
                            {"E_analytic", s.e_analytic},
                            {"E_spectrum", s.e_spectrum},
                            {"ppt_entangled", s.ppt_entangled},
                            {"min_pt_eigenvalue", s.min_pt_eigenvalue}});
        }
        j["sweep"] = rows;
    }
    if (!r.spin.empty()) {
        json rows = json::array();
        for (const auto& s : r.spin) {
            rows.push_back({{"configuration", s.name},
                            {"first_setting", s.first_setting},
                            {"second_setting", s.second_setting},
                            {"cells", {"++", "+-", "-+", "--"}},
                            {"counts", s.counts},
                            {"expected_fractions", s.expected}});
        }
        j["spin_tables"] = rows;
    }
    if (r.tomography) {
        const auto& t = *r.tomography;
        const auto& rec = t.reconstruction;
        json entries = json::array();
        json known = json::array();
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const bool k = rec.known[4 * a + b];
                known.push_back(k);
                if (k) entries.push_back({rec.matrix(a, b).real(), rec.matrix(a, b).imag()});
                else entries.push_back(nullptr);
            }
        }
        json fits = json::array();
        for (const auto& f : t.fits) {
            fits.push_back({{"first_setting", f.first.label()},
                            {"second_setting", f.second.label()},
                            {"diag_coeffs", f.fit.coeffs},
                            {"residual", f.fit.residual},
                            {"constrained", f.fit.constrained}});
        }
        j["tomography"] = {{"required_pairs", t.required},
                           {"supplied_pairs", t.supplied},
                           {"missing_pairs", t.missing},
                           {"entries_re_im", entries},
                           {"known_mask", known},
                           {"complete", rec.complete()},
                           {"fits", fits}};
        if (t.p_hat) j["tomography"]["p_hat"] = *t.p_hat;
        if (rec.min_eigenvalue) j["tomography"]["min_eigenvalue"] = *rec.min_eigenvalue;
    }
    return j.dump(2) + "\n";
}

std::string report_csv(const RunReport& r) {
    const json flat = json::parse(report_json(r)).flatten();
    std::string out = "key,value\n";
    for (const auto& [key, value] : flat.items()) {
        std::string v = value.is_string() ? value.get<std::string>() : value.dump();
        if (v.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
            v = q + "\"";
        }
        out += key + "," + v + "\n";
    }
    return out;
}

fs::path write_report(RunReport& r) {
    fs::create_directories(r.config.output_dir);
    const bool csv = r.config.format == ReportFormat::Csv;
    r.report_path = r.config.output_dir / (csv ? "run_report.csv" : "run_report.json");
    write_text(r.report_path, csv ? report_csv(r) : report_json(r));
    return r.report_path;
}

RunReport cmd_theory(const ScenarioConfig& config) {
    const auto start = Clock::now();
    RunReport r = new_report("theory", config);
    OutputGuard guard(config.output_dir);

    const auto ps = config.theory.points();
    r.sweep = theory_sweep(config, ps);
    const fs::path csv = config.output_dir / "theory.csv";
    guard.track(csv);
    write_text(csv, theory_csv(r.sweep));
    r.tables.push_back(csv);

    const BipartiteDensity rho = config.state.build();
    const ProfileLibrary lib = config.profile_library();
    r.theory = chsh(rho, chsh_settings(config.channels, lib), CorrelationMethod::Analytic);
    r.verdict = ppt_classify(rho);
    r.duration_seconds = seconds_since(start);
    guard.track(write_report(r));
    guard.commit();
    return r;
}

RunReport cmd_simulate(const ScenarioConfig& config) {
    const auto start = Clock::now();
    RunReport r = new_report("simulate", config);
    OutputGuard guard(config.output_dir);

    const SimConfig sim = config.sim_config();
    const BranchTally tally = run_experiment(sim);
    r.branch_pairs = tally.pairs;
    for (Branch b : kBranches) {
        auto [p1, p2] = sim.branch_profiles(b);
        const HistogramMetadata meta{std::string("hist_") + branch_name(b), p1.setting().label(),
                                     p2.setting().label(), sim.seed, sim.n_pairs, sim.p_scatter};
        const HistogramArtifact a = write_histogram_artifact(config.output_dir, meta,
                                                             tally.histogram(b));
        guard.track(a);
        r.histograms.push_back(a);
    }

    const ProfileLibrary lib = config.profile_library();
    std::optional<ChshSettings> settings;
    try {
        settings.emplace(chsh_settings(config.channels, lib));
    } catch (const UsageError&) {
        // r == q or t == s: not a CHSH design.
    }
    if (settings) {
        r.theory = chsh(sim.state, *settings, CorrelationMethod::Analytic);
        const bool all_populated = std::all_of(tally.pairs.begin(), tally.pairs.end(),
                                               [](std::uint64_t n) { return n > 0; });
        if (all_populated) r.estimate = estimate_chsh(tally, sim, *settings);
    }
    r.verdict = ppt_classify(sim.state);
    r.duration_seconds = seconds_since(start);
    guard.track(write_report(r));
    guard.commit();
    return r;
}

RunReport cmd_spin_demo(const ScenarioConfig& config) {
    const auto start = Clock::now();
    if (config.state.kind != StateSpec::Kind::SpinCase && config.state.kind != StateSpec::Kind::Werner)
        throw ConfigError("[state] kind: spin-demo needs a spin_case or werner state");
    for (const char* label : {"Z", "X"}) {
        auto it = config.profiles.find(label);
        if (it == config.profiles.end()) continue;
        const auto type = it->second.type;
        if (type == ProfileSpec::Type::Gaussian || type == ProfileSpec::Type::Table)
            throw UsageError(std::string("spin-demo measures two-label outcomes; [profile.") +
                             label + "] is continuous");
    }

    RunReport r = new_report("spin-demo", config);
    OutputGuard guard(config.output_dir);
    const BipartiteDensity rho = config.state.build();
    const struct {
        const char* name;
        const char* first;
        const char* second;
    } configurations[] = {{"1z2z", "Z", "Z"}, {"1z2x", "Z", "X"}, {"1x2z", "X", "Z"}, {"1x2x", "X", "X"}};

    std::string table = "configuration,cell,count,expected_fraction\n";
    for (std::uint64_t k = 0; k < 4; ++k) {
        const auto& c = configurations[k];
        const SpectralProfile p1 = projective_profile(settings::by_label(c.first));
        const SpectralProfile p2 = projective_profile(settings::by_label(c.second));
        const Histogram2D h = measure_pair(rho, p1, p2, config, derived_seed(config.seed, k));

        SpinTable t{c.name, c.first, c.second, {}, diag_coefficients(rho, p1.setting(), p2.setting())};
        for (Outcome a : kOutcomes)
            for (Outcome b : kOutcomes)
                t.counts[pair_index(a, b)] =
                    h.count(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        for (int cell = 0; cell < 4; ++cell) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s,%s%s,%llu,%.17g\n", c.name,
                          outcome_symbol(static_cast<Outcome>(cell / 2)),
                          outcome_symbol(static_cast<Outcome>(cell % 2)),
                          static_cast<unsigned long long>(t.counts[cell]), t.expected[cell]);
            table += buf;
        }
        const HistogramMetadata meta{std::string("spin_") + c.name, c.first, c.second,
                                     derived_seed(config.seed, k), config.n_pairs, 1.0};
        const HistogramArtifact a = write_histogram_artifact(config.output_dir, meta, h);
        guard.track(a);
        r.histograms.push_back(a);
        r.spin.push_back(t);
    }
    const fs::path csv = config.output_dir / "spin_tables.csv";
    guard.track(csv);
    write_text(csv, table);
    r.tables.push_back(csv);

    r.theory = chsh(rho, ChshSettings(settings::z(), settings::x(), settings::z_plus_x(),
                                      settings::z_minus_x()),
                    CorrelationMethod::Analytic);
    r.verdict = ppt_classify(rho);
    r.duration_seconds = seconds_since(start);
    guard.track(write_report(r));
    guard.commit();
    return r;
}

std::vector<std::pair<std::string, std::string>> tomography_pairs() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const char* a : {"Z", "X", "Y"})
        for (const char* b : {"Z", "X", "Y"}) out.emplace_back(a, b);
    return out;
}

RunReport cmd_tomography(const ScenarioConfig& config) {
    const auto start = Clock::now();
    RunReport r = new_report("tomography", config);
    OutputGuard guard(config.output_dir);
    const ProfileLibrary lib = config.profile_library();
    const auto pairs = tomography_pairs();

    std::vector<Observation> observations;
    std::vector<std::string> supplied;
    switch (config.tomography.source) {
        case TomographySource::Exact: {
            const BipartiteDensity rho = config.state.build();
            for (const auto& [a, b] : pairs) {
                const SpectralProfile pa = lib.get(a);
                const SpectralProfile pb = lib.get(b);
                observations.push_back(observation_from_spectrum(joint_spectrum(rho, pa, pb), pa, pb));
                supplied.push_back(pair_name(a, b));
            }
            break;
        }
        case TomographySource::Simulate: {
            const BipartiteDensity rho = config.state.build();
            for (std::uint64_t k = 0; k < pairs.size(); ++k) {
                const auto& [a, b] = pairs[k];
                const SpectralProfile pa = lib.get(a);
                const SpectralProfile pb = lib.get(b);
                const std::uint64_t seed = derived_seed(config.seed, k);
                const Histogram2D h = measure_pair(rho, pa, pb, config, seed);
                const HistogramMetadata meta{"tomo_" + a + "_" + b, a, b, seed, config.n_pairs, 1.0};
                const HistogramArtifact art = write_histogram_artifact(config.output_dir, meta, h);
                guard.track(art);
                r.histograms.push_back(art);
                observations.push_back(observation_from_histogram(h, pa, pb));
                supplied.push_back(pair_name(a, b));
            }
            break;
        }
        case TomographySource::Files: {
            std::vector<fs::path> sidecars;
            for (const auto& e : fs::directory_iterator(config.tomography.input_dir))
                if (e.is_regular_file() && e.path().extension() == ".json") sidecars.push_back(e.path());
            std::sort(sidecars.begin(), sidecars.end());
            for (const auto& s : sidecars) {
                std::ifstream in(s);
                const json j = json::parse(in, nullptr, false);
                if (j.is_discarded() || !j.is_object() || j.value("kind", "") != "histogram") continue;
                const LoadedHistogram lh = read_histogram_artifact(s);
                const SpectralProfile pa = lib.get(lh.meta.first_setting);
                const SpectralProfile pb = lib.get(lh.meta.second_setting);
                observations.push_back(observation_from_histogram(lh.hist, pa, pb));
                supplied.push_back(pair_name(lh.meta.first_setting, lh.meta.second_setting));
            }
            break;
        }
    }

    ReconstructionResult empty{settings::z(), settings::z(), Matrix4c::Zero(), {}, {}, {}};
    TomographySummary summary{{}, {}, {}, {}, std::move(empty), {}};
    std::set<std::string> have(supplied.begin(), supplied.end());
    for (const auto& [a, b] : pairs) {
        summary.required.push_back(pair_name(a, b));
        if (!have.count(pair_name(a, b))) summary.missing.push_back(pair_name(a, b));
    }
    summary.supplied.assign(have.begin(), have.end());
    if (!have.count(pair_name("Z", "Z"))) {
        std::string msg = "tomography needs the (Z,Z) pair for the diagonal; required:";
        for (const auto& p : summary.required) msg += " (" + p + ")";
        msg += "; supplied:";
        if (summary.supplied.empty()) msg += " none";
        for (const auto& p : summary.supplied) msg += " (" + p + ")";
        throw UsageError(msg);
    }

    TomographyResult res =
        run_tomography(observations, settings::z(), settings::z(), config.tomography.model);
    summary.fits = std::move(res.fits);
    summary.reconstruction = std::move(res.reconstruction);
    if (summary.reconstruction.known[4 * 1 + 2])
        summary.p_hat = 2.0 * summary.reconstruction.matrix(1, 2).real();
    r.verdict = summary.reconstruction.verdict;
    r.tomography = std::move(summary);
    r.duration_seconds = seconds_since(start);
    guard.track(write_report(r));
    guard.commit();
    return r;
}

}  // namespace contbell

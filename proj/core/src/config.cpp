#include "contbell/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "contbell/errors.hpp"

namespace contbell {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"scenario", {"kind"}},
        {"state", {"kind", "product", "p", "case", "matrix", "matrix_imag"}},
        {"simulation", {"pairs", "p_scatter", "seed", "bins", "workers", "grid_points"}},
        {"channels",
         {"first_scattered", "first_unscattered", "second_scattered", "second_unscattered"}},
        {"profile", {"type", "center_plus", "center_minus", "width", "plus_file", "minus_file"}},
        {"theory", {"p_min", "p_max", "p_step", "refine_min", "refine_max", "refine_step"}},
        {"tomography", {"source", "input_dir", "model"}},
        {"output", {"dir", "format"}},
    };
    return keys;
}

const std::vector<std::string>& setting_labels() {
    static const std::vector<std::string> labels{"Z", "X", "ZpX", "ZmX", "Y"};
    return labels;
}

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    return s;
}

// Source line of each "section/key" (and of each bare section header).
class LineIndex {
public:
    explicit LineIndex(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string section;
        for (int n = 1; std::getline(in, line); ++n) {
            line = trim(line);
            if (line.empty() || line[0] == ';' || line[0] == '#') continue;
            if (line.front() == '[' && line.back() == ']') {
                section = trim(line.substr(1, line.size() - 2));
                lines_.emplace(section, n);
                sections_.push_back(section);
                continue;
            }
            const auto eq = line.find('=');
            if (eq != std::string::npos) lines_.emplace(section + "/" + trim(line.substr(0, eq)), n);
        }
    }

    int find(const std::string& section, const std::string& key = {}) const {
        auto it = lines_.find(key.empty() ? section : section + "/" + key);
        return it == lines_.end() ? 0 : it->second;
    }

    // Every header in file order; read_ini drops sections that have no keys.
    const std::vector<std::string>& sections() const { return sections_; }

private:
    std::map<std::string, int> lines_;
    std::vector<std::string> sections_;
};

class Reader {
public:
    Reader(std::string origin, const std::string& text, std::filesystem::path base)
        : origin_(std::move(origin)), lines_(text), base_(std::move(base)) {}

    const std::vector<std::string>& sections() const { return lines_.sections(); }

    [[noreturn]] void fail(const std::string& section, const std::string& key,
                           const std::string& msg) const {
        std::ostringstream os;
        os << origin_;
        if (int line = lines_.find(section, key)) os << ":" << line;
        os << ": [" << section << "]";
        if (!key.empty()) os << " " << key;
        os << ": " << msg;
        throw ConfigError(os.str());
    }

    std::string text(const std::string& /*section*/, const std::string& key,
                     const pt::ptree& sec) const {
        return trim(sec.get_child(pt::ptree::path_type(key, '\0')).data());
    }

    template <class T>
    T number(const std::string& section, const std::string& key, const pt::ptree& sec) const {
        const std::string s = text(section, key, sec);
        T value{};
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc() || ptr != s.data() + s.size())
            fail(section, key, "expected a number, got '" + s + "'");
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(value)) fail(section, key, "value must be finite");
        }
        return value;
    }

    std::vector<double> numbers(const std::string& section, const std::string& key,
                                const pt::ptree& sec) const {
        std::string s = text(section, key, sec);
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream in(s);
        std::vector<double> out;
        std::string tok;
        while (in >> tok) {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc() || ptr != tok.data() + tok.size())
                fail(section, key, "bad number '" + tok + "'");
            out.push_back(v);
        }
        return out;
    }

    std::filesystem::path path(const std::string& section, const std::string& key,
                               const pt::ptree& sec) const {
        std::filesystem::path p = text(section, key, sec);
        if (p.is_relative() && !base_.empty()) p = base_ / p;
        return p;
    }

    template <class E>
    E choice(const std::string& section, const std::string& key, const pt::ptree& sec,
             const std::vector<std::pair<std::string, E>>& options) const {
        const std::string s = text(section, key, sec);
        std::string allowed;
        for (const auto& [name, value] : options) {
            if (s == name) return value;
            allowed += (allowed.empty() ? "" : ", ") + name;
        }
        fail(section, key, "unknown value '" + s + "' (expected one of: " + allowed + ")");
    }

    void require_file(const std::string& section, const std::string& key,
                      const std::filesystem::path& p) const {
        if (!std::filesystem::is_regular_file(p)) fail(section, key, "file not found: " + p.string());
    }

    void require_label(const std::string& section, const std::string& key,
                       const std::string& label) const {
        const auto& labels = setting_labels();
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
            fail(section, key, "unknown measurement setting '" + label + "' (Z, X, ZpX, ZmX, Y)");
    }

private:
    std::string origin_;
    LineIndex lines_;
    std::filesystem::path base_;
};

void read_state(const Reader& r, const pt::ptree& sec, StateSpec& s) {
    const std::string S = "state";
    using K = StateSpec::Kind;
    if (sec.count("kind")) {
        s.kind = r.choice<K>(S, "kind", sec,
                             {{"product", K::Product},
                              {"werner", K::Werner},
                              {"spin_case", K::SpinCase},
                              {"custom_matrix", K::CustomMatrix}});
    }
    // Only the parameter belonging to the chosen kind may appear.
    const std::map<K, std::set<std::string>> params{{K::Product, {"product"}},
                                                    {K::Werner, {"p"}},
                                                    {K::SpinCase, {"case"}},
                                                    {K::CustomMatrix, {"matrix", "matrix_imag"}}};
    for (const auto& [key, value] : sec) {
        if (key != "kind" && !params.at(s.kind).count(key))
            r.fail(S, key, "not a parameter of the chosen state kind");
    }
    switch (s.kind) {
        case K::Product:
            if (sec.count("product"))
                s.product = r.choice<ProductState>(S, "product", sec,
                                                   {{"HH", ProductState::HH},
                                                    {"VV", ProductState::VV},
                                                    {"++", ProductState::PlusPlus},
                                                    {"--", ProductState::MinusMinus}});
            break;
        case K::Werner:
            if (sec.count("p")) s.p = r.number<double>(S, "p", sec);
            if (!(s.p >= 0.0 && s.p <= 1.0)) r.fail(S, "p", "Werner p must lie in [0, 1]");
            break;
        case K::SpinCase:
            if (sec.count("case"))
                s.spin = r.choice<SpinCase>(S, "case", sec,
                                            {{"I", SpinCase::I},
                                             {"II", SpinCase::II},
                                             {"III", SpinCase::III}});
            break;
        case K::CustomMatrix: {
            if (!sec.count("matrix")) r.fail(S, "matrix", "custom_matrix needs 16 entries");
            const auto re = r.numbers(S, "matrix", sec);
            if (re.size() != 16) r.fail(S, "matrix", "expected 16 entries, got " + std::to_string(re.size()));
            std::vector<double> im(16, 0.0);
            if (sec.count("matrix_imag")) {
                im = r.numbers(S, "matrix_imag", sec);
                if (im.size() != 16)
                    r.fail(S, "matrix_imag", "expected 16 entries, got " + std::to_string(im.size()));
            }
            for (int k = 0; k < 16; ++k) s.custom(k / 4, k % 4) = Complex(re[k], im[k]);
            try {
                (void)BipartiteDensity::in_reference(s.custom);
            } catch (const Error& e) {
                r.fail(S, "matrix", e.what());
            }
            break;
        }
    }
}

void read_profile(const Reader& r, const std::string& S, const pt::ptree& sec, ProfileSpec& p) {
    using T = ProfileSpec::Type;
    if (sec.count("type"))
        p.type = r.choice<T>(S, "type", sec,
                             {{"default", T::Default},
                              {"gaussian", T::Gaussian},
                              {"table", T::Table},
                              {"projective", T::Projective}});
    if (p.type == T::Gaussian) {
        for (const char* k : {"center_plus", "center_minus", "width"})
            if (!sec.count(k)) r.fail(S, k, "required for a gaussian profile");
        p.center_plus = r.number<double>(S, "center_plus", sec);
        p.center_minus = r.number<double>(S, "center_minus", sec);
        p.width = r.number<double>(S, "width", sec);
        if (!(p.width > 0.0)) r.fail(S, "width", "must be positive");
    }
    if (p.type == T::Table) {
        for (const char* k : {"plus_file", "minus_file"}) {
            if (!sec.count(k)) r.fail(S, k, "required for a table profile");
            r.require_file(S, k, r.path(S, k, sec));
        }
        p.plus_file = r.path(S, "plus_file", sec);
        p.minus_file = r.path(S, "minus_file", sec);
    }
}

}  // namespace

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::HdScattering: return "hd_scattering";
        case ScenarioKind::SpinDemo: return "spin_demo";
        case ScenarioKind::Custom: return "custom";
    }
    return "?";
}

const char* to_string(ReportFormat f) { return f == ReportFormat::Csv ? "csv" : "json"; }

const char* to_string(TomographySource s) {
    switch (s) {
        case TomographySource::Exact: return "exact";
        case TomographySource::Simulate: return "simulate";
        case TomographySource::Files: return "files";
    }
    return "?";
}

ReportFormat parse_report_format(const std::string& s) {
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw ConfigError("unknown report format '" + s + "' (csv or json)");
}

std::vector<double> TheoryGrid::points() const {
    std::vector<double> out;
    auto add_range = [&](double lo, double hi, double step) {
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    };
    add_range(p_min, p_max, p_step);
    if (refine_min && refine_max) add_range(*refine_min, *refine_max, refine_step);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              out.end());
    for (double& p : out) p = std::clamp(p, 0.0, 1.0);
    return out;
}

void ScenarioConfig::validate() const {
    if (n_pairs < 1) throw ConfigError("[simulation] pairs: must be >= 1");
    if (!(p_scatter >= 0.0 && p_scatter <= 1.0))
        throw ConfigError("[simulation] p_scatter: must lie in [0, 1]");
    if (bins < 1) throw ConfigError("[simulation] bins: must be >= 1");
    if (grid_points < 2) throw ConfigError("[simulation] grid_points: must be >= 2");
    if (!(theory.p_step > 0.0)) throw ConfigError("[theory] p_step: must be positive");
    if (!(theory.refine_step > 0.0)) throw ConfigError("[theory] refine_step: must be positive");
    if (theory.p_min < 0.0 || theory.p_max > 1.0 || theory.p_min > theory.p_max)
        throw ConfigError("[theory] p_min/p_max: need 0 <= p_min <= p_max <= 1");
    if (theory.refine_min.has_value() != theory.refine_max.has_value())
        throw ConfigError("[theory] refine_min/refine_max: give both or neither");
    if (tomography.source == TomographySource::Files &&
        !std::filesystem::is_directory(tomography.input_dir))
        throw ConfigError("[tomography] input_dir: directory not found: " +
                          tomography.input_dir.string());
    if (state.kind == StateSpec::Kind::Werner && !(state.p >= 0.0 && state.p <= 1.0))
        throw ConfigError("[state] p: Werner p must lie in [0, 1]");
    try {
        (void)profile_library();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("[profile] ") + e.what());
    }
}

ProfileLibrary ScenarioConfig::profile_library() const {
    ProfileLibrary lib(OutcomeSpace::continuous(0.0, 180.0, grid_points));
    for (const auto& [label, spec] : profiles) {
        const MeasurementSetting setting = settings::by_label(label);
        switch (spec.type) {
            case ProfileSpec::Type::Default: break;
            case ProfileSpec::Type::Gaussian:
                lib.set(gaussian_profile(setting, spec.center_plus, spec.center_minus, spec.width,
                                         lib.space()));
                break;
            case ProfileSpec::Type::Projective: lib.set(projective_profile(setting)); break;
            case ProfileSpec::Type::Table: {
                const auto plus = read_profile_table(spec.plus_file);
                const auto minus = read_profile_table(spec.minus_file);
                lib.set(tabulated_profile(setting, plus, minus, lib.space()));
                break;
            }
        }
    }
    return lib;
}

SimConfig ScenarioConfig::sim_config() const {
    SimConfig sim = make_sim_config(state.build(), channels, profile_library());
    sim.n_pairs = n_pairs;
    sim.p_scatter = p_scatter;
    sim.seed = seed;
    sim.bins = bins;
    sim.workers = workers;
    return sim;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string(), path.parent_path());
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin,
                                 const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream os;
        os << origin << ":" << e.line() << ": " << e.message();
        throw ConfigError(os.str());
    }

    const Reader r(origin, text, base_dir);
    for (const auto& name : r.sections()) {
        const std::string family = name.rfind("profile.", 0) == 0 ? "profile" : name;
        if (!known_keys().count(family)) r.fail(name, {}, "unknown section");
    }
    ScenarioConfig c;
    for (const auto& [name, sec] : tree) {
        if (sec.empty() && !sec.data().empty()) r.fail(name, {}, "key outside of any section");
        const bool is_profile = name.rfind("profile.", 0) == 0;
        const std::string family = is_profile ? "profile" : name;
        const auto known = known_keys().find(family);
        if (known == known_keys().end()) r.fail(name, {}, "unknown section");
        for (const auto& [key, value] : sec) {
            if (!value.empty()) r.fail(name, key, "nested keys are not supported");
            if (!known->second.count(key)) r.fail(name, key, "unknown key");
        }

        if (name == "scenario") {
            if (sec.count("kind"))
                c.scenario = r.choice<ScenarioKind>(name, "kind", sec,
                                                    {{"hd_scattering", ScenarioKind::HdScattering},
                                                     {"spin_demo", ScenarioKind::SpinDemo},
                                                     {"custom", ScenarioKind::Custom}});
        } else if (name == "state") {
            read_state(r, sec, c.state);
        } else if (name == "simulation") {
            if (sec.count("pairs")) c.n_pairs = r.number<std::uint64_t>(name, "pairs", sec);
            if (sec.count("p_scatter")) c.p_scatter = r.number<double>(name, "p_scatter", sec);
            if (sec.count("seed")) c.seed = r.number<std::uint64_t>(name, "seed", sec);
            if (sec.count("bins")) c.bins = r.number<std::size_t>(name, "bins", sec);
            if (sec.count("workers")) c.workers = r.number<unsigned>(name, "workers", sec);
            if (sec.count("grid_points"))
                c.grid_points = r.number<std::size_t>(name, "grid_points", sec);
            if (c.n_pairs < 1) r.fail(name, "pairs", "must be >= 1");
            if (!(c.p_scatter >= 0.0 && c.p_scatter <= 1.0))
                r.fail(name, "p_scatter", "must lie in [0, 1]");
            if (c.bins < 1) r.fail(name, "bins", "must be >= 1");
            if (c.grid_points < 2) r.fail(name, "grid_points", "must be >= 2");
        } else if (name == "channels") {
            std::string* slots[] = {&c.channels.first_scattered, &c.channels.first_unscattered,
                                    &c.channels.second_scattered, &c.channels.second_unscattered};
            const char* keys[] = {"first_scattered", "first_unscattered", "second_scattered",
                                  "second_unscattered"};
            for (int k = 0; k < 4; ++k) {
                if (!sec.count(keys[k])) continue;
                *slots[k] = r.text(name, keys[k], sec);
                r.require_label(name, keys[k], *slots[k]);
            }
        } else if (is_profile) {
            const std::string label = name.substr(8);
            r.require_label(name, {}, label);
            read_profile(r, name, sec, c.profiles[label]);
        } else if (name == "theory") {
            auto& g = c.theory;
            if (sec.count("p_min")) g.p_min = r.number<double>(name, "p_min", sec);
            if (sec.count("p_max")) g.p_max = r.number<double>(name, "p_max", sec);
            if (sec.count("p_step")) g.p_step = r.number<double>(name, "p_step", sec);
            if (sec.count("refine_min")) g.refine_min = r.number<double>(name, "refine_min", sec);
            if (sec.count("refine_max")) g.refine_max = r.number<double>(name, "refine_max", sec);
            if (sec.count("refine_step"))
                g.refine_step = r.number<double>(name, "refine_step", sec);
            if (!(g.p_step > 0.0)) r.fail(name, "p_step", "must be positive");
            if (!(g.refine_step > 0.0)) r.fail(name, "refine_step", "must be positive");
        } else if (name == "tomography") {
            auto& t = c.tomography;
            if (sec.count("source"))
                t.source = r.choice<TomographySource>(name, "source", sec,
                                                      {{"exact", TomographySource::Exact},
                                                       {"simulate", TomographySource::Simulate},
                                                       {"files", TomographySource::Files}});
            if (sec.count("model"))
                t.model = r.choice<AmplitudeModel>(name, "model", sec,
                                                   {{"general", AmplitudeModel::General},
                                                    {"real", AmplitudeModel::Real}});
            if (sec.count("input_dir")) {
                t.input_dir = r.path(name, "input_dir", sec);
                if (!std::filesystem::is_directory(t.input_dir))
                    r.fail(name, "input_dir", "directory not found: " + t.input_dir.string());
            }
            if (t.source == TomographySource::Files && t.input_dir.empty())
                r.fail(name, "input_dir", "required when source = files");
        } else if (name == "output") {
            if (sec.count("dir")) c.output_dir = r.path(name, "dir", sec);
            if (sec.count("format"))
                c.format = r.choice<ReportFormat>(name, "format", sec,
                                                  {{"csv", ReportFormat::Csv},
                                                   {"json", ReportFormat::Json}});
        }
    }
    c.validate();
    return c;
}

void apply_overrides(ScenarioConfig& config, const ConfigOverrides& o) {
    if (o.seed) config.seed = *o.seed;
    if (o.pairs) config.n_pairs = *o.pairs;
    if (o.bins) config.bins = *o.bins;
    if (o.p_scatter) config.p_scatter = *o.p_scatter;
    if (o.output_dir) config.output_dir = *o.output_dir;
    if (o.format) config.format = *o.format;
    config.validate();
}

}  // namespace contbell

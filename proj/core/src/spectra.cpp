#include "contbell/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "contbell/errors.hpp"

namespace contbell {

namespace {

constexpr double kNormTol = 1e-9;

void check_grid(std::span<const double> f, std::size_t expected, const char* what) {
    if (f.size() != expected) {
        std::ostringstream os;
        os << what << ": tabulated function has " << f.size() << " values, grid has " << expected;
        throw UsageError(os.str());
    }
}

void validate_distribution(const std::vector<double>& d, const OutcomeSpace& space,
                           const std::string& which) {
    check_grid(d, space.size(), "spectral profile");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i]) || d[i] < 0.0) {
            std::ostringstream os;
            os << "profile '" << which << "' has invalid value " << d[i] << " at index " << i;
            throw ValidationError(os.str());
        }
    }
    const double total = quadrature(d, space);
    if (std::abs(total - 1.0) > kNormTol) {
        std::ostringstream os;
        os << "profile '" << which << "' integrates to " << std::setprecision(12) << total
           << ", expected 1";
        throw ValidationError(os.str());
    }
}

std::vector<double> scaled_to_unit(std::vector<double> d, const OutcomeSpace& space,
                                   const std::string& which) {
    check_grid(d, space.size(), "spectral profile");
    const double total = quadrature(d, space);
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw ValidationError("profile '" + which + "' has zero or non-finite total weight");
    }
    for (double& v : d) v /= total;
    return d;
}

// Lists every offending entry of a user table, empty if the table is valid.
std::vector<std::string> table_problems(std::span<const TableSample> t, const OutcomeSpace& space,
                                        const char* which) {
    std::vector<std::string> problems;
    auto note = [&](std::size_t i, const std::string& msg) {
        std::ostringstream os;
        os << which << "[" << i << "] (angle " << t[i].angle << ", density " << t[i].density
           << "): " << msg;
        problems.push_back(os.str());
    };
    if (t.size() < 2) {
        problems.push_back(std::string(which) + ": need at least 2 samples");
        return problems;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i].angle) || !std::isfinite(t[i].density)) note(i, "not finite");
        if (t[i].density < 0.0) note(i, "negative density");
        if (t[i].angle < space.lo() || t[i].angle > space.hi()) note(i, "angle outside range");
        if (i > 0 && !(t[i].angle > t[i - 1].angle)) note(i, "angle not strictly increasing");
    }
    return problems;
}

std::vector<double> resample(std::span<const TableSample> t, const OutcomeSpace& space) {
    std::vector<double> out(space.size(), 0.0);
    const auto& nodes = space.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double x = nodes[k];
        if (x < t.front().angle || x > t.back().angle) continue;
        auto hi = std::upper_bound(t.begin(), t.end(), x,
                                   [](double v, const TableSample& s) { return v < s.angle; });
        if (hi == t.end()) {
            out[k] = t.back().density;
            continue;
        }
        auto lo = std::prev(hi);
        const double frac = (x - lo->angle) / (hi->angle - lo->angle);
        out[k] = lo->density + frac * (hi->density - lo->density);
    }
    return out;
}

}  // namespace

OutcomeSpace OutcomeSpace::continuous(double lo, double hi, std::size_t grid_points) {
    if (!(lo < hi)) throw UsageError("continuous outcome space requires lo < hi");
    if (grid_points < 3) throw UsageError("continuous outcome space requires at least 3 grid points");
    OutcomeSpace s;
    s.kind_ = Kind::ContinuousInterval;
    s.lo_ = lo;
    s.hi_ = hi;
    s.step_ = (hi - lo) / static_cast<double>(grid_points - 1);
    s.nodes_.resize(grid_points);
    s.weights_.assign(grid_points, s.step_);
    for (std::size_t i = 0; i < grid_points; ++i)
        s.nodes_[i] = lo + s.step_ * static_cast<double>(i);
    s.nodes_.back() = hi;
    s.weights_.front() = s.weights_.back() = 0.5 * s.step_;
    return s;
}

OutcomeSpace OutcomeSpace::discrete(std::vector<std::string> labels) {
    if (labels.empty()) throw UsageError("discrete outcome space requires at least one label");
    std::set<std::string> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) throw UsageError("duplicate outcome label '" + l + "'");
    }
    OutcomeSpace s;
    s.kind_ = Kind::DiscreteLabels;
    s.labels_ = std::move(labels);
    s.weights_.assign(s.labels_.size(), 1.0);
    return s;
}

OutcomeSpace OutcomeSpace::two_label() { return discrete({"+", "-"}); }

std::size_t OutcomeSpace::label_index(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw UsageError("unknown outcome label '" + label + "'");
    return static_cast<std::size_t>(it - labels_.begin());
}

bool operator==(const OutcomeSpace& a, const OutcomeSpace& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == OutcomeSpace::Kind::DiscreteLabels) return a.labels_ == b.labels_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.nodes_.size() == b.nodes_.size();
}

double quadrature(std::span<const double> f, const OutcomeSpace& space) {
    check_grid(f, space.size(), "quadrature");
    const auto& w = space.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
    return sum;
}

double quadrature(std::span<const double> f, const OutcomeSpace& a, const OutcomeSpace& b) {
    check_grid(f, a.size() * b.size(), "quadrature");
    const auto& wa = a.weights();
    const auto& wb = b.weights();
    const std::size_t nb = b.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double row = 0.0;
        const double* fi = f.data() + i * nb;
        for (std::size_t j = 0; j < nb; ++j) row += wb[j] * fi[j];
        sum += wa[i] * row;
    }
    return sum;
}

double interpolate(const OutcomeSpace& space, std::span<const double> values, double x) {
    if (!space.is_continuous()) throw UsageError("interpolate requires a continuous outcome space");
    check_grid(values, space.size(), "interpolate");
    if (x < space.lo() || x > space.hi()) return 0.0;
    const double t = (x - space.lo()) / space.step();
    std::size_t i = static_cast<std::size_t>(t);
    if (i >= values.size() - 1) i = values.size() - 2;
    const double frac = t - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

SpectralProfile::SpectralProfile(MeasurementSetting setting, OutcomeSpace space,
                                 std::vector<double> plus, std::vector<double> minus)
    : setting_(std::move(setting)),
      space_(std::move(space)),
      plus_(std::move(plus)),
      minus_(std::move(minus)) {
    validate_distribution(plus_, space_, setting_.label() + "+");
    validate_distribution(minus_, space_, setting_.label() + "-");
}

SpectralProfile SpectralProfile::normalized(MeasurementSetting setting, OutcomeSpace space,
                                            std::vector<double> plus, std::vector<double> minus) {
    auto p = scaled_to_unit(std::move(plus), space, setting.label() + "+");
    auto m = scaled_to_unit(std::move(minus), space, setting.label() + "-");
    return SpectralProfile(std::move(setting), std::move(space), std::move(p), std::move(m));
}

SpectralProfile SpectralProfile::relabeled() const {
    Matrix2c swapped;
    swapped.row(0) = setting_.coeffs().row(1);
    swapped.row(1) = setting_.coeffs().row(0);
    auto s = MeasurementSetting::from_coefficients(setting_.label() + "~", swapped);
    return SpectralProfile(std::move(s), space_, minus_, plus_);
}

SpectralProfile gaussian_profile(const MeasurementSetting& setting, double center_plus,
                                 double center_minus, double width, const OutcomeSpace& space) {
    if (!space.is_continuous()) throw UsageError("gaussian_profile requires a continuous space");
    if (!(width > 0.0)) throw UsageError("gaussian_profile requires width > 0");
    const auto& x = space.nodes();
    std::vector<double> plus(x.size()), minus(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dp = (x[i] - center_plus) / width;
        const double dm = (x[i] - center_minus) / width;
        plus[i] = std::exp(-dp * dp);
        minus[i] = std::exp(-dm * dm);
    }
    return SpectralProfile::normalized(setting, space, std::move(plus), std::move(minus));
}

SpectralProfile tabulated_profile(const MeasurementSetting& setting,
                                  std::span<const TableSample> samples_plus,
                                  std::span<const TableSample> samples_minus,
                                  const OutcomeSpace& space) {
    if (!space.is_continuous()) throw UsageError("tabulated_profile requires a continuous space");
    auto problems = table_problems(samples_plus, space, "plus");
    auto more = table_problems(samples_minus, space, "minus");
    problems.insert(problems.end(), more.begin(), more.end());
    if (!problems.empty()) {
        std::ostringstream os;
        os << "invalid profile table:";
        for (const auto& p : problems) os << "\n  " << p;
        throw ValidationError(os.str());
    }
    return SpectralProfile::normalized(setting, space, resample(samples_plus, space),
                                       resample(samples_minus, space));
}

std::vector<TableSample> read_profile_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open profile table '" + path.string() + "'");
    std::vector<TableSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        TableSample s;
        std::string extra;
        if (!(ls >> s.angle >> s.density) || (ls >> extra)) {
            std::ostringstream os;
            os << path.string() << ":" << lineno << ": expected 'angle_degrees density'";
            throw ValidationError(os.str());
        }
        out.push_back(s);
    }
    return out;
}

void write_profile_table(const std::filesystem::path& path, const OutcomeSpace& space,
                         std::span<const double> density) {
    if (!space.is_continuous()) throw UsageError("profile tables are for continuous spaces");
    check_grid(density, space.size(), "write_profile_table");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write profile table '" + path.string() + "'");
    out << "# angle_degrees density\n" << std::setprecision(17);
    for (std::size_t i = 0; i < density.size(); ++i)
        out << space.nodes()[i] << ' ' << density[i] << '\n';
}

SpectralProfile discrete_profile(const MeasurementSetting& setting, const OutcomeSpace& space,
                                 std::vector<double> pmf_plus, std::vector<double> pmf_minus) {
    if (space.is_continuous()) throw UsageError("discrete_profile requires a label space");
    return SpectralProfile(setting, space, std::move(pmf_plus), std::move(pmf_minus));
}

SpectralProfile projective_profile(const MeasurementSetting& setting) {
    return discrete_profile(setting, OutcomeSpace::two_label(), {1.0, 0.0}, {0.0, 1.0});
}

std::array<double, 4> diag_coefficients(const BipartiteDensity& rho,
                                        const MeasurementSetting& first,
                                        const MeasurementSetting& second) {
    const BipartiteDensity t = transform_density(rho, first, second);
    std::array<double, 4> a{};
    for (int k = 0; k < 4; ++k) a[k] = std::max(0.0, t.matrix()(k, k).real());
    const double total = a[0] + a[1] + a[2] + a[3];
    for (double& v : a) v /= total;
    return a;
}

JointSpectrum joint_spectrum(const BipartiteDensity& rho, const SpectralProfile& first,
                             const SpectralProfile& second) {
    JointSpectrum js{first.setting(), second.setting(), first.space(), second.space(), {}, {}};
    js.diag_coeffs = diag_coefficients(rho, first.setting(), second.setting());
    const std::size_t n1 = first.space().size();
    const std::size_t n2 = second.space().size();
    js.density.assign(n1 * n2, 0.0);

    // Marginal mixtures per first-channel eigenstate: row_j1(x2) =
    // sum_{j2} A^{j1 j2} S_{j2}(x2), then density = sum_{j1} S_{j1}(x1) row_j1(x2).
    for (Outcome j1 : kOutcomes) {
        std::vector<double> row(n2, 0.0);
        for (Outcome j2 : kOutcomes) {
            const double a = js.diag_coeffs[pair_index(j1, j2)];
            const auto& s2 = second.dist(j2);
            for (std::size_t j = 0; j < n2; ++j) row[j] += a * s2[j];
        }
        const auto& s1 = first.dist(j1);
        for (std::size_t i = 0; i < n1; ++i) {
            const double w = s1[i];
            if (w == 0.0) continue;
            double* out = js.density.data() + i * n2;
            for (std::size_t j = 0; j < n2; ++j) out[j] += w * row[j];
        }
    }
    return js;
}

}  // namespace contbell

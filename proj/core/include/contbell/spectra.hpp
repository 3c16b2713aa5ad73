#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "contbell/quantum_core.hpp"

namespace contbell {

/// Domain of a single-particle measurement result: either a continuous
/// angular interval sampled on a uniform grid, or a finite label set.
class OutcomeSpace {
public:
    enum class Kind { ContinuousInterval, DiscreteLabels };

    static constexpr std::size_t kDefaultGridPoints = 1801;

    static OutcomeSpace continuous(double lo = 0.0, double hi = 180.0,
                                   std::size_t grid_points = kDefaultGridPoints);
    static OutcomeSpace discrete(std::vector<std::string> labels);
    // {"+", "-"}
    static OutcomeSpace two_label();

    Kind kind() const noexcept { return kind_; }
    bool is_continuous() const noexcept { return kind_ == Kind::ContinuousInterval; }
    std::size_t size() const noexcept { return weights_.size(); }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double step() const noexcept { return step_; }
    // Grid node positions (continuous only).
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    // Composite-trapezoid weights for continuous spaces, 1 for labels.
    const std::vector<double>& weights() const noexcept { return weights_; }

    std::size_t label_index(const std::string& label) const;

    friend bool operator==(const OutcomeSpace& a, const OutcomeSpace& b);

private:
    OutcomeSpace() = default;

    Kind kind_ = Kind::ContinuousInterval;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double step_ = 0.0;
    std::vector<double> nodes_;
    std::vector<std::string> labels_;
    std::vector<double> weights_;
};

// Trapezoid integral (continuous) or plain sum (discrete) of f tabulated on
// the space's grid.
double quadrature(std::span<const double> f, const OutcomeSpace& space);
// Same over a product space, f stored row-major (first index = space a).
double quadrature(std::span<const double> f, const OutcomeSpace& a, const OutcomeSpace& b);

// Piecewise-linear interpolation of grid values at x; zero outside [lo, hi].
double interpolate(const OutcomeSpace& space, std::span<const double> values, double x);

/// Outcome distributions of the two eigenstates of one measurement setting.
/// Each distribution is nonnegative and integrates (sums) to 1 within 1e-9.
class SpectralProfile {
public:
    SpectralProfile(MeasurementSetting setting, OutcomeSpace space, std::vector<double> plus,
                    std::vector<double> minus);

    // Rescales both tables to unit integral before validating.
    static SpectralProfile normalized(MeasurementSetting setting, OutcomeSpace space,
                                      std::vector<double> plus, std::vector<double> minus);

    const MeasurementSetting& setting() const noexcept { return setting_; }
    const OutcomeSpace& space() const noexcept { return space_; }
    const std::vector<double>& dist(Outcome o) const noexcept {
        return o == Outcome::Plus ? plus_ : minus_;
    }
    const std::vector<double>& plus() const noexcept { return plus_; }
    const std::vector<double>& minus() const noexcept { return minus_; }

    // The same profile with the two eigenstate tables exchanged.
    SpectralProfile relabeled() const;

private:
    MeasurementSetting setting_;
    OutcomeSpace space_;
    std::vector<double> plus_;
    std::vector<double> minus_;
};

// f_pm(theta) proportional to exp[-(theta - center_pm)^2 / width^2],
// truncated to [lo, hi] and renormalized there.
SpectralProfile gaussian_profile(const MeasurementSetting& setting, double center_plus,
                                 double center_minus, double width, const OutcomeSpace& space);

struct TableSample {
    double angle = 0.0;
    double density = 0.0;
};

// Linear interpolation of user tables onto the space's grid (zero outside
// the table's angular range), then renormalized.
SpectralProfile tabulated_profile(const MeasurementSetting& setting,
                                  std::span<const TableSample> samples_plus,
                                  std::span<const TableSample> samples_minus,
                                  const OutcomeSpace& space = OutcomeSpace::continuous());

// Two-column "angle_degrees density" text, '#' comments and blank lines
// ignored. One file per eigenstate.
std::vector<TableSample> read_profile_table(const std::filesystem::path& path);
void write_profile_table(const std::filesystem::path& path, const OutcomeSpace& space,
                         std::span<const double> density);

// Probability vectors over the space's labels.
SpectralProfile discrete_profile(const MeasurementSetting& setting, const OutcomeSpace& space,
                                 std::vector<double> pmf_plus, std::vector<double> pmf_minus);
// Projective measurement: '+' -> (1, 0), '-' -> (0, 1).
SpectralProfile projective_profile(const MeasurementSetting& setting);

// Weights A^{j1 j2} = <phi^{j1} phi^{j2}| rho |phi^{j1} phi^{j2}> in
// pair_index order (++, +-, -+, --).
std::array<double, 4> diag_coefficients(const BipartiteDensity& rho,
                                        const MeasurementSetting& first,
                                        const MeasurementSetting& second);

/// Joint outcome density of a bipartite state under a measurement pair.
struct JointSpectrum {
    MeasurementSetting first_setting;
    MeasurementSetting second_setting;
    OutcomeSpace first_space;
    OutcomeSpace second_space;
    // Row-major, first_space.size() x second_space.size().
    std::vector<double> density;
    std::array<double, 4> diag_coeffs{};

    double at(std::size_t i, std::size_t j) const { return density[i * second_space.size() + j]; }
    double total() const { return quadrature(density, first_space, second_space); }
};

// S(x1, x2) = sum_{j1 j2} A^{j1 j2} S_{j1}(x1) S_{j2}(x2).
JointSpectrum joint_spectrum(const BipartiteDensity& rho, const SpectralProfile& first,
                             const SpectralProfile& second);

}  // namespace contbell

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contbell/histogram.hpp"
#include "contbell/quantum_core.hpp"
#include "contbell/spectra.hpp"

namespace contbell {

/// Diagonal weights A^{j1 j2} (pair_index order) fitted to an observed joint
/// spectrum by minimising
///   D(A) = integral of [S_obs - sum A^{j1 j2} S_{j1} S_{j2}]^2
/// over the probability simplex.
struct DiagonalFit {
    std::array<double, 4> coeffs{};
    double residual = 0.0;  // D at the optimum
    bool constrained = false;  // nonnegativity constraints were active
};

// `observed` is tabulated on first.space() x second.space(), row-major.
// Throws DegenerateBasis when the product basis Gram matrix is singular.
DiagonalFit fit_diagonal(std::span<const double> observed, const SpectralProfile& first,
                         const SpectralProfile& second);

// D(A) for arbitrary weights, with the same quadrature as the fit.
double fit_objective(std::span<const double> observed, const SpectralProfile& first,
                     const SpectralProfile& second, const std::array<double, 4>& coeffs);

/// Observed joint data ready for fit_diagonal. Histogram input is turned
/// into cell probabilities, with each continuous profile replaced by its
/// per-bin probability masses.
struct Observation {
    SpectralProfile first;
    SpectralProfile second;
    std::vector<double> values;
};

Observation observation_from_spectrum(const JointSpectrum& joint, const SpectralProfile& first,
                                      const SpectralProfile& second);
Observation observation_from_histogram(const Histogram2D& hist, const SpectralProfile& first,
                                       const SpectralProfile& second);

// Probability mass of each bin under the profile's piecewise-linear density.
SpectralProfile binned_profile(const SpectralProfile& profile, const HistogramAxis& axis);

struct MeasuredPair {
    MeasurementSetting first;
    MeasurementSetting second;
    DiagonalFit fit;
};

// Real: imaginary parts of every entry are taken to be zero, which is the
// case for states with real amplitudes in the reference basis.
enum class AmplitudeModel { General, Real };

/// Off-diagonal entries of rho in a target product basis, with a mask of
/// which ones the supplied measurement pairs determine.
struct OffDiagonalEstimate {
    MeasurementSetting first;
    MeasurementSetting second;
    Matrix4c values = Matrix4c::Zero();
    std::array<bool, 16> known{};  // row-major; the diagonal is never set here

    bool is_known(int row, int col) const { return known[4 * row + col]; }
};

// Inverts the basis-change relation rho_{q,s} = (a (x) a') rho_{r,t} (...)^dagger
// restricted to its diagonal, by least squares over all supplied pairs.
// Each measurement setting must satisfy a^{+-} + a^{-+} = 0 relative to the
// target setting of its channel; otherwise ConditionViolated.
OffDiagonalEstimate recover_offdiagonal(std::span<const MeasuredPair> fits,
                                        const MeasurementSetting& target_first,
                                        const MeasurementSetting& target_second,
                                        AmplitudeModel model = AmplitudeModel::General);

struct ReconstructionResult {
    MeasurementSetting first;
    MeasurementSetting second;
    Matrix4c matrix = Matrix4c::Zero();
    std::array<bool, 16> known{};
    // Set only when every entry is known; absent means "Undetermined".
    std::optional<EntanglementVerdict> verdict;
    std::optional<double> min_eigenvalue;

    bool complete() const;
    BipartiteDensity density() const;  // requires complete()
};

constexpr double kReconstructionPsdTolerance = 1e-8;

// Throws InconsistentData when a complete matrix has an eigenvalue below
// -kReconstructionPsdTolerance.
ReconstructionResult reconstruct(const DiagonalFit& diag, const OffDiagonalEstimate& offdiag,
                                 double ppt_tolerance = 1e-10);

/// Full pipeline over a set of observed measurement pairs.
struct TomographyResult {
    std::vector<MeasuredPair> fits;
    OffDiagonalEstimate offdiag;
    ReconstructionResult reconstruction;
};

TomographyResult run_tomography(std::span<const Observation> observations,
                                const MeasurementSetting& target_first,
                                const MeasurementSetting& target_second,
                                AmplitudeModel model = AmplitudeModel::General);

}  // namespace contbell

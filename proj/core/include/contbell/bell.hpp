#pragma once

#include <optional>
#include <vector>

#include "contbell/histogram.hpp"
#include "contbell/quantum_core.hpp"
#include "contbell/spectra.hpp"

namespace contbell {

/// Inner products of the two eigenstate spectra of one setting.
struct OverlapMoments {
    double plus_plus = 0.0;    // int S+ S+
    double plus_minus = 0.0;   // int S+ S-
    double minus_minus = 0.0;  // int S- S-
};

/// Dual functions v+ and v- of a spectral profile:
///   v_pm(x) = (S_pm(x) - int S+ S-) / (int S_pm S_pm - int S+ S-),
/// so that int v_pm S_pm = 1 and int v_pm S_mp = 0.
struct AuxFunction {
    MeasurementSetting setting;
    OutcomeSpace space;
    std::vector<double> v_plus;
    std::vector<double> v_minus;
    OverlapMoments overlap;

    // v+ - v- at grid node / label index i.
    double difference_at_node(std::size_t i) const { return v_plus[i] - v_minus[i]; }
    // v+ - v- at an arbitrary angle (continuous spaces only).
    double difference_at(double x) const;
};

// Throws SpectraIndistinguishable when either denominator is below 1e-12.
AuxFunction build_aux(const SpectralProfile& profile);

/// V(x1, x2) = [v1+(x1) - v1-(x1)] [v2+(x2) - v2-(x2)], row-major.
struct AuxKernel {
    OutcomeSpace first_space;
    OutcomeSpace second_space;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * second_space.size() + j]; }
};

AuxKernel aux_kernel(const AuxFunction& first, const AuxFunction& second);

// E(r,t) = double integral of S(x1,x2) V(x1,x2).
double correlation_from_spectrum(const JointSpectrum& joint, const AuxFunction& first,
                                 const AuxFunction& second);

// E(r,t) = A++ + A-- - A+- - A-+ from the exact diagonal weights.
double correlation_analytic(const BipartiteDensity& rho, const MeasurementSetting& first,
                            const MeasurementSetting& second);

// E_hat = sum over cells of (count / N) V(bin centre 1, bin centre 2);
// discrete axes use the label's own v values.
double correlation_from_histogram(const Histogram2D& hist, const AuxFunction& first,
                                  const AuxFunction& second);

enum class CorrelationMethod { Analytic, SpectrumIntegral, BinnedEstimate };

const char* to_string(CorrelationMethod m);

/// One measurement choice of a CHSH test, optionally with the profile of
/// its outcomes (needed by the spectrum-integral route).
struct ChshChannel {
    MeasurementSetting setting;
    std::optional<SpectralProfile> profile;

    ChshChannel(MeasurementSetting s) : setting(std::move(s)) {}  // NOLINT: implicit by design
    ChshChannel(SpectralProfile p) : setting(p.setting()), profile(std::move(p)) {}  // NOLINT
};

/// Settings r, q for channel I and t, s for channel II.
struct ChshSettings {
    ChshChannel r;
    ChshChannel q;
    ChshChannel t;
    ChshChannel s;

    ChshSettings(ChshChannel r_, ChshChannel q_, ChshChannel t_, ChshChannel s_);
};

/// Four correlations and E = |E(r,t) + E(r,s) + E(q,s) - E(q,t)|.
struct CorrelationReport {
    double e_rt = 0.0;
    double e_rs = 0.0;
    double e_qt = 0.0;
    double e_qs = 0.0;
    double chsh_value = 0.0;
    bool violated = false;
    CorrelationMethod method = CorrelationMethod::Analytic;

    static CorrelationReport from_correlations(double e_rt, double e_rs, double e_qt, double e_qs,
                                               CorrelationMethod method);
};

// Analytic or SpectrumIntegral; binned estimates come from estimate_chsh.
CorrelationReport chsh(const BipartiteDensity& rho, const ChshSettings& settings,
                       CorrelationMethod method);

}  // namespace contbell

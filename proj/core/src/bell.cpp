#include "contbell/bell.hpp"

#include <cmath>
#include <sstream>

#include "contbell/errors.hpp"

namespace contbell {

namespace {

constexpr double kDenominatorFloor = 1e-12;

double inner(const std::vector<double>& a, const std::vector<double>& b, const OutcomeSpace& s) {
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return quadrature(prod, s);
}

std::vector<double> differences(const AuxFunction& a) {
    std::vector<double> d(a.v_plus.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.difference_at_node(i);
    return d;
}

// v+ - v- evaluated on each histogram cell of an axis.
std::vector<double> differences_on_axis(const HistogramAxis& axis, const AuxFunction& aux) {
    std::vector<double> d(axis.size());
    if (axis.is_continuous()) {
        if (!aux.space.is_continuous())
            throw UsageError("continuous histogram axis paired with a discrete auxiliary function");
        for (std::size_t b = 0; b < d.size(); ++b) d[b] = aux.difference_at(axis.center(b));
    } else {
        if (aux.space.is_continuous())
            throw UsageError("labeled histogram axis paired with a continuous auxiliary function");
        for (std::size_t b = 0; b < d.size(); ++b)
            d[b] = aux.difference_at_node(aux.space.label_index(axis.labels()[b]));
    }
    return d;
}

double correlation_for(const BipartiteDensity& rho, const ChshChannel& a, const ChshChannel& b,
                       CorrelationMethod method) {
    if (method == CorrelationMethod::Analytic) return correlation_analytic(rho, a.setting, b.setting);
    if (!a.profile || !b.profile)
        throw UsageError("spectrum-integral CHSH requires a profile for every setting");
    const JointSpectrum js = joint_spectrum(rho, *a.profile, *b.profile);
    return correlation_from_spectrum(js, build_aux(*a.profile), build_aux(*b.profile));
}

}  // namespace

double AuxFunction::difference_at(double x) const {
    const double vp = interpolate(space, v_plus, x);
    const double vm = interpolate(space, v_minus, x);
    return vp - vm;
}

AuxFunction build_aux(const SpectralProfile& profile) {
    const auto& s = profile.space();
    OverlapMoments m;
    m.plus_plus = inner(profile.plus(), profile.plus(), s);
    m.plus_minus = inner(profile.plus(), profile.minus(), s);
    m.minus_minus = inner(profile.minus(), profile.minus(), s);

    const double den_plus = m.plus_plus - m.plus_minus;
    const double den_minus = m.minus_minus - m.plus_minus;
    if (std::abs(den_plus) < kDenominatorFloor || std::abs(den_minus) < kDenominatorFloor) {
        std::ostringstream os;
        os << "spectra of setting '" << profile.setting().label()
           << "' are indistinguishable (int S+S+ - int S+S- = " << den_plus
           << ", int S-S- - int S+S- = " << den_minus << ")";
        throw SpectraIndistinguishable(os.str());
    }

    AuxFunction aux{profile.setting(), s, {}, {}, m};
    aux.v_plus.resize(s.size());
    aux.v_minus.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        aux.v_plus[i] = (profile.plus()[i] - m.plus_minus) / den_plus;
        aux.v_minus[i] = (profile.minus()[i] - m.plus_minus) / den_minus;
    }
    return aux;
}

AuxKernel aux_kernel(const AuxFunction& first, const AuxFunction& second) {
    AuxKernel k{first.space, second.space, {}};
    const auto d1 = differences(first);
    const auto d2 = differences(second);
    k.values.resize(d1.size() * d2.size());
    for (std::size_t i = 0; i < d1.size(); ++i)
        for (std::size_t j = 0; j < d2.size(); ++j) k.values[i * d2.size() + j] = d1[i] * d2[j];
    return k;
}

double correlation_from_spectrum(const JointSpectrum& joint, const AuxFunction& first,
                                 const AuxFunction& second) {
    if (!(joint.first_space == first.space) || !(joint.second_space == second.space))
        throw UsageError("joint spectrum and auxiliary functions live on different outcome spaces");
    // Same product quadrature as quadrature(f, a, b), with V = d1 (x) d2
    // applied on the fly.
    const auto d1 = differences(first);
    const auto d2 = differences(second);
    const auto& w1 = joint.first_space.weights();
    const auto& w2 = joint.second_space.weights();
    std::vector<double> wd2(d2.size());
    for (std::size_t j = 0; j < d2.size(); ++j) wd2[j] = w2[j] * d2[j];
    double sum = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        const double* row = joint.density.data() + i * d2.size();
        double inner_sum = 0.0;
        for (std::size_t j = 0; j < d2.size(); ++j) inner_sum += row[j] * wd2[j];
        sum += w1[i] * d1[i] * inner_sum;
    }
    return sum;
}

double correlation_analytic(const BipartiteDensity& rho, const MeasurementSetting& first,
                            const MeasurementSetting& second) {
    const auto a = diag_coefficients(rho, first, second);
    return a[pair_index(Outcome::Plus, Outcome::Plus)] +
           a[pair_index(Outcome::Minus, Outcome::Minus)] -
           a[pair_index(Outcome::Plus, Outcome::Minus)] -
           a[pair_index(Outcome::Minus, Outcome::Plus)];
}

double correlation_from_histogram(const Histogram2D& hist, const AuxFunction& first,
                                  const AuxFunction& second) {
    if (hist.total() == 0) throw UsageError("cannot estimate a correlation from an empty histogram");
    const auto d1 = differences_on_axis(hist.first(), first);
    const auto d2 = differences_on_axis(hist.second(), second);
    double sum = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d2.size(); ++j)
            row += static_cast<double>(hist.count(i, j)) * d2[j];
        sum += d1[i] * row;
    }
    return sum / static_cast<double>(hist.total());
}

const char* to_string(CorrelationMethod m) {
    switch (m) {
        case CorrelationMethod::Analytic: return "Analytic";
        case CorrelationMethod::SpectrumIntegral: return "SpectrumIntegral";
        case CorrelationMethod::BinnedEstimate: return "BinnedEstimate";
    }
    return "?";
}

ChshSettings::ChshSettings(ChshChannel r_, ChshChannel q_, ChshChannel t_, ChshChannel s_)
    : r(std::move(r_)), q(std::move(q_)), t(std::move(t_)), s(std::move(s_)) {
    if (r.setting.same_basis(q.setting))
        throw UsageError("CHSH settings r and q must differ");
    if (t.setting.same_basis(s.setting))
        throw UsageError("CHSH settings t and s must differ");
}

CorrelationReport CorrelationReport::from_correlations(double e_rt, double e_rs, double e_qt,
                                                       double e_qs, CorrelationMethod method) {
    CorrelationReport r;
    r.e_rt = e_rt;
    r.e_rs = e_rs;
    r.e_qt = e_qt;
    r.e_qs = e_qs;
    r.chsh_value = std::abs(e_rt + e_rs + e_qs - e_qt);
    r.violated = r.chsh_value > 2.0;
    r.method = method;
    return r;
}

CorrelationReport chsh(const BipartiteDensity& rho, const ChshSettings& settings,
                       CorrelationMethod method) {
    if (method == CorrelationMethod::BinnedEstimate)
        throw UsageError("binned CHSH estimates need simulated histograms; use estimate_chsh");
    return CorrelationReport::from_correlations(
        correlation_for(rho, settings.r, settings.t, method),
        correlation_for(rho, settings.r, settings.s, method),
        correlation_for(rho, settings.q, settings.t, method),
        correlation_for(rho, settings.q, settings.s, method), method);
}

}  // namespace contbell

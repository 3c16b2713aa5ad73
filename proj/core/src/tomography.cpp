#include "contbell/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "contbell/errors.hpp"

namespace contbell {

namespace {

constexpr double kConditionTol = 1e-12;
constexpr double kGramFloor = 1e-12;
constexpr double kRankTol = 1e-10;
constexpr double kNullTol = 1e-8;

// 2x2 overlap matrix O[a][c] = int S_a S_c of one channel.
Eigen::Matrix2d overlaps(const SpectralProfile& p) {
    Eigen::Matrix2d o;
    const auto& w = p.space().weights();
    for (Outcome a : kOutcomes) {
        for (Outcome c : kOutcomes) {
            const auto& sa = p.dist(a);
            const auto& sc = p.dist(c);
            double sum = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * sa[i] * sc[i];
            o(static_cast<int>(a), static_cast<int>(c)) = sum;
        }
    }
    return o;
}

// Product-basis Gram matrix G_{(a,b),(c,d)} = O1[a][c] O2[b][d].
Eigen::Matrix4d product_gram(const Eigen::Matrix2d& o1, const Eigen::Matrix2d& o2) {
    Eigen::Matrix4d g;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) g(2 * a + b, 2 * c + d) = o1(a, c) * o2(b, d);
    return g;
}

// Projections b_k = int S_obs S_{j1} S_{j2} with the fit's quadrature.
Eigen::Vector4d projections(std::span<const double> y, const SpectralProfile& first,
                            const SpectralProfile& second) {
    const std::size_t n1 = first.space().size();
    const std::size_t n2 = second.space().size();
    const auto& w1 = first.space().weights();
    const auto& w2 = second.space().weights();
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < n1; ++i) {
        double row_plus = 0.0;
        double row_minus = 0.0;
        const double* yi = y.data() + i * n2;
        for (std::size_t j = 0; j < n2; ++j) {
            const double wy = w2[j] * yi[j];
            row_plus += wy * second.plus()[j];
            row_minus += wy * second.minus()[j];
        }
        const double sp = w1[i] * first.plus()[i];
        const double sm = w1[i] * first.minus()[i];
        b(0) += sp * row_plus;
        b(1) += sp * row_minus;
        b(2) += sm * row_plus;
        b(3) += sm * row_minus;
    }
    return b;
}

void check_observation(std::span<const double> observed, const SpectralProfile& first,
                       const SpectralProfile& second) {
    if (observed.size() != first.space().size() * second.space().size()) {
        std::ostringstream os;
        os << "observed data has " << observed.size() << " values, profiles span "
           << first.space().size() << " x " << second.space().size();
        throw UsageError(os.str());
    }
}

// Integral of the piecewise-linear interpolant of grid values over [a, b].
double integrate_interpolant(const OutcomeSpace& space, std::span<const double> f, double a,
                             double b) {
    const auto& x = space.nodes();
    a = std::max(a, space.lo());
    b = std::min(b, space.hi());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double u = std::max(a, x[i]);
        const double v = std::min(b, x[i + 1]);
        if (!(v > u)) continue;
        sum += 0.5 * (interpolate(space, f, u) + interpolate(space, f, v)) * (v - u);
    }
    return sum;
}

void check_condition(const MeasurementSetting& measured, const MeasurementSetting& target) {
    const Matrix2c a = measured.basis_change_to(target);
    const double sum = std::abs(a(0, 1) + a(1, 0));
    if (sum > kConditionTol) {
        std::ostringstream os;
        os << "basis change from '" << measured.label() << "' to '" << target.label()
           << "' violates a^{+-} + a^{-+} = 0 (|sum| = " << sum << ")";
        throw ConditionViolated(os.str());
    }
}

// Column index of each real unknown: 4 diagonal entries, then (Re, Im) of
// the six upper-triangle entries.
struct Parametrization {
    std::array<std::array<int, 4>, 4> re{};
    std::array<std::array<int, 4>, 4> im{};
    int size = 0;

    explicit Parametrization(AmplitudeModel model) {
        for (auto& r : re) r.fill(-1);
        for (auto& r : im) r.fill(-1);
        for (int k = 0; k < 4; ++k) re[k][k] = size++;
        for (int k = 0; k < 4; ++k) {
            for (int l = k + 1; l < 4; ++l) {
                re[k][l] = size++;
                if (model == AmplitudeModel::General) im[k][l] = size++;
            }
        }
    }
};

}  // namespace

DiagonalFit fit_diagonal(std::span<const double> observed, const SpectralProfile& first,
                         const SpectralProfile& second) {
    check_observation(observed, first, second);
    const Eigen::Matrix4d gram = product_gram(overlaps(first), overlaps(second));
    const Eigen::Vector4d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(gram).eigenvalues();
    if (!(eig(0) > kGramFloor * eig(3))) {
        std::ostringstream os;
        os << "product basis of '" << first.setting().label() << "' x '"
           << second.setting().label() << "' is degenerate (Gram eigenvalues " << eig(0) << " .. "
           << eig(3) << ")";
        throw DegenerateBasis(os.str());
    }
    const Eigen::Vector4d b = projections(observed, first, second);

    // The objective is a convex quadratic on the simplex: solve the
    // equality-constrained normal equations on every support and keep the
    // best feasible one.
    std::optional<Eigen::Vector4d> best;
    double best_value = std::numeric_limits<double>::infinity();
    bool full_support_feasible = false;
    for (int mask = 15; mask >= 1; --mask) {
        std::vector<int> idx;
        for (int k = 0; k < 4; ++k)
            if (mask & (1 << k)) idx.push_back(k);
        const int m = static_cast<int>(idx.size());
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs(m + 1);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) kkt(i, j) = gram(idx[i], idx[j]);
            kkt(i, m) = kkt(m, i) = 1.0;
            rhs(i) = b(idx[i]);
        }
        rhs(m) = 1.0;
        const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
        Eigen::Vector4d a = Eigen::Vector4d::Zero();
        bool feasible = sol.allFinite();
        for (int i = 0; i < m && feasible; ++i) {
            if (sol(i) < -1e-12) feasible = false;
            a(idx[i]) = std::max(0.0, sol(i));
        }
        if (!feasible) continue;
        if (mask == 15) full_support_feasible = true;
        a /= a.sum();
        const double value = a.dot(gram * a) - 2.0 * a.dot(b);
        if (value < best_value) {
            best_value = value;
            best = a;
        }
    }
    if (!best) throw DegenerateBasis("no feasible simplex solution found");

    DiagonalFit fit;
    for (int k = 0; k < 4; ++k) fit.coeffs[k] = (*best)(k);
    fit.constrained = !full_support_feasible;
    fit.residual = fit_objective(observed, first, second, fit.coeffs);
    return fit;
}

double fit_objective(std::span<const double> observed, const SpectralProfile& first,
                     const SpectralProfile& second, const std::array<double, 4>& coeffs) {
    check_observation(observed, first, second);
    const std::size_t n1 = first.space().size();
    const std::size_t n2 = second.space().size();
    std::vector<double> sq(observed.size());
    for (std::size_t i = 0; i < n1; ++i) {
        const double p1 = first.plus()[i];
        const double m1 = first.minus()[i];
        for (std::size_t j = 0; j < n2; ++j) {
            const double model =
                coeffs[0] * p1 * second.plus()[j] + coeffs[1] * p1 * second.minus()[j] +
                coeffs[2] * m1 * second.plus()[j] + coeffs[3] * m1 * second.minus()[j];
            const double r = observed[i * n2 + j] - model;
            sq[i * n2 + j] = r * r;
        }
    }
    return std::max(0.0, quadrature(sq, first.space(), second.space()));
}

Observation observation_from_spectrum(const JointSpectrum& joint, const SpectralProfile& first,
                                      const SpectralProfile& second) {
    if (!(joint.first_space == first.space()) || !(joint.second_space == second.space()))
        throw UsageError("joint spectrum and profiles live on different outcome spaces");
    return Observation{first, second, joint.density};
}

SpectralProfile binned_profile(const SpectralProfile& profile, const HistogramAxis& axis) {
    if (!axis.is_continuous()) {
        if (profile.space().is_continuous() || profile.space().labels() != axis.labels())
            throw UsageError("histogram labels do not match profile '" +
                             profile.setting().label() + "'");
        return profile;
    }
    if (!profile.space().is_continuous())
        throw UsageError("continuous histogram axis paired with discrete profile '" +
                         profile.setting().label() + "'");
    std::vector<std::string> labels;
    std::vector<double> plus, minus;
    for (std::size_t b = 0; b < axis.size(); ++b) {
        labels.push_back(axis.cell_name(b));
        const double lo = axis.edges()[b];
        const double hi = axis.edges()[b + 1];
        plus.push_back(integrate_interpolant(profile.space(), profile.plus(), lo, hi));
        minus.push_back(integrate_interpolant(profile.space(), profile.minus(), lo, hi));
    }
    return SpectralProfile::normalized(profile.setting(), OutcomeSpace::discrete(std::move(labels)),
                                       std::move(plus), std::move(minus));
}

Observation observation_from_histogram(const Histogram2D& hist, const SpectralProfile& first,
                                       const SpectralProfile& second) {
    if (hist.total() == 0) throw UsageError("cannot fit an empty histogram");
    Observation obs{binned_profile(first, hist.first()), binned_profile(second, hist.second()), {}};
    obs.values.resize(hist.counts().size());
    const double n = static_cast<double>(hist.total());
    for (std::size_t k = 0; k < obs.values.size(); ++k)
        obs.values[k] = static_cast<double>(hist.counts()[k]) / n;
    return obs;
}

OffDiagonalEstimate recover_offdiagonal(std::span<const MeasuredPair> fits,
                                        const MeasurementSetting& target_first,
                                        const MeasurementSetting& target_second,
                                        AmplitudeModel model) {
    if (fits.empty()) throw UsageError("off-diagonal recovery needs at least one fitted pair");
    for (const auto& f : fits) {
        check_condition(f.first, target_first);
        check_condition(f.second, target_second);
    }

    const Parametrization param(model);
    const Matrix4c w_target = kron(target_first.coeffs(), target_second.coeffs()).conjugate();
    const int rows = 4 * static_cast<int>(fits.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(rows, param.size);
    Eigen::VectorXd rhs(rows);

    int row = 0;
    for (const auto& f : fits) {
        const Matrix4c kets = kron(f.first.coeffs(), f.second.coeffs());
        for (int k = 0; k < 4; ++k, ++row) {
            // Measured product eigenvector in target-basis coordinates.
            const Vector4c u = w_target * kets.row(k).transpose();
            for (int a = 0; a < 4; ++a) design(row, param.re[a][a]) = std::norm(u(a));
            for (int a = 0; a < 4; ++a) {
                for (int c = a + 1; c < 4; ++c) {
                    const Complex z = std::conj(u(a)) * u(c);
                    design(row, param.re[a][c]) = 2.0 * z.real();
                    if (param.im[a][c] >= 0) design(row, param.im[a][c]) = -2.0 * z.imag();
                }
            }
            rhs(row) = f.fit.coeffs[k];
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankTol * (sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    svd.setThreshold(kRankTol);
    const Eigen::VectorXd theta = svd.solve(rhs);
    const Eigen::MatrixXd null_space = svd.matrixV().rightCols(param.size - rank);

    auto determined = [&](int col) {
        return col >= 0 && null_space.row(col).norm() < kNullTol;
    };

    OffDiagonalEstimate est{target_first, target_second, Matrix4c::Zero(), {}};
    for (int a = 0; a < 4; ++a) {
        for (int c = a + 1; c < 4; ++c) {
            const bool re_ok = determined(param.re[a][c]);
            const bool im_ok =
                model == AmplitudeModel::Real ? true : determined(param.im[a][c]);
            if (!(re_ok && im_ok)) continue;
            const double im = param.im[a][c] >= 0 ? theta(param.im[a][c]) : 0.0;
            est.values(a, c) = Complex(theta(param.re[a][c]), im);
            est.values(c, a) = std::conj(est.values(a, c));
            est.known[4 * a + c] = est.known[4 * c + a] = true;
        }
    }
    return est;
}

bool ReconstructionResult::complete() const {
    return std::all_of(known.begin(), known.end(), [](bool k) { return k; });
}

BipartiteDensity ReconstructionResult::density() const {
    if (!complete()) throw UsageError("reconstruction is incomplete");
    return BipartiteDensity(matrix, first, second, kReconstructionPsdTolerance);
}

ReconstructionResult reconstruct(const DiagonalFit& diag, const OffDiagonalEstimate& offdiag,
                                 double ppt_tolerance) {
    ReconstructionResult r{offdiag.first, offdiag.second, Matrix4c::Zero(), {}, {}, {}};
    const double total = diag.coeffs[0] + diag.coeffs[1] + diag.coeffs[2] + diag.coeffs[3];
    for (int k = 0; k < 4; ++k) {
        r.matrix(k, k) = diag.coeffs[k] / total;
        r.known[5 * k] = true;
    }
    for (int a = 0; a < 4; ++a) {
        for (int c = 0; c < 4; ++c) {
            if (a == c || !offdiag.is_known(a, c)) continue;
            if (!offdiag.is_known(c, a) ||
                std::abs(offdiag.values(a, c) - std::conj(offdiag.values(c, a))) > 1e-12) {
                std::ostringstream os;
                os << "off-diagonal entries (" << a + 1 << "," << c + 1 << ") and (" << c + 1
                   << "," << a + 1 << ") are not Hermitian conjugates";
                throw ValidationError(os.str());
            }
            r.matrix(a, c) = offdiag.values(a, c);
            r.known[4 * a + c] = true;
        }
    }
    if (!r.complete()) return r;

    const double lowest = hermitian_eigenvalues(r.matrix)(0);
    r.min_eigenvalue = lowest;
    if (lowest < -kReconstructionPsdTolerance) {
        std::ostringstream os;
        os << "reconstructed density matrix is not positive semidefinite (min eigenvalue "
           << lowest << ")";
        throw InconsistentData(os.str(), lowest);
    }
    r.verdict = ppt_classify(r.density(), ppt_tolerance);
    return r;
}

TomographyResult run_tomography(std::span<const Observation> observations,
                                const MeasurementSetting& target_first,
                                const MeasurementSetting& target_second, AmplitudeModel model) {
    if (observations.empty()) throw UsageError("tomography needs at least one observation");
    std::vector<MeasuredPair> fits;
    const DiagonalFit* target_fit = nullptr;
    for (const auto& obs : observations) {
        fits.push_back(MeasuredPair{obs.first.setting(), obs.second.setting(),
                                    fit_diagonal(obs.values, obs.first, obs.second)});
    }
    for (const auto& f : fits) {
        if (f.first.same_basis(target_first) && f.second.same_basis(target_second)) {
            target_fit = &f.fit;
            break;
        }
    }
    if (!target_fit) {
        throw UsageError("tomography needs an observation in the target pair (" +
                         target_first.label() + "," + target_second.label() + ")");
    }
    OffDiagonalEstimate off = recover_offdiagonal(fits, target_first, target_second, model);
    ReconstructionResult rec = reconstruct(*target_fit, off);
    return TomographyResult{std::move(fits), std::move(off), std::move(rec)};
}

}  // namespace contbell

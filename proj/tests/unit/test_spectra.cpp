#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "contbell/errors.hpp"
#include "contbell/spectra.hpp"
#include "oracles.hpp"

using namespace contbell;

namespace {

SpectralProfile fig1_profile(const OutcomeSpace& space = OutcomeSpace::continuous()) {
    return gaussian_profile(settings::z_plus_x(), 30.0, 150.0, 40.0, space);
}

SpectralProfile z_profile(const OutcomeSpace& space = OutcomeSpace::continuous()) {
    return gaussian_profile(settings::z(), 90.0, 40.0, 25.0, space);
}

double trapezoid_product(const SpectralProfile& p) {
    std::vector<double> prod(p.space().size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = p.plus()[i] * p.minus()[i];
    return quadrature(prod, p.space());
}

}  // namespace

TEST(OutcomeSpace, Validation) {
    EXPECT_THROW(OutcomeSpace::continuous(10, 10, 11), UsageError);
    EXPECT_THROW(OutcomeSpace::continuous(0, 180, 2), UsageError);
    EXPECT_THROW(OutcomeSpace::discrete({}), UsageError);
    EXPECT_THROW(OutcomeSpace::discrete({"+", "+"}), UsageError);
    const auto s = OutcomeSpace::continuous();
    EXPECT_EQ(s.size(), 1801u);
    EXPECT_DOUBLE_EQ(s.step(), 0.1);
    EXPECT_EQ(OutcomeSpace::two_label().label_index("-"), 1u);
}

TEST(Quadrature, ConstantAndMismatch) {
    const auto s = OutcomeSpace::continuous();
    std::vector<double> ones(s.size(), 1.0);
    EXPECT_NEAR(quadrature(ones, s), 180.0, 1e-10);
    std::vector<double> short_table(10, 1.0);
    EXPECT_THROW(quadrature(short_table, s), UsageError);
    EXPECT_THROW(quadrature(ones, s, s), UsageError);
    const auto d = OutcomeSpace::discrete({"a", "b", "c"});
    EXPECT_DOUBLE_EQ(quadrature(std::vector<double>{1, 2, 3}, d), 6.0);
}

TEST(Quadrature, NormalizedGaussianIntegratesToOne) {
    const auto p = fig1_profile();
    EXPECT_NEAR(quadrature(p.plus(), p.space()), 1.0, 1e-9);
    EXPECT_NEAR(quadrature(p.minus(), p.space()), 1.0, 1e-9);
}

TEST(Quadrature, ProductMatchesFineGridOracle) {
    const oracle::TruncGauss fp(30, 40), fm(150, 40);
    const double reference = oracle::simpson([&](double x) { return fp(x) * fm(x); }, 0, 180, 18000);
    EXPECT_NEAR(trapezoid_product(fig1_profile()), reference, 1e-7);
}

TEST(Quadrature, SecondOrderConvergence) {
    std::vector<double> values;
    for (std::size_t n : {181u, 361u, 721u, 1441u})
        values.push_back(trapezoid_product(fig1_profile(OutcomeSpace::continuous(0, 180, n))));
    for (std::size_t k = 2; k < values.size(); ++k) {
        const double prev = std::abs(values[k - 1] - values[k - 2]);
        const double next = std::abs(values[k] - values[k - 1]);
        EXPECT_LT(next, prev);
        EXPECT_NEAR(next / prev, 0.25, 0.05);
    }
}

TEST(Interpolate, LinearAndZeroOutside) {
    const auto s = OutcomeSpace::continuous(0, 10, 11);
    std::vector<double> f(11);
    for (int i = 0; i <= 10; ++i) f[i] = i * i;
    EXPECT_DOUBLE_EQ(interpolate(s, f, 2.5), 6.5);
    EXPECT_DOUBLE_EQ(interpolate(s, f, 10.0), 100.0);
    EXPECT_DOUBLE_EQ(interpolate(s, f, -0.1), 0.0);
    EXPECT_DOUBLE_EQ(interpolate(s, f, 10.1), 0.0);
}

TEST(GaussianProfile, MatchesTruncatedGaussianOracle) {
    const auto p = fig1_profile();
    const oracle::TruncGauss fp(30, 40), fm(150, 40);
    for (std::size_t i = 0; i < p.space().size(); i += 50) {
        const double x = p.space().nodes()[i];
        EXPECT_NEAR(p.plus()[i], fp(x), 1e-6 * fp(x) + 1e-15);
        EXPECT_NEAR(p.minus()[i], fm(x), 1e-6 * fm(x) + 1e-15);
    }
}

TEST(GaussianProfile, DegenerateAndErrors) {
    const auto p = gaussian_profile(settings::z(), 90, 90, 40, OutcomeSpace::continuous());
    EXPECT_EQ(p.plus(), p.minus());
    EXPECT_THROW(gaussian_profile(settings::z(), 30, 150, 40, OutcomeSpace::two_label()), UsageError);
    EXPECT_THROW(gaussian_profile(settings::z(), 30, 150, 0, OutcomeSpace::continuous()), UsageError);
}

TEST(SpectralProfile, RejectsInvalidTables) {
    const auto s = OutcomeSpace::two_label();
    EXPECT_THROW(SpectralProfile(settings::x(), s, {0.5, 0.4}, {0, 1}), ValidationError);
    EXPECT_THROW(SpectralProfile(settings::x(), s, {1.5, -0.5}, {0, 1}), ValidationError);
    EXPECT_THROW(SpectralProfile(settings::x(), s, {1.0}, {0, 1}), UsageError);
}

TEST(TabulatedProfile, TwoPointUniform) {
    const std::vector<TableSample> flat{{0, 1}, {180, 1}};
    const auto p = tabulated_profile(settings::z(), flat, flat);
    for (double v : p.plus()) EXPECT_NEAR(v, 1.0 / 180.0, 1e-12);
}

TEST(TabulatedProfile, RenormalizesScaledTable) {
    std::vector<TableSample> t;
    for (int a = 0; a <= 180; a += 10) t.push_back({double(a), 5.0 / 180.0 * (1 + 0.5 * std::sin(a * 0.05))});
    const auto p = tabulated_profile(settings::z(), t, t);
    EXPECT_NEAR(quadrature(p.plus(), p.space()), 1.0, 1e-9);
}

TEST(TabulatedProfile, PaperLikeShapesAccepted) {
    std::vector<TableSample> h, v;
    for (int a = 0; a <= 180; a += 5) {
        h.push_back({double(a), std::exp(-std::pow((a - 90) / 30.0, 2))});
        v.push_back({double(a), std::exp(-std::pow((a - 45) / 25.0, 2)) + std::exp(-std::pow((a - 135) / 25.0, 2))});
    }
    const auto p = tabulated_profile(settings::z(), h, v);
    EXPECT_NEAR(quadrature(p.minus(), p.space()), 1.0, 1e-9);
    EXPECT_GT(p.plus()[900], p.plus()[450]);
    EXPECT_GT(p.minus()[450], p.minus()[900]);
}

TEST(TabulatedProfile, ListsOffendingEntries) {
    const std::vector<TableSample> unsorted{{0, 1}, {90, 1}, {45, 1}, {180, 1}};
    const std::vector<TableSample> negative{{0, 1}, {90, -2}, {180, 1}};
    try {
        tabulated_profile(settings::z(), unsorted, negative);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("plus"), std::string::npos) << msg;
        EXPECT_NE(msg.find("minus"), std::string::npos) << msg;
        EXPECT_NE(msg.find("45"), std::string::npos) << msg;
        EXPECT_NE(msg.find("-2"), std::string::npos) << msg;
    }
}

TEST(ProfileTableFile, RoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "contbell_profile_table";
    std::filesystem::create_directories(dir);
    const auto p = z_profile();
    write_profile_table(dir / "h.txt", p.space(), p.plus());
    write_profile_table(dir / "v.txt", p.space(), p.minus());
    {
        std::ofstream extra(dir / "h.txt", std::ios::app);
        extra << "# trailing comment\n\n";
    }
    const auto h = read_profile_table(dir / "h.txt");
    ASSERT_EQ(h.size(), p.space().size());
    const auto q = tabulated_profile(settings::z(), h, read_profile_table(dir / "v.txt"));
    for (std::size_t i = 0; i < q.plus().size(); ++i) EXPECT_NEAR(q.plus()[i], p.plus()[i], 1e-12);

    std::ofstream(dir / "bad.txt") << "0 1\n10 x\n";
    EXPECT_THROW(read_profile_table(dir / "bad.txt"), ValidationError);
    std::filesystem::remove_all(dir);
}

TEST(DiagCoefficients, Examples) {
    for (double p : {0.0, 0.4, 1.0}) {
        const auto zz = diag_coefficients(werner_state(p), settings::z(), settings::z());
        const auto xx = diag_coefficients(werner_state(p), settings::x(), settings::x());
        const double lo = (1 - p) / 4, hi = (1 + p) / 4;
        const std::array<double, 4> ezz{lo, hi, hi, lo}, exx{hi, lo, lo, hi};
        for (int k = 0; k < 4; ++k) {
            EXPECT_NEAR(zz[k], ezz[k], 1e-14);
            EXPECT_NEAR(xx[k], exx[k], 1e-14);
        }
    }
    const auto h = PureState2::eigenstate(settings::z(), Outcome::Plus);
    const auto a = diag_coefficients(product_state(h, h), settings::z(), settings::z());
    EXPECT_NEAR(a[0], 1.0, 1e-15);
    EXPECT_NEAR(a[1] + a[2] + a[3], 0.0, 1e-15);
}

TEST(DiagCoefficients, ProbabilityVectorForRandomStates) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto rho = BipartiteDensity::in_reference(oracle::random_density(rng));
        const auto a = diag_coefficients(rho, settings::z_plus_x(), settings::y());
        double sum = 0;
        for (double v : a) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(JointSpectrum, ProductOfHProfiles) {
    const auto p = z_profile();
    const auto h = PureState2::eigenstate(settings::z(), Outcome::Plus);
    const auto js = joint_spectrum(product_state(h, h), p, p);
    const std::size_t n = p.space().size();
    for (std::size_t i = 0; i < n; i += 97)
        for (std::size_t j = 0; j < n; j += 89) EXPECT_NEAR(js.at(i, j), p.plus()[i] * p.plus()[j], 1e-15);
    EXPECT_NEAR(js.total(), 1.0, 1e-8);
}

TEST(JointSpectrum, WernerXXDiscrete) {
    const auto px = projective_profile(settings::x());
    for (double p : {0.0, 0.6, 1.0}) {
        const auto js = joint_spectrum(werner_state(p), px, px);
        EXPECT_NEAR(js.density[0], (1 + p) / 4, 1e-14);
        EXPECT_NEAR(js.density[1], (1 - p) / 4, 1e-14);
        EXPECT_NEAR(js.density[2], (1 - p) / 4, 1e-14);
        EXPECT_NEAR(js.density[3], (1 + p) / 4, 1e-14);
    }
}

TEST(JointSpectrum, MaximallyMixedFactorizes) {
    const auto a = z_profile();
    const auto b = fig1_profile();
    const auto js = joint_spectrum(werner_state(0.0), a, b);
    for (std::size_t i = 0; i < a.space().size(); i += 113)
        for (std::size_t j = 0; j < b.space().size(); j += 71) {
            const double m1 = 0.5 * (a.plus()[i] + a.minus()[i]);
            const double m2 = 0.5 * (b.plus()[j] + b.minus()[j]);
            EXPECT_NEAR(js.at(i, j), m1 * m2, 1e-15);
        }
}

TEST(JointSpectrum, MarginalsAndMixtureLinearity) {
    const auto a = z_profile(OutcomeSpace::continuous(0, 180, 361));
    const auto b = fig1_profile(OutcomeSpace::continuous(0, 180, 361));
    const auto rho1 = werner_state(0.8);
    const auto h = PureState2::eigenstate(settings::x(), Outcome::Minus);
    const auto rho2 = product_state(h, PureState2::eigenstate(settings::z(), Outcome::Plus));
    const auto js = joint_spectrum(rho1, a, b);
    const auto A = js.diag_coeffs;

    const std::size_t n1 = a.space().size(), n2 = b.space().size();
    for (std::size_t i = 0; i < n1; i += 20) {
        std::vector<double> row(js.density.begin() + i * n2, js.density.begin() + (i + 1) * n2);
        const double marginal = quadrature(row, b.space());
        const double expected = (A[0] + A[1]) * a.plus()[i] + (A[2] + A[3]) * a.minus()[i];
        EXPECT_NEAR(marginal, expected, 1e-8);
    }

    const double alpha = 0.3;
    const auto mix = joint_spectrum(mixture(alpha, rho1, rho2), a, b);
    const auto js2 = joint_spectrum(rho2, a, b);
    for (std::size_t k = 0; k < mix.density.size(); k += 37)
        EXPECT_NEAR(mix.density[k], alpha * js.density[k] + (1 - alpha) * js2.density[k], 1e-10);
}

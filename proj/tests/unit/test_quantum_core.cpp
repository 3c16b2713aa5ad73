#include <gtest/gtest.h>

#include <random>

#include "contbell/errors.hpp"
#include "contbell/quantum_core.hpp"
#include "oracles.hpp"

using namespace contbell;

namespace {

void expect_matrix_near(const Matrix4c& a, const Matrix4c& b, double tol) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            EXPECT_NEAR(a(i, j).real(), b(i, j).real(), tol) << "(" << i << "," << j << ")";
            EXPECT_NEAR(a(i, j).imag(), b(i, j).imag(), tol) << "(" << i << "," << j << ")";
        }
}

}  // namespace

TEST(MeasurementSetting, ZIsIdentity) {
    EXPECT_TRUE(settings::z().coeffs().isApprox(Matrix2c::Identity(), 1e-15));
    EXPECT_EQ(*settings::z().bloch_angle(), 0.0);
}

TEST(MeasurementSetting, NamedSettingsAreUnitary) {
    for (const char* label : {"Z", "X", "ZpX", "ZmX", "Y"}) {
        const auto s = settings::by_label(label);
        EXPECT_EQ(s.label(), label);
        EXPECT_TRUE((s.coeffs() * s.coeffs().adjoint()).isApprox(Matrix2c::Identity(), 1e-12)) << label;
    }
}

TEST(MeasurementSetting, RotationRowsMatchOracle) {
    for (double phi : {0.0, 45.0, 90.0, -45.0, 135.0, 17.5}) {
        const auto s = MeasurementSetting::rotation("r", phi);
        const oracle::M2 o = oracle::rotation_rows(phi);
        EXPECT_TRUE(s.coeffs().isApprox(o, 1e-14)) << phi;
    }
}

TEST(MeasurementSetting, RejectsNonUnitary) {
    Matrix2c m;
    m << 1, 0, 0, 2;
    EXPECT_THROW(MeasurementSetting::from_coefficients("bad", m), ValidationError);
    EXPECT_THROW(settings::by_label("W"), UsageError);
}

TEST(MeasurementSetting, SameBasisIgnoresLabel) {
    const auto a = MeasurementSetting::rotation("a", 90.0);
    EXPECT_TRUE(a.same_basis(settings::x()));
    EXPECT_FALSE(a == settings::x());
    EXPECT_FALSE(a.same_basis(settings::z()));
}

TEST(PureState2, NormalizationEnforced) {
    EXPECT_THROW(PureState2(settings::z(), 1.0, 1.0), ValidationError);
    const PureState2 plus = PureState2::eigenstate(settings::x(), Outcome::Plus);
    const Vector2c v = plus.in_reference();
    EXPECT_NEAR(v(0).real(), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR(v(1).real(), std::sqrt(0.5), 1e-15);
}

TEST(BipartiteDensity, InvariantsEnforced) {
    Matrix4c m = Matrix4c::Identity() / 4.0;
    EXPECT_NO_THROW(BipartiteDensity::in_reference(m));

    Matrix4c bad_trace = Matrix4c::Identity() / 2.0;
    EXPECT_THROW(BipartiteDensity::in_reference(bad_trace), ValidationError);

    Matrix4c not_hermitian = m;
    not_hermitian(0, 1) = 0.1;
    EXPECT_THROW(BipartiteDensity::in_reference(not_hermitian), ValidationError);

    Matrix4c negative = Matrix4c::Zero();
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    EXPECT_THROW(BipartiteDensity::in_reference(negative), ValidationError);
}

TEST(WernerState, Examples) {
    const auto w1 = werner_state(1.0).matrix();
    EXPECT_NEAR(w1(0, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(w1(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(w1(2, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(w1(3, 3).real(), 0.0, 1e-15);
    EXPECT_NEAR(w1(1, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(w1(2, 1).real(), 0.5, 1e-15);

    expect_matrix_near(werner_state(0.0).matrix(), Matrix4c::Identity() / 4.0, 1e-15);

    const auto w6 = werner_state(0.6).matrix();
    EXPECT_NEAR(w6(0, 0).real(), 0.1, 1e-15);
    EXPECT_NEAR(w6(1, 1).real(), 0.4, 1e-15);
    EXPECT_NEAR(w6(2, 2).real(), 0.4, 1e-15);
    EXPECT_NEAR(w6(3, 3).real(), 0.1, 1e-15);
    EXPECT_NEAR(w6(1, 2).real(), 0.3, 1e-15);
}

TEST(WernerState, DomainErrors) {
    EXPECT_THROW(werner_state(-0.01), DomainError);
    EXPECT_THROW(werner_state(1.01), DomainError);
}

TEST(WernerState, ValidAcrossP) {
    for (int i = 0; i <= 100; ++i) EXPECT_NO_THROW(werner_state(i / 100.0));
}

TEST(TransformDensity, WernerToXX) {
    for (double p : {0.0, 0.3, 0.6, 1.0}) {
        const auto r = transform_density(werner_state(p), settings::x(), settings::x()).matrix();
        EXPECT_NEAR(r(0, 0).real(), (1 + p) / 4, 1e-14);
        EXPECT_NEAR(r(1, 1).real(), (1 - p) / 4, 1e-14);
        EXPECT_NEAR(r(2, 2).real(), (1 - p) / 4, 1e-14);
        EXPECT_NEAR(r(3, 3).real(), (1 + p) / 4, 1e-14);
        EXPECT_NEAR(r(0, 3).real(), -p / 2, 1e-14);
        EXPECT_NEAR(r(3, 0).real(), -p / 2, 1e-14);
    }
}

TEST(TransformDensity, IdentityLeavesRhoUnchanged) {
    const auto rho = werner_state(0.37);
    expect_matrix_near(transform_density(rho, settings::z(), settings::z()).matrix(), rho.matrix(),
                       1e-15);
}

TEST(TransformDensity, MatchesConjugationOracle) {
    const auto r = transform_density(werner_state(0.6), settings::z_plus_x(), settings::z_minus_x());
    const oracle::M4 o =
        oracle::to_basis(oracle::werner(0.6), oracle::rotation_rows(45), oracle::rotation_rows(-45));
    expect_matrix_near(r.matrix(), o, 1e-14);
}

TEST(TransformDensity, RandomStatesMatchOracleAndPreserveSpectrum) {
    std::mt19937_64 rng(11);
    const MeasurementSetting all[] = {settings::z(), settings::x(), settings::z_plus_x(),
                                      settings::z_minus_x(), settings::y()};
    for (int trial = 0; trial < 25; ++trial) {
        const oracle::M4 m = oracle::random_density(rng);
        const auto rho = BipartiteDensity::in_reference(m);
        const auto& a = all[trial % 5];
        const auto& b = all[(trial / 5) % 5];
        const auto t = transform_density(rho, a, b);
        expect_matrix_near(t.matrix(), oracle::to_basis(m, a.coeffs(), b.coeffs()), 1e-12);

        const auto ev0 = rho.eigenvalues();
        const auto ev1 = t.eigenvalues();
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev0(k), ev1(k), 1e-10);
        EXPECT_NEAR(t.matrix().trace().real(), 1.0, 1e-12);

        // Back to (Z, Z).
        const auto back = transform_density(t, settings::z(), settings::z());
        expect_matrix_near(back.matrix(), m, 1e-10);
    }
}

TEST(PartialTranspose, Examples) {
    expect_matrix_near(partial_transpose(werner_state(0.0)), Matrix4c::Identity() / 4.0, 0.0);
    EXPECT_NEAR(oracle::min_eigenvalue(partial_transpose(werner_state(1.0))), -0.5, 1e-12);
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Matrix4c pt = partial_transpose(werner_state(p));
        EXPECT_NEAR(oracle::min_eigenvalue(pt), (1 - 3 * p) / 4, 1e-12) << p;
        EXPECT_NEAR(hermitian_eigenvalues(pt)(0), (1 - 3 * p) / 4, 1e-12) << p;
    }
}

TEST(PartialTranspose, MatchesOracleAndIsInvolution) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const oracle::M4 m = oracle::random_density(rng);
        const Matrix4c pt = partial_transpose(m);
        EXPECT_TRUE(pt.isApprox(oracle::partial_transpose_b(m), 1e-15));
        EXPECT_TRUE(partial_transpose(pt) == m);
        EXPECT_TRUE(pt.isApprox(pt.adjoint(), 1e-15));
        EXPECT_NEAR(pt.trace().real(), 1.0, 1e-12);
    }
}

TEST(PptClassify, Examples) {
    EXPECT_EQ(ppt_classify(werner_state(0.2)).classification, Separability::Separable);
    EXPECT_EQ(ppt_classify(werner_state(0.5)).classification, Separability::Entangled);
    const auto at = ppt_classify(werner_state(1.0 / 3.0), 1e-10);
    EXPECT_NEAR(at.min_pt_eigenvalue, 0.0, 1e-12);
    EXPECT_EQ(at.classification, Separability::Separable);
    EXPECT_FALSE(at.entangled());
}

TEST(PptClassify, FlipsOnceAtOneThird) {
    int flips = 0;
    double flip_at = -1;
    bool prev = ppt_classify(werner_state(0.0)).entangled();
    for (int i = 1; i <= 10000; ++i) {
        const double p = i / 10000.0;
        const bool e = ppt_classify(werner_state(p)).entangled();
        if (e != prev) {
            ++flips;
            flip_at = p;
        }
        prev = e;
    }
    EXPECT_EQ(flips, 1);
    EXPECT_NEAR(flip_at, 1.0 / 3.0, 1e-4);
}

TEST(PptClassify, ProductStatesSeparable) {
    for (const auto& s : {settings::z(), settings::x(), settings::z_plus_x()}) {
        for (Outcome o : kOutcomes) {
            const auto e = PureState2::eigenstate(s, o);
            EXPECT_FALSE(ppt_classify(product_state(e, e)).entangled());
        }
    }
}

TEST(Mixture, Linear) {
    const auto h = PureState2::eigenstate(settings::z(), Outcome::Plus);
    const auto v = PureState2::eigenstate(settings::z(), Outcome::Minus);
    const auto m = mixture(0.5, product_state(h, v), product_state(v, h));
    EXPECT_NEAR(m.matrix()(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(m.matrix()(2, 2).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(m.matrix()(1, 2)), 0.0, 1e-15);
    EXPECT_THROW(mixture(1.5, m, m), DomainError);
}

#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's numerics.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

constexpr double kPi = 3.14159265358979323846;

inline double deg(double d) { return d * kPi / 180.0; }

// Rows: eigenvectors |+>, |-> of a Bloch X-Z plane rotation, in the Z basis.
inline M2 rotation_rows(double bloch_deg) {
    const double c = std::cos(deg(bloch_deg) / 2);
    const double s = std::sin(deg(bloch_deg) / 2);
    M2 m;
    m << c, s, -s, c;
    return m;
}

inline M4 kron(const M2& a, const M2& b) {
    M4 k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int r = 0; r < 2; ++r)
                for (int s = 0; s < 2; ++s) k(2 * i + r, 2 * j + s) = a(i, j) * b(r, s);
    return k;
}

// rho' (k, l) = <e_k| rho |e_l> with |e_k> the product eigenvectors given as
// rows of a (x) b.
inline M4 to_basis(const M4& rho_z, const M2& rows1, const M2& rows2) {
    const M4 e = kron(rows1, rows2);
    M4 out;
    for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) {
            C sum = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) sum += std::conj(e(k, a)) * rho_z(a, b) * e(l, b);
            out(k, l) = sum;
        }
    }
    return out;
}

// rho_w(p) with |Psi+> = (|HV> + |VH>)/sqrt2, indices 2*j1 + j2.
inline M4 werner(double p) {
    M4 m = M4::Identity() * ((1 - p) / 4);
    m(1, 1) += p / 2;
    m(2, 2) += p / 2;
    m(1, 2) += p / 2;
    m(2, 1) += p / 2;
    return m;
}

inline M4 partial_transpose_b(const M4& m) {
    M4 out;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2) out(2 * i1 + i2, 2 * j1 + j2) = m(2 * i1 + j2, 2 * j1 + i2);
    return out;
}

inline double min_eigenvalue(const M4& m) {
    Eigen::ComplexEigenSolver<M4> es(m);
    double lo = 1e300;
    for (int i = 0; i < 4; ++i) lo = std::min(lo, es.eigenvalues()(i).real());
    return lo;
}

// <A (x) B> for Pauli-like observables built from rows: |+><+| - |-><-|.
inline double correlation(const M4& rho_z, const M2& rows1, const M2& rows2) {
    const M4 r = to_basis(rho_z, rows1, rows2);
    return (r(0, 0) + r(3, 3) - r(1, 1) - r(2, 2)).real();
}

// Composite Simpson on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Truncated Gaussian exp[-(x-c)^2/w^2] normalized on [lo, hi].
struct TruncGauss {
    double c, w, norm;
    TruncGauss(double c_, double w_, double lo = 0, double hi = 180) : c(c_), w(w_) {
        norm = std::sqrt(kPi) * w / 2 * (std::erf((hi - c) / w) - std::erf((lo - c) / w));
    }
    double operator()(double x) const { return std::exp(-(x - c) * (x - c) / (w * w)) / norm; }
};

// Random density matrix: G G^dagger / tr with complex Gaussian G.
inline M4 random_density(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    M4 g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = C(n(rng), n(rng));
    M4 r = g * g.adjoint();
    return r / r.trace().real();
}

// Upper 4-sigma half width of a binomial / multinomial cell frequency.
inline double four_sigma(double p, double n) { return 4.0 * std::sqrt(std::max(p * (1 - p), 1e-12) / n); }

}  // namespace oracle

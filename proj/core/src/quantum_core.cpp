#include "contbell/quantum_core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "contbell/errors.hpp"

namespace contbell {

namespace {

constexpr double kUnitaryTol = 1e-12;
constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;

// Bra-side transform for a product basis: rho_new = W rho_ref W^dagger.
Matrix4c bra_transform(const MeasurementSetting& a, const MeasurementSetting& b) {
    return kron(a.coeffs(), b.coeffs()).conjugate();
}

}  // namespace

const char* outcome_symbol(Outcome o) { return o == Outcome::Plus ? "+" : "-"; }

MeasurementSetting::MeasurementSetting(std::string label, std::optional<double> angle,
                                       Matrix2c coeffs)
    : label_(std::move(label)), bloch_angle_(angle), coeffs_(std::move(coeffs)) {
    const double err = (coeffs_ * coeffs_.adjoint() - Matrix2c::Identity()).cwiseAbs().maxCoeff();
    if (!(err <= kUnitaryTol)) {
        std::ostringstream os;
        os << "measurement setting '" << label_ << "' coefficients are not unitary (error " << err
           << ")";
        throw ValidationError(os.str());
    }
}

MeasurementSetting MeasurementSetting::rotation(std::string label, double bloch_degrees) {
    const double half = bloch_degrees * std::numbers::pi / 360.0;
    const double c = std::cos(half);
    const double s = std::sin(half);
    Matrix2c m;
    m << c, s, -s, c;
    return MeasurementSetting(std::move(label), bloch_degrees, m);
}

MeasurementSetting MeasurementSetting::from_coefficients(std::string label,
                                                         const Matrix2c& coeffs) {
    return MeasurementSetting(std::move(label), std::nullopt, coeffs);
}

Vector2c MeasurementSetting::eigenvector(Outcome o) const {
    return coeffs_.row(static_cast<int>(o)).transpose();
}

Matrix2c MeasurementSetting::basis_change_to(const MeasurementSetting& other) const {
    // a[i][j] = <phi_other^j | phi_this^i>
    return coeffs_ * other.coeffs_.adjoint();
}

bool MeasurementSetting::same_basis(const MeasurementSetting& other, double tol) const {
    return (coeffs_ - other.coeffs_).cwiseAbs().maxCoeff() <= tol;
}

namespace settings {

MeasurementSetting z() { return MeasurementSetting::rotation("Z", 0.0); }
MeasurementSetting x() { return MeasurementSetting::rotation("X", 90.0); }
MeasurementSetting z_plus_x() { return MeasurementSetting::rotation("ZpX", 45.0); }
MeasurementSetting z_minus_x() { return MeasurementSetting::rotation("ZmX", -45.0); }

MeasurementSetting y() {
    const double h = 1.0 / std::numbers::sqrt2;
    const Complex i{0.0, 1.0};
    Matrix2c m;
    m << h, i * h, -i * h, -h;
    return MeasurementSetting::from_coefficients("Y", m);
}

MeasurementSetting by_label(const std::string& label) {
    if (label == "Z") return z();
    if (label == "X") return x();
    if (label == "ZpX") return z_plus_x();
    if (label == "ZmX") return z_minus_x();
    if (label == "Y") return y();
    throw UsageError("unknown measurement setting '" + label + "' (expected Z, X, ZpX, ZmX or Y)");
}

}  // namespace settings

PureState2::PureState2(MeasurementSetting setting, Complex plus, Complex minus)
    : setting_(std::move(setting)), amplitudes_{plus, minus} {
    const double norm = std::norm(plus) + std::norm(minus);
    if (std::abs(norm - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "pure state amplitudes have squared norm " << norm << ", expected 1";
        throw ValidationError(os.str());
    }
}

PureState2 PureState2::eigenstate(const MeasurementSetting& setting, Outcome o) {
    return o == Outcome::Plus ? PureState2(setting, 1.0, 0.0) : PureState2(setting, 0.0, 1.0);
}

Vector2c PureState2::in_reference() const {
    Vector2c alpha(amplitudes_[0], amplitudes_[1]);
    return setting_.coeffs().transpose() * alpha;
}

BipartiteDensity::BipartiteDensity(Matrix4c matrix, MeasurementSetting first,
                                   MeasurementSetting second, double psd_tolerance)
    : matrix_(std::move(matrix)), basis_(std::move(first), std::move(second)) {
    const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (!(herm <= kHermitianTol)) {
        std::ostringstream os;
        os << "density matrix is not Hermitian (max |rho - rho^dagger| = " << herm << ")";
        throw ValidationError(os.str());
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - Complex(1.0)) > kTraceTol) {
        std::ostringstream os;
        os << "density matrix trace is " << tr << ", expected 1";
        throw ValidationError(os.str());
    }
    const double lowest = hermitian_eigenvalues(matrix_)(0);
    if (lowest < -psd_tolerance) {
        std::ostringstream os;
        os << "density matrix is not positive semidefinite (min eigenvalue " << lowest << ")";
        throw ValidationError(os.str());
    }
}

BipartiteDensity BipartiteDensity::in_reference(Matrix4c matrix, double psd_tolerance) {
    return BipartiteDensity(std::move(matrix), settings::z(), settings::z(), psd_tolerance);
}

Matrix4c BipartiteDensity::reference_matrix() const {
    const Matrix4c w = bra_transform(basis_.first, basis_.second);
    return w.adjoint() * matrix_ * w;
}

Eigen::Vector4d BipartiteDensity::eigenvalues() const { return hermitian_eigenvalues(matrix_); }

BipartiteDensity product_state(const PureState2& a, const PureState2& b) {
    const Vector2c va = a.in_reference();
    const Vector2c vb = b.in_reference();
    Vector4c psi;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) psi(2 * i + j) = va(i) * vb(j);
    return pure_state(psi);
}

BipartiteDensity pure_state(const Vector4c& amplitudes_in_reference) {
    const double norm = amplitudes_in_reference.squaredNorm();
    if (std::abs(norm - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "two-particle amplitudes have squared norm " << norm << ", expected 1";
        throw ValidationError(os.str());
    }
    Matrix4c rho = amplitudes_in_reference * amplitudes_in_reference.adjoint();
    return BipartiteDensity::in_reference(rho);
}

BipartiteDensity mixture(double weight, const BipartiteDensity& a, const BipartiteDensity& b) {
    if (!(weight >= 0.0 && weight <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
    Matrix4c m = weight * a.reference_matrix() + (1.0 - weight) * b.reference_matrix();
    m = 0.5 * (m + m.adjoint()).eval();
    return BipartiteDensity::in_reference(m);
}

const char* to_string(Separability s) {
    return s == Separability::Entangled ? "Entangled" : "Separable";
}

BipartiteDensity werner_state(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "Werner parameter p = " << p << " outside [0, 1]";
        throw DomainError(os.str());
    }
    Matrix4c m = Matrix4c::Zero();
    m(0, 0) = m(3, 3) = (1.0 - p) / 4.0;
    m(1, 1) = m(2, 2) = (1.0 + p) / 4.0;
    m(1, 2) = m(2, 1) = p / 2.0;
    return BipartiteDensity::in_reference(m);
}

BipartiteDensity transform_density(const BipartiteDensity& rho, const MeasurementSetting& first,
                                   const MeasurementSetting& second) {
    const Matrix4c w_old = bra_transform(rho.first(), rho.second());
    const Matrix4c w_new = bra_transform(first, second);
    const Matrix4c u = w_new * w_old.adjoint();
    Matrix4c m = u * rho.matrix() * u.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    // Unitary conjugation preserves the spectrum; positivity was checked
    // when rho was built, possibly with a looser tolerance.
    return BipartiteDensity(m, first, second, std::numeric_limits<double>::infinity());
}

Matrix4c partial_transpose(const Matrix4c& m) {
    Matrix4c pt;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int j1 = 0; j1 < 2; ++j1)
                for (int j2 = 0; j2 < 2; ++j2)
                    pt(2 * i1 + i2, 2 * j1 + j2) = m(2 * i1 + j2, 2 * j1 + i2);
    return pt;
}

Matrix4c partial_transpose(const BipartiteDensity& rho) { return partial_transpose(rho.matrix()); }

EntanglementVerdict ppt_classify(const BipartiteDensity& rho, double tolerance) {
    EntanglementVerdict v;
    v.tolerance = tolerance;
    v.min_pt_eigenvalue = hermitian_eigenvalues(partial_transpose(rho))(0);
    v.classification =
        v.min_pt_eigenvalue < -tolerance ? Separability::Entangled : Separability::Separable;
    return v;
}

Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m) {
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
    Matrix4c k;
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j2 = 0; j2 < 2; ++j2) k(2 * i1 + i2, 2 * j1 + j2) = a(i1, j1) * b(i2, j2);
    return k;
}

}  // namespace contbell

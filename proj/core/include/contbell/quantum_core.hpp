#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace contbell {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector2c = Eigen::Vector2cd;
using Vector4c = Eigen::Vector4cd;

// Two-outcome label of a single-particle measurement. The numeric value is
// the row index in a setting's coefficient matrix.
enum class Outcome : int { Plus = 0, Minus = 1 };

constexpr std::array<Outcome, 2> kOutcomes{Outcome::Plus, Outcome::Minus};

// Index of |j1 j2> in a product basis: 2*j1 + j2, i.e. ++, +-, -+, --.
constexpr int pair_index(Outcome first, Outcome second) {
    return 2 * static_cast<int>(first) + static_cast<int>(second);
}

const char* outcome_symbol(Outcome o);

/// A two-outcome single-particle measurement basis.
///
/// Row i of coeffs() holds the eigenstate |phi^i> expanded in the reference
/// (Z, i.e. |H>,|V>) basis. Rotations in the Bloch X-Z plane by angle phi
/// produce |+> = cos(phi/2)|H> + sin(phi/2)|V> and
/// |-> = -sin(phi/2)|H> + cos(phi/2)|V>.
class MeasurementSetting {
public:
    static MeasurementSetting rotation(std::string label, double bloch_degrees);
    // Arbitrary unitary coefficient matrix; bloch_angle() is empty.
    static MeasurementSetting from_coefficients(std::string label, const Matrix2c& coeffs);

    const std::string& label() const noexcept { return label_; }
    std::optional<double> bloch_angle() const noexcept { return bloch_angle_; }
    const Matrix2c& coeffs() const noexcept { return coeffs_; }

    // Eigenstate amplitudes in the reference basis.
    Vector2c eigenvector(Outcome o) const;

    // a_{this,other}: rows express this setting's eigenstates in the
    // eigenbasis of `other`.
    Matrix2c basis_change_to(const MeasurementSetting& other) const;

    // Same eigenbasis, irrespective of label.
    bool same_basis(const MeasurementSetting& other, double tol = 1e-12) const;

    friend bool operator==(const MeasurementSetting& a, const MeasurementSetting& b) {
        return a.label_ == b.label_ && a.same_basis(b);
    }

private:
    MeasurementSetting(std::string label, std::optional<double> angle, Matrix2c coeffs);

    std::string label_;
    std::optional<double> bloch_angle_;
    Matrix2c coeffs_;
};

namespace settings {
MeasurementSetting z();          // |H>, |V>
MeasurementSetting x();          // Bloch angle 90
MeasurementSetting z_plus_x();   // (Z+X)/sqrt2, Bloch angle 45
MeasurementSetting z_minus_x();  // (Z-X)/sqrt2, Bloch angle -45
// Y eigenbasis (|H> + i|V>)/sqrt2, (-i|H> - |V>)/sqrt2. The phase of the
// second row keeps a^{+-} + a^{-+} = 0 relative to Z.
MeasurementSetting y();
// Looks up one of the names above: Z, X, ZpX, ZmX, Y.
MeasurementSetting by_label(const std::string& label);
}  // namespace settings

/// Single-particle pure state expressed in a setting's eigenbasis.
class PureState2 {
public:
    PureState2(MeasurementSetting setting, Complex plus, Complex minus);

    static PureState2 eigenstate(const MeasurementSetting& setting, Outcome o);

    const MeasurementSetting& setting() const noexcept { return setting_; }
    const std::array<Complex, 2>& amplitudes() const noexcept { return amplitudes_; }
    Vector2c in_reference() const;

private:
    MeasurementSetting setting_;
    std::array<Complex, 2> amplitudes_;
};

/// 4x4 density matrix of a two-qubit state, with the product eigenbasis its
/// entries are expressed in. Construction enforces Hermiticity (1e-12),
/// unit trace (1e-12) and positivity (eigenvalues >= -psd_tolerance).
class BipartiteDensity {
public:
    BipartiteDensity(Matrix4c matrix, MeasurementSetting first, MeasurementSetting second,
                     double psd_tolerance = 1e-10);

    // Matrix given in the (Z, Z) basis.
    static BipartiteDensity in_reference(Matrix4c matrix, double psd_tolerance = 1e-10);

    const Matrix4c& matrix() const noexcept { return matrix_; }
    const MeasurementSetting& first() const noexcept { return basis_.first; }
    const MeasurementSetting& second() const noexcept { return basis_.second; }

    // Same state written in the (Z, Z) basis.
    Matrix4c reference_matrix() const;
    Eigen::Vector4d eigenvalues() const;

private:
    Matrix4c matrix_;
    std::pair<MeasurementSetting, MeasurementSetting> basis_;
};

BipartiteDensity product_state(const PureState2& a, const PureState2& b);
BipartiteDensity pure_state(const Vector4c& amplitudes_in_reference);
// weight * a + (1 - weight) * b, in the (Z, Z) basis.
BipartiteDensity mixture(double weight, const BipartiteDensity& a, const BipartiteDensity& b);

enum class Separability { Entangled, Separable };

/// PPT verdict. For 2x2 systems the criterion is necessary and sufficient,
/// so "Separable" is only meaningful at this dimension.
struct EntanglementVerdict {
    double min_pt_eigenvalue = 0.0;
    double tolerance = 0.0;
    Separability classification = Separability::Separable;

    bool entangled() const noexcept { return classification == Separability::Entangled; }
};

const char* to_string(Separability s);

/// rho_w(p) = p |Psi+><Psi+| + (1-p) I/4 with |Psi+> = (|HV> + |VH>)/sqrt2,
/// in the (Z, Z) basis.
BipartiteDensity werner_state(double p);

BipartiteDensity transform_density(const BipartiteDensity& rho, const MeasurementSetting& first,
                                   const MeasurementSetting& second);

// Transpose on the second subsystem of rho's own basis.
Matrix4c partial_transpose(const BipartiteDensity& rho);
Matrix4c partial_transpose(const Matrix4c& m);

// Entangled iff min eig(rho^{T_B}) < -tolerance.
EntanglementVerdict ppt_classify(const BipartiteDensity& rho, double tolerance = 1e-10);

// Ascending eigenvalues of a Hermitian 4x4 matrix.
Eigen::Vector4d hermitian_eigenvalues(const Matrix4c& m);

Matrix4c kron(const Matrix2c& a, const Matrix2c& b);

}  // namespace contbell

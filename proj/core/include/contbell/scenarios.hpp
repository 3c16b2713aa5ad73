#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contbell/bell.hpp"
#include "contbell/montecarlo.hpp"
#include "contbell/quantum_core.hpp"
#include "contbell/spectra.hpp"

namespace contbell {

// Parametric stand-ins for the Z-basis angular distributions of scattered HD:
//   f_H(theta) ~ exp[-(theta - 90)^2 / 30^2]
//   f_V(theta) ~ exp[-(theta - 45)^2 / 25^2] + exp[-(theta - 135)^2 / 25^2]
// truncated to the space and renormalized.
SpectralProfile standin_z_profile(const OutcomeSpace& space = OutcomeSpace::continuous());

// Default profile for each named setting: Z uses the stand-in above, ZpX the
// Gaussian pair (30, 150, width 40), and X, ZmX and Y are projective.
SpectralProfile default_profile(const std::string& label,
                                const OutcomeSpace& space = OutcomeSpace::continuous());

/// Profile per setting label; anything not overridden falls back to
/// default_profile.
class ProfileLibrary {
public:
    explicit ProfileLibrary(OutcomeSpace space = OutcomeSpace::continuous());

    void set(SpectralProfile profile);
    SpectralProfile get(const std::string& label) const;
    bool overridden(const std::string& label) const { return overrides_.count(label) > 0; }
    const OutcomeSpace& space() const noexcept { return space_; }

private:
    OutcomeSpace space_;
    std::map<std::string, SpectralProfile> overrides_;
};

enum class ProductState { HH, VV, PlusPlus, MinusMinus };
enum class SpinCase { I, II, III };

/// Tagged state description, as written in a scenario file.
struct StateSpec {
    enum class Kind { Product, Werner, SpinCase, CustomMatrix };

    Kind kind = Kind::Werner;
    ProductState product = ProductState::HH;
    double p = 1.0;
    SpinCase spin = SpinCase::II;
    Matrix4c custom = Matrix4c::Zero();  // (Z, Z) basis

    BipartiteDensity build() const;
    std::string describe() const;
};

const char* to_string(ProductState s);
const char* to_string(SpinCase c);

// Case I: |++>; Case II: |Psi+> (Werner p = 1); Case III: equal mixture of
// |HV> and |VH>.
BipartiteDensity spin_case_state(SpinCase c);

/// Settings for the four HD branches.
struct ChannelLabels {
    std::string first_scattered = "Z";
    std::string first_unscattered = "X";
    std::string second_scattered = "ZpX";
    std::string second_unscattered = "ZmX";
};

SimConfig make_sim_config(const BipartiteDensity& state, const ChannelLabels& channels,
                          const ProfileLibrary& profiles);

// r, q from channel I (scattered, unscattered) and t, s from channel II.
ChshSettings chsh_settings(const ChannelLabels& channels, const ProfileLibrary& profiles);

// Separate substream family per sweep point / configuration.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace contbell

#include "contbell/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "contbell/errors.hpp"

namespace contbell {

namespace {

std::vector<double> gaussian_sum(const OutcomeSpace& space, std::initializer_list<double> centers,
                                 double width) {
    std::vector<double> f(space.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (double c : centers) {
            const double d = (space.nodes()[i] - c) / width;
            f[i] += std::exp(-d * d);
        }
    }
    return f;
}

}  // namespace

SpectralProfile standin_z_profile(const OutcomeSpace& space) {
    if (!space.is_continuous()) throw UsageError("the Z stand-in profile needs a continuous space");
    return SpectralProfile::normalized(settings::z(), space, gaussian_sum(space, {90.0}, 30.0),
                                       gaussian_sum(space, {45.0, 135.0}, 25.0));
}

SpectralProfile default_profile(const std::string& label, const OutcomeSpace& space) {
    if (label == "Z") return standin_z_profile(space);
    if (label == "ZpX") return gaussian_profile(settings::z_plus_x(), 30.0, 150.0, 40.0, space);
    return projective_profile(settings::by_label(label));
}

ProfileLibrary::ProfileLibrary(OutcomeSpace space) : space_(std::move(space)) {}

void ProfileLibrary::set(SpectralProfile profile) {
    const std::string label = profile.setting().label();
    overrides_.insert_or_assign(label, std::move(profile));
}

SpectralProfile ProfileLibrary::get(const std::string& label) const {
    if (auto it = overrides_.find(label); it != overrides_.end()) return it->second;
    return default_profile(label, space_);
}

const char* to_string(ProductState s) {
    switch (s) {
        case ProductState::HH: return "HH";
        case ProductState::VV: return "VV";
        case ProductState::PlusPlus: return "++";
        case ProductState::MinusMinus: return "--";
    }
    return "?";
}

const char* to_string(SpinCase c) {
    switch (c) {
        case SpinCase::I: return "I";
        case SpinCase::II: return "II";
        case SpinCase::III: return "III";
    }
    return "?";
}

BipartiteDensity spin_case_state(SpinCase c) {
    switch (c) {
        case SpinCase::I: {
            const auto plus = PureState2::eigenstate(settings::x(), Outcome::Plus);
            return product_state(plus, plus);
        }
        case SpinCase::II: return werner_state(1.0);
        case SpinCase::III: {
            const auto h = PureState2::eigenstate(settings::z(), Outcome::Plus);
            const auto v = PureState2::eigenstate(settings::z(), Outcome::Minus);
            return mixture(0.5, product_state(h, v), product_state(v, h));
        }
    }
    throw UsageError("unknown spin case");
}

BipartiteDensity StateSpec::build() const {
    switch (kind) {
        case Kind::Werner: return werner_state(p);
        case Kind::SpinCase: return spin_case_state(spin);
        case Kind::CustomMatrix: return BipartiteDensity::in_reference(custom);
        case Kind::Product: {
            const bool x_basis = product == ProductState::PlusPlus || product == ProductState::MinusMinus;
            const bool minus = product == ProductState::VV || product == ProductState::MinusMinus;
            const auto s = PureState2::eigenstate(x_basis ? settings::x() : settings::z(),
                                                  minus ? Outcome::Minus : Outcome::Plus);
            return product_state(s, s);
        }
    }
    throw UsageError("unknown state kind");
}

std::string StateSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Werner: os << "werner(p=" << p << ")"; break;
        case Kind::SpinCase: os << "spin_case(" << to_string(spin) << ")"; break;
        case Kind::Product: os << "product(" << to_string(product) << ")"; break;
        case Kind::CustomMatrix: os << "custom_matrix"; break;
    }
    return os.str();
}

SimConfig make_sim_config(const BipartiteDensity& state, const ChannelLabels& channels,
                          const ProfileLibrary& profiles) {
    return SimConfig{.state = state,
                     .first = {profiles.get(channels.first_scattered),
                               profiles.get(channels.first_unscattered)},
                     .second = {profiles.get(channels.second_scattered),
                                profiles.get(channels.second_unscattered)}};
}

ChshSettings chsh_settings(const ChannelLabels& channels, const ProfileLibrary& profiles) {
    return ChshSettings(profiles.get(channels.first_scattered),
                        profiles.get(channels.first_unscattered),
                        profiles.get(channels.second_scattered),
                        profiles.get(channels.second_unscattered));
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(seed, ~index).next_u64();
}

}  // namespace contbell

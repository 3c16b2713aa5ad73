#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "contbell/bell.hpp"
#include "contbell/histogram.hpp"
#include "contbell/quantum_core.hpp"
#include "contbell/rng.hpp"
#include "contbell/spectra.hpp"

namespace contbell {

/// Scattered/unscattered path of a pair through the two channels.
enum class Branch : int {
    ScatteredScattered = 0,
    ScatteredUnscattered = 1,
    UnscatteredScattered = 2,
    UnscatteredUnscattered = 3,
};

constexpr std::array<Branch, 4> kBranches{Branch::ScatteredScattered, Branch::ScatteredUnscattered,
                                          Branch::UnscatteredScattered,
                                          Branch::UnscatteredUnscattered};

const char* branch_name(Branch b);
Branch branch_from_name(const std::string& name);
constexpr Branch branch_of(bool first_scattered, bool second_scattered) {
    return static_cast<Branch>((first_scattered ? 0 : 2) + (second_scattered ? 0 : 1));
}

/// Measurement applied to a channel's molecule depending on whether it
/// scattered. Default HD design: channel I uses Z / X, channel II uses
/// (Z+X)/sqrt2 / (Z-X)/sqrt2.
struct ChannelDesign {
    SpectralProfile scattered;
    SpectralProfile unscattered;

    const SpectralProfile& profile(bool was_scattered) const {
        return was_scattered ? scattered : unscattered;
    }
};

struct SimConfig {
    std::uint64_t n_pairs = 1'000'000;
    double p_scatter = 0.4;
    std::uint64_t seed = 0;
    std::size_t bins = 18;  // per continuous axis
    BipartiteDensity state;
    ChannelDesign first;
    ChannelDesign second;
    unsigned workers = 0;  // 0: default_worker_count()

    void validate() const;
    // Profiles measured on the given branch, channel I then channel II.
    std::pair<const SpectralProfile&, const SpectralProfile&> branch_profiles(Branch b) const;
};

// hardware_concurrency(), capped by the CONTBELL_THREADS environment variable.
unsigned default_worker_count();

struct BranchFlags {
    bool first_scattered = false;
    bool second_scattered = false;

    Branch branch() const { return branch_of(first_scattered, second_scattered); }
};

// Independent draw per channel; scattered iff uniform <= p_scatter.
BranchFlags sample_branch(RandomStream& rng, double p_scatter);

/// Draws the joint eigenlabel (j1, j2) with probability A^{j1 j2} of the
/// state in the given measurement pair.
class JointOutcomeSampler {
public:
    JointOutcomeSampler(const BipartiteDensity& rho, const MeasurementSetting& first,
                        const MeasurementSetting& second);

    std::pair<Outcome, Outcome> operator()(RandomStream& rng) const;
    const std::array<double, 4>& weights() const noexcept { return weights_; }

private:
    std::array<double, 4> weights_{};
    std::array<double, 4> cumulative_{};
};

std::pair<Outcome, Outcome> sample_joint_outcome(const BipartiteDensity& rho,
                                                 const MeasurementSetting& first,
                                                 const MeasurementSetting& second,
                                                 RandomStream& rng);

/// Rejection sampler for a tabulated angular density: propose theta uniform
/// on [lo, hi] and a2 uniform, accept when a2 <= f(theta) / M with M the
/// table maximum. f between grid nodes is the linear interpolant.
class AngleSampler {
public:
    static constexpr std::uint64_t kMaxAttempts = 1'000'000;

    AngleSampler(const OutcomeSpace& space, std::span<const double> density);

    double operator()(RandomStream& rng) const;
    double envelope() const noexcept { return envelope_; }

private:
    OutcomeSpace space_;
    std::vector<double> density_;
    double envelope_ = 0.0;
};

double sample_angle(const SpectralProfile& profile, Outcome eigenstate, RandomStream& rng);

/// Per-branch pair counts and joint histograms of one simulation.
struct BranchTally {
    std::array<std::uint64_t, 4> pairs{};
    std::array<Histogram2D, 4> histograms;

    std::uint64_t n_pairs() const { return pairs[0] + pairs[1] + pairs[2] + pairs[3]; }
    const Histogram2D& histogram(Branch b) const { return histograms[static_cast<int>(b)]; }
    std::uint64_t count(Branch b) const { return pairs[static_cast<int>(b)]; }

    void merge(const BranchTally& other);

    friend bool operator==(const BranchTally&, const BranchTally&) = default;
};

// Empty tally with the binning implied by the config.
BranchTally empty_tally(const SimConfig& config);

// Simulates all config.n_pairs pairs, in parallel across workers. Result is
// independent of the worker count.
BranchTally run_experiment(const SimConfig& config);

// Pairs [first_pair, first_pair + count) on the calling thread. Tallies of
// disjoint ranges merge into the tally of their union.
BranchTally run_experiment_range(const SimConfig& config, std::uint64_t first_pair,
                                 std::uint64_t count);

// Binned CHSH estimate from the four branch histograms of one run. Each
// branch's setting pair must be one of (r,t), (r,s), (q,t), (q,s), and all
// four must be covered.
CorrelationReport estimate_chsh(const BranchTally& tally, const SimConfig& config,
                                const ChshSettings& settings);

}  // namespace contbell

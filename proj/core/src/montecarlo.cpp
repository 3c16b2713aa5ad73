#include "contbell/montecarlo.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "contbell/errors.hpp"

namespace contbell {

namespace {

// Draws one channel's recorded cell (histogram bin or label index) for a
// given eigenstate of its measurement.
class ChannelOutcomeDrawer {
public:
    ChannelOutcomeDrawer(const SpectralProfile& profile, Outcome eigenstate, HistogramAxis axis)
        : axis_(std::move(axis)) {
        const auto& dist = profile.dist(eigenstate);
        if (profile.space().is_continuous()) {
            angle_.emplace(profile.space(), dist);
        } else {
            cumulative_.resize(dist.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < dist.size(); ++i) cumulative_[i] = (acc += dist[i]);
        }
    }

    std::size_t operator()(RandomStream& rng) const {
        if (angle_) return axis_.bin_of((*angle_)(rng));
        const double u = rng.uniform() * cumulative_.back();
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
        // u > 0, so labels with zero probability are never returned.
        std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
        return std::min(idx, cumulative_.size() - 1);
    }

private:
    HistogramAxis axis_;
    std::optional<AngleSampler> angle_;
    std::vector<double> cumulative_;
};

struct BranchMachinery {
    JointOutcomeSampler joint;
    // [eigenstate] for each channel
    std::array<ChannelOutcomeDrawer, 2> first;
    std::array<ChannelOutcomeDrawer, 2> second;
};

BranchMachinery make_machinery(const SimConfig& config, Branch b) {
    auto [p1, p2] = config.branch_profiles(b);
    const auto a1 = HistogramAxis::for_space(p1.space(), config.bins);
    const auto a2 = HistogramAxis::for_space(p2.space(), config.bins);
    return BranchMachinery{
        JointOutcomeSampler(config.state, p1.setting(), p2.setting()),
        {ChannelOutcomeDrawer(p1, Outcome::Plus, a1), ChannelOutcomeDrawer(p1, Outcome::Minus, a1)},
        {ChannelOutcomeDrawer(p2, Outcome::Plus, a2), ChannelOutcomeDrawer(p2, Outcome::Minus, a2)}};
}

}  // namespace

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::ScatteredScattered: return "scattered_scattered";
        case Branch::ScatteredUnscattered: return "scattered_unscattered";
        case Branch::UnscatteredScattered: return "unscattered_scattered";
        case Branch::UnscatteredUnscattered: return "unscattered_unscattered";
    }
    return "?";
}

Branch branch_from_name(const std::string& name) {
    for (Branch b : kBranches)
        if (name == branch_name(b)) return b;
    throw UsageError("unknown branch '" + name + "'");
}

void SimConfig::validate() const {
    if (n_pairs < 1) throw UsageError("simulation needs n_pairs >= 1");
    if (!(p_scatter >= 0.0 && p_scatter <= 1.0))
        throw UsageError("p_scatter must lie in [0, 1]");
    if (bins < 1) throw UsageError("simulation needs bins >= 1");
}

std::pair<const SpectralProfile&, const SpectralProfile&> SimConfig::branch_profiles(
    Branch b) const {
    const bool s1 = b == Branch::ScatteredScattered || b == Branch::ScatteredUnscattered;
    const bool s2 = b == Branch::ScatteredScattered || b == Branch::UnscatteredScattered;
    return {first.profile(s1), second.profile(s2)};
}

unsigned default_worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CONTBELL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

BranchFlags sample_branch(RandomStream& rng, double p_scatter) {
    BranchFlags f;
    f.first_scattered = rng.uniform() <= p_scatter;
    f.second_scattered = rng.uniform() <= p_scatter;
    return f;
}

JointOutcomeSampler::JointOutcomeSampler(const BipartiteDensity& rho,
                                         const MeasurementSetting& first,
                                         const MeasurementSetting& second)
    : weights_(diag_coefficients(rho, first, second)) {
    double acc = 0.0;
    for (int k = 0; k < 4; ++k) cumulative_[k] = (acc += weights_[k]);
    cumulative_[3] = 1.0;
}

std::pair<Outcome, Outcome> JointOutcomeSampler::operator()(RandomStream& rng) const {
    const double u = rng.uniform();
    int k = 0;
    // First cell whose cumulative weight reaches u; zero-weight cells are
    // never selected because u > 0.
    while (k < 3 && u > cumulative_[k]) ++k;
    return {static_cast<Outcome>(k / 2), static_cast<Outcome>(k % 2)};
}

std::pair<Outcome, Outcome> sample_joint_outcome(const BipartiteDensity& rho,
                                                 const MeasurementSetting& first,
                                                 const MeasurementSetting& second,
                                                 RandomStream& rng) {
    return JointOutcomeSampler(rho, first, second)(rng);
}

AngleSampler::AngleSampler(const OutcomeSpace& space, std::span<const double> density)
    : space_(space), density_(density.begin(), density.end()) {
    if (!space.is_continuous()) throw UsageError("angle sampling needs a continuous space");
    if (density_.size() != space.size()) throw UsageError("density does not match the grid");
    envelope_ = *std::max_element(density_.begin(), density_.end());
    if (!(envelope_ > 0.0)) throw SamplingError("cannot sample from an all-zero density");
}

double AngleSampler::operator()(RandomStream& rng) const {
    const double lo = space_.lo();
    const double width = space_.hi() - space_.lo();
    for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        // uniform() is in (0, 1]; 1 - u maps it onto [0, 1).
        const double theta = lo + width * (1.0 - rng.uniform());
        const double a2 = rng.uniform();
        if (a2 * envelope_ <= interpolate(space_, density_, theta)) return theta;
    }
    throw SamplingError("rejection sampling exceeded the attempt cap");
}

double sample_angle(const SpectralProfile& profile, Outcome eigenstate, RandomStream& rng) {
    return AngleSampler(profile.space(), profile.dist(eigenstate))(rng);
}

void BranchTally::merge(const BranchTally& other) {
    for (int b = 0; b < 4; ++b) {
        pairs[b] += other.pairs[b];
        histograms[b].merge(other.histograms[b]);
    }
}

BranchTally empty_tally(const SimConfig& config) {
    BranchTally t;
    for (Branch b : kBranches) {
        auto [p1, p2] = config.branch_profiles(b);
        t.histograms[static_cast<int>(b)] =
            Histogram2D(HistogramAxis::for_space(p1.space(), config.bins),
                        HistogramAxis::for_space(p2.space(), config.bins));
    }
    return t;
}

BranchTally run_experiment_range(const SimConfig& config, std::uint64_t first_pair,
                                 std::uint64_t count) {
    config.validate();
    std::vector<BranchMachinery> machinery;
    machinery.reserve(4);
    for (Branch b : kBranches) machinery.push_back(make_machinery(config, b));

    BranchTally tally = empty_tally(config);
    for (std::uint64_t pair = first_pair; pair < first_pair + count; ++pair) {
        RandomStream rng(config.seed, pair);
        const BranchFlags flags = sample_branch(rng, config.p_scatter);
        const int b = static_cast<int>(flags.branch());
        const BranchMachinery& m = machinery[b];
        const auto [j1, j2] = m.joint(rng);
        const std::size_t bin1 = m.first[static_cast<int>(j1)](rng);
        const std::size_t bin2 = m.second[static_cast<int>(j2)](rng);
        tally.pairs[b] += 1;
        tally.histograms[b].add(bin1, bin2);
    }
    return tally;
}

BranchTally run_experiment(const SimConfig& config) {
    config.validate();
    const unsigned requested = config.workers == 0 ? default_worker_count() : config.workers;
    const std::uint64_t workers =
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(requested, config.n_pairs));
    if (workers == 1) return run_experiment_range(config, 0, config.n_pairs);

    std::vector<BranchTally> partial(workers);
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        const std::uint64_t chunk = config.n_pairs / workers;
        const std::uint64_t extra = config.n_pairs % workers;
        std::uint64_t begin = 0;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t n = chunk + (w < extra ? 1 : 0);
            threads.emplace_back([&, w, begin, n] {
                try {
                    partial[w] = run_experiment_range(config, begin, n);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
            begin += n;
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    BranchTally total = std::move(partial[0]);
    for (std::uint64_t w = 1; w < workers; ++w) total.merge(partial[w]);
    return total;
}

CorrelationReport estimate_chsh(const BranchTally& tally, const SimConfig& config,
                                const ChshSettings& settings) {
    // Slots in (r,t), (r,s), (q,t), (q,s) order.
    std::array<std::optional<double>, 4> e;
    for (Branch b : kBranches) {
        auto [p1, p2] = config.branch_profiles(b);
        int row = -1;
        int col = -1;
        if (p1.setting().same_basis(settings.r.setting)) row = 0;
        else if (p1.setting().same_basis(settings.q.setting)) row = 1;
        if (p2.setting().same_basis(settings.t.setting)) col = 0;
        else if (p2.setting().same_basis(settings.s.setting)) col = 1;
        if (row < 0 || col < 0) continue;

        const Histogram2D& h = tally.histogram(b);
        if (h.total() == 0) {
            throw UsageError(std::string("branch '") + branch_name(b) +
                             "' has no counts; cannot estimate its correlation");
        }
        e[2 * row + col] = correlation_from_histogram(h, build_aux(p1), build_aux(p2));
    }
    static constexpr const char* kPairNames[4] = {"(r,t)", "(r,s)", "(q,t)", "(q,s)"};
    for (int k = 0; k < 4; ++k) {
        if (!e[k]) {
            throw UsageError(std::string("branch mapping does not cover setting pair ") +
                             kPairNames[k]);
        }
    }
    return CorrelationReport::from_correlations(*e[0], *e[1], *e[2], *e[3],
                                                CorrelationMethod::BinnedEstimate);
}

}  // namespace contbell

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "contbell/spectra.hpp"

namespace contbell {

/// One channel's binning: uniform angular bins for a continuous outcome
/// space, or one cell per label for a discrete space.
class HistogramAxis {
public:
    static HistogramAxis uniform(double lo, double hi, std::size_t bins);
    static HistogramAxis from_edges(std::vector<double> edges);
    static HistogramAxis labeled(std::vector<std::string> labels);
    // Binning that matches a profile's outcome space.
    static HistogramAxis for_space(const OutcomeSpace& space, std::size_t bins);

    bool is_continuous() const noexcept { return !edges_.empty(); }
    std::size_t size() const noexcept {
        return is_continuous() ? edges_.size() - 1 : labels_.size();
    }
    const std::vector<double>& edges() const noexcept { return edges_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    double center(std::size_t bin) const;
    // Bin holding x; the upper edge belongs to the last bin.
    std::size_t bin_of(double x) const;
    // CSV cell text: %.17g bin center, or the label.
    std::string cell_name(std::size_t bin) const;

    friend bool operator==(const HistogramAxis&, const HistogramAxis&) = default;

private:
    std::vector<double> edges_;
    std::vector<std::string> labels_;
};

/// Binned joint counts of one measurement pair.
class Histogram2D {
public:
    Histogram2D() = default;
    Histogram2D(HistogramAxis first, HistogramAxis second);

    const HistogramAxis& first() const noexcept { return first_; }
    const HistogramAxis& second() const noexcept { return second_; }

    void add(std::size_t bin1, std::size_t bin2, std::uint64_t n = 1) {
        counts_[bin1 * second_.size() + bin2] += n;
        total_ += n;
    }
    std::uint64_t count(std::size_t bin1, std::size_t bin2) const {
        return counts_[bin1 * second_.size() + bin2];
    }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept { return total_; }

    void merge(const Histogram2D& other);

    friend bool operator==(const Histogram2D&, const Histogram2D&) = default;

private:
    HistogramAxis first_;
    HistogramAxis second_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// CSV with header "bin1_center_or_label,bin2_center_or_label,count", one row
// per cell in row-major order.
void write_histogram_csv(const std::filesystem::path& path, const Histogram2D& h);
std::string histogram_csv(const Histogram2D& h);
// The axes are not recoverable from the CSV alone; they come from the sidecar.
Histogram2D read_histogram_csv(const std::filesystem::path& path, const HistogramAxis& first,
                               const HistogramAxis& second);

}  // namespace contbell

#include "contbell/histogram.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "contbell/errors.hpp"

namespace contbell {

HistogramAxis HistogramAxis::uniform(double lo, double hi, std::size_t bins) {
    if (bins < 1) throw UsageError("histogram axis needs at least one bin");
    if (!(lo < hi)) throw UsageError("histogram axis requires lo < hi");
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    edges.back() = hi;
    return from_edges(std::move(edges));
}

HistogramAxis HistogramAxis::from_edges(std::vector<double> edges) {
    if (edges.size() < 2) throw UsageError("histogram axis needs at least two edges");
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (!(edges[i] > edges[i - 1]))
            throw ValidationError("histogram bin edges must be strictly increasing");
    }
    HistogramAxis a;
    a.edges_ = std::move(edges);
    return a;
}

HistogramAxis HistogramAxis::labeled(std::vector<std::string> labels) {
    if (labels.empty()) throw UsageError("labeled histogram axis needs at least one label");
    HistogramAxis a;
    a.labels_ = std::move(labels);
    return a;
}

HistogramAxis HistogramAxis::for_space(const OutcomeSpace& space, std::size_t bins) {
    return space.is_continuous() ? uniform(space.lo(), space.hi(), bins) : labeled(space.labels());
}

double HistogramAxis::center(std::size_t bin) const {
    if (!is_continuous()) throw UsageError("bin centers are defined only for continuous axes");
    return 0.5 * (edges_[bin] + edges_[bin + 1]);
}

std::size_t HistogramAxis::bin_of(double x) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    if (it == edges_.begin()) return 0;
    const auto idx = static_cast<std::size_t>(it - edges_.begin()) - 1;
    return std::min(idx, size() - 1);
}

std::string HistogramAxis::cell_name(std::size_t bin) const {
    if (!is_continuous()) return labels_.at(bin);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", center(bin));
    return buf;
}

Histogram2D::Histogram2D(HistogramAxis first, HistogramAxis second)
    : first_(std::move(first)), second_(std::move(second)), counts_(first_.size() * second_.size()) {}

void Histogram2D::merge(const Histogram2D& other) {
    if (!(first_ == other.first_) || !(second_ == other.second_))
        throw UsageError("cannot merge histograms with different binning");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
}

std::string histogram_csv(const Histogram2D& h) {
    std::string out = "bin1_center_or_label,bin2_center_or_label,count\n";
    for (std::size_t i = 0; i < h.first().size(); ++i) {
        const std::string a = h.first().cell_name(i);
        for (std::size_t j = 0; j < h.second().size(); ++j) {
            out += a;
            out += ',';
            out += h.second().cell_name(j);
            out += ',';
            out += std::to_string(h.count(i, j));
            out += '\n';
        }
    }
    return out;
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram2D& h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write histogram '" + path.string() + "'");
    out << histogram_csv(h);
}

Histogram2D read_histogram_csv(const std::filesystem::path& path, const HistogramAxis& first,
                               const HistogramAxis& second) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open histogram '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "bin1_center_or_label,bin2_center_or_label,count")
        throw ValidationError(path.string() + ": missing histogram CSV header");

    Histogram2D h(first, second);
    std::size_t row = 0;
    const std::size_t expected = first.size() * second.size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            std::ostringstream os;
            os << path.string() << ":" << row + 2 << ": " << msg;
            throw ValidationError(os.str());
        };
        if (row >= expected) fail("more rows than the axes allow");
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) fail("expected three fields");
        const std::size_t i = row / second.size();
        const std::size_t j = row % second.size();
        if (line.substr(0, c1) != first.cell_name(i) ||
            line.substr(c1 + 1, c2 - c1 - 1) != second.cell_name(j))
            fail("cell does not match the axis description");
        std::uint64_t n = 0;
        const char* b = line.data() + c2 + 1;
        const char* e = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(b, e, n);
        if (ec != std::errc() || ptr != e) fail("invalid count");
        h.add(i, j, n);
        ++row;
    }
    if (row != expected) throw ValidationError(path.string() + ": histogram has missing rows");
    return h;
}

}  // namespace contbell

#include "edtr/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "edtr/error.hpp"

namespace edtr {

std::string_view to_string(Partition p) {
    switch (p) {
        case Partition::Train: return "train";
        case Partition::Calib: return "calib";
        case Partition::Test: return "test";
    }
    return "test";
}

Partition partition_from_string(std::string_view name) {
    if (name == "train") return Partition::Train;
    if (name == "calib" || name == "calibration") return Partition::Calib;
    if (name == "test") return Partition::Test;
    throw Error(Errc::InvalidConfig, "unknown split name " + std::string(name));
}

SplitSpec SplitSpec::parse(std::string_view text) {
    constexpr std::string_view kPrefix = "train:calib:test=";
    if (!text.starts_with(kPrefix)) {
        throw Error(Errc::InvalidConfig, "split must look like train:calib:test=0.6:0.2:0.2");
    }
    std::istringstream in{std::string(text.substr(kPrefix.size()))};
    std::vector<double> parts;
    std::string cell;
    while (std::getline(in, cell, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw Error(Errc::InvalidConfig, "split fraction is not a number: " + cell);
        }
    }
    if (parts.size() != 3) throw Error(Errc::InvalidConfig, "split needs three fractions");
    for (double p : parts) {
        if (!(p >= 0.0)) throw Error(Errc::InvalidConfig, "split fractions must be non-negative");
    }
    if (std::abs(parts[0] + parts[1] + parts[2] - 1.0) > 1e-9) {
        throw Error(Errc::InvalidConfig, "split fractions must sum to 1");
    }
    return {parts[0], parts[1], parts[2]};
}

std::string SplitSpec::to_string() const {
    std::ostringstream out;
    out << "train:calib:test=" << train << ":" << calib << ":" << test;
    return out.str();
}

std::vector<Partition> assign_partitions(std::span<const ReasoningSample> samples, const SplitSpec& spec,
                                         std::uint64_t seed) {
    std::vector<Partition> out(samples.size(), Partition::Test);
    const bool named = !samples.empty() && std::all_of(samples.begin(), samples.end(),
                                                       [](const ReasoningSample& s) { return s.split.has_value(); });
    if (named) {
        for (std::size_t i = 0; i < samples.size(); ++i) out[i] = partition_from_string(*samples[i].split);
        return out;
    }
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n = static_cast<double>(samples.size());
    const auto n_train = static_cast<std::size_t>(std::llround(spec.train * n));
    const auto n_calib = std::min(static_cast<std::size_t>(std::llround(spec.calib * n)), samples.size() - n_train);
    for (std::size_t r = 0; r < order.size(); ++r) {
        out[order[r]] = r < n_train ? Partition::Train : (r < n_train + n_calib ? Partition::Calib : Partition::Test);
    }
    return out;
}

}  // namespace edtr

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edtr/ingest.hpp"

namespace edtr {

enum class Partition { Train, Calib, Test };

std::string_view to_string(Partition p);
Partition partition_from_string(std::string_view name);

struct SplitSpec {
    double train = 0.6;
    double calib = 0.2;
    double test = 0.2;

    /// Parses "train:calib:test=0.6:0.2:0.2" (the names are fixed; the
    /// fractions must be non-negative and sum to 1).
    static SplitSpec parse(std::string_view text);
    std::string to_string() const;
};

/// Uses each sample's named split when every sample has one; otherwise a
/// seeded shuffle cut by the spec's fractions.
std::vector<Partition> assign_partitions(std::span<const ReasoningSample> samples, const SplitSpec& spec,
                                         std::uint64_t seed);

}  // namespace edtr

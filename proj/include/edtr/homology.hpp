#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <json.hpp>

#include "edtr/geometry.hpp"

namespace edtr {

struct Bar {
    double birth = 0.0;
    double death = std::numeric_limits<double>::infinity();

    double persistence() const { return death - birth; }
    bool operator==(const Bar&) const = default;
};

struct Barcode {
    int dimension = 0;
    std::vector<Bar> bars;
};

inline constexpr std::size_t kDefaultH1Cap = 16;

/// k bars born at 0: the k-1 minimum-spanning-tree edge lengths (ascending)
/// plus one infinite bar.
Barcode h0_barcode(const DistanceSummary& summary);

/// Loops of the Vietoris-Rips filtration truncated at 2-simplices.
/// Zero-persistence pairs are dropped. Throws CloudTooLarge above `cap` points.
Barcode h1_barcode(const DistanceSummary& summary, std::size_t cap = kDefaultH1Cap);

struct PersistenceStats {
    double max_h0_death = 0.0;
    double sum_h0_deaths = 0.0;
    std::size_t h1_count = 0;
    double h1_total_persistence = 0.0;
};

PersistenceStats persistence_stats(const Barcode& h0, const Barcode& h1);

/// {"dim": d, "bars": [[birth, death|null], ...]} with null for an infinite death.
nlohmann::json barcode_to_json(const Barcode& barcode);
nlohmann::json persistence_stats_to_json(const PersistenceStats& stats);

}  // namespace edtr

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "edtr/error.hpp"
#include "edtr/homology.hpp"

namespace edtr {
namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

struct Simplex {
    double value;
    int dim;                        // 0, 1, or 2
    std::array<std::size_t, 3> v;  // sorted vertices, unused slots zero
};

bool filtration_order(const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.v < b.v;
}

// Column stored as ascending row indices; addition over Z/2 is symmetric difference.
using Column = std::vector<std::size_t>;

void add_into(Column& target, const Column& source) {
    Column out;
    out.reserve(target.size() + source.size());
    std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(), std::back_inserter(out));
    target.swap(out);
}

}  // namespace

Barcode h0_barcode(const DistanceSummary& summary) {
    const std::size_t k = summary.k;
    std::vector<std::size_t> order(summary.pairwise.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return summary.pairwise[a] < summary.pairwise[b]; });

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(summary.pairwise.size());
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) edges.emplace_back(i, j);
    }

    Barcode code{0, {}};
    DisjointSets sets(k);
    for (std::size_t e : order) {
        if (sets.unite(edges[e].first, edges[e].second)) code.bars.push_back({0.0, summary.pairwise[e]});
        if (code.bars.size() + 1 == k) break;
    }
    code.bars.push_back({0.0, std::numeric_limits<double>::infinity()});
    return code;
}

Barcode h1_barcode(const DistanceSummary& summary, std::size_t cap) {
    const std::size_t k = summary.k;
    if (k > cap) throw Error(Errc::CloudTooLarge, std::to_string(k) + " points exceeds cap " + std::to_string(cap));

    std::vector<Simplex> simplices;
    for (std::size_t i = 0; i < k; ++i) simplices.push_back({0.0, 0, {i, 0, 0}});
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) simplices.push_back({summary.distance(i, j), 1, {i, j, 0}});
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            for (std::size_t l = j + 1; l < k; ++l) {
                const double v = std::max({summary.distance(i, j), summary.distance(i, l), summary.distance(j, l)});
                simplices.push_back({v, 2, {i, j, l}});
            }
        }
    }
    std::sort(simplices.begin(), simplices.end(), filtration_order);

    // Position of each vertex / edge in filtration order, for boundary lookup.
    std::vector<std::size_t> vertex_pos(k);
    std::vector<std::size_t> edge_pos(k * k);
    for (std::size_t p = 0; p < simplices.size(); ++p) {
        const auto& s = simplices[p];
        if (s.dim == 0) vertex_pos[s.v[0]] = p;
        if (s.dim == 1) edge_pos[s.v[0] * k + s.v[1]] = p;
    }

    const std::size_t n = simplices.size();
    std::vector<Column> columns(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& s = simplices[p];
        if (s.dim == 1) {
            columns[p] = {vertex_pos[s.v[0]], vertex_pos[s.v[1]]};
        } else if (s.dim == 2) {
            columns[p] = {edge_pos[s.v[0] * k + s.v[1]], edge_pos[s.v[0] * k + s.v[2]], edge_pos[s.v[1] * k + s.v[2]]};
        }
        std::sort(columns[p].begin(), columns[p].end());
    }

    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> column_with_low(n, kNone);
    Barcode code{1, {}};
    for (std::size_t p = 0; p < n; ++p) {
        auto& col = columns[p];
        while (!col.empty() && column_with_low[col.back()] != kNone) add_into(col, columns[column_with_low[col.back()]]);
        if (col.empty()) continue;
        const std::size_t low = col.back();
        column_with_low[low] = p;
        if (simplices[p].dim == 2) {
            const double birth = simplices[low].value;
            const double death = simplices[p].value;
            if (death > birth) code.bars.push_back({birth, death});
        }
    }
    std::sort(code.bars.begin(), code.bars.end(),
              [](const Bar& a, const Bar& b) { return a.birth != b.birth ? a.birth < b.birth : a.death < b.death; });
    return code;
}

PersistenceStats persistence_stats(const Barcode& h0, const Barcode& h1) {
    PersistenceStats s;
    for (const auto& b : h0.bars) {
        if (!std::isfinite(b.death)) continue;
        s.max_h0_death = std::max(s.max_h0_death, b.death);
        s.sum_h0_deaths += b.death;
    }
    for (const auto& b : h1.bars) {
        ++s.h1_count;
        s.h1_total_persistence += b.persistence();
    }
    return s;
}

nlohmann::json barcode_to_json(const Barcode& barcode) {
    nlohmann::json bars = nlohmann::json::array();
    for (const auto& b : barcode.bars) {
        bars.push_back({b.birth, std::isfinite(b.death) ? nlohmann::json(b.death) : nlohmann::json(nullptr)});
    }
    return {{"dim", barcode.dimension}, {"bars", std::move(bars)}};
}

nlohmann::json persistence_stats_to_json(const PersistenceStats& s) {
    return {
        {"max_h0_death", s.max_h0_death},
        {"sum_h0_deaths", s.sum_h0_deaths},
        {"h1_count", s.h1_count},
        {"h1_total_persistence", s.h1_total_persistence},
    };
}

}  // namespace edtr

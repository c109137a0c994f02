#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "edtr/geometry.hpp"

namespace fixture {

inline std::vector<std::vector<double>> random_rows(std::mt19937_64& rng, std::size_t k, std::size_t dim,
                                                    double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    std::vector<std::vector<double>> rows(k, std::vector<double>(dim));
    for (auto& r : rows)
        for (auto& x : r) x = n(rng);
    return rows;
}

inline std::vector<std::vector<double>> collinear() { return {{0, 0}, {1, 0}, {2, 0}}; }
inline std::vector<std::vector<double>> unit_square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }
inline std::vector<std::vector<double>> identical(std::size_t k, std::vector<double> p = {1.0, 2.0, 3.0}) {
    return std::vector<std::vector<double>>(k, p);
}
// Two pairs 0.1 apart, pairs 10 apart.
inline std::vector<std::vector<double>> two_pairs() { return {{0, 0}, {0.1, 0}, {0, 10}, {0.1, 10}}; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("edtr-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace fixture

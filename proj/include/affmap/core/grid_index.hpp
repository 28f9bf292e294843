#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace affmap {

/// Uniform hash grid over 3D points for fixed-radius neighbor queries.
/// Query results preserve insertion order, so traversals are deterministic.
class GridIndex {
public:
    GridIndex(double cell_size, std::size_t expected = 0) : cell_(cell_size) {
        if (!(cell_ > 0.0)) cell_ = 1e-4;
        if (expected > 0) cells_.reserve(expected);
    }

    void insert(const Eigen::Vector3d& p, int payload) {
        cells_[key_of(p)].push_back(payload);
    }

    /// Visits payloads in the 3x3x3 cell neighborhood of p; covers every
    /// point within one cell size of p.
    template <typename Fn>
    void for_neighborhood(const Eigen::Vector3d& p, Fn&& fn) const {
        const auto [cx, cy, cz] = coords_of(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
                    if (it == cells_.end()) continue;
                    for (int payload : it->second) fn(payload);
                }
            }
        }
    }

    double cell_size() const { return cell_; }

private:
    std::tuple<std::int64_t, std::int64_t, std::int64_t> coords_of(const Eigen::Vector3d& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
                static_cast<std::int64_t>(std::floor(p.y() / cell_)),
                static_cast<std::int64_t>(std::floor(p.z() / cell_))};
    }

    static std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) {
        // 21 bits per axis, offset to keep coordinates positive.
        const std::uint64_t off = 1u << 20;
        return ((static_cast<std::uint64_t>(x + off) & 0x1fffff) << 42) |
               ((static_cast<std::uint64_t>(y + off) & 0x1fffff) << 21) |
               (static_cast<std::uint64_t>(z + off) & 0x1fffff);
    }

    std::uint64_t key_of(const Eigen::Vector3d& p) const {
        const auto [x, y, z] = coords_of(p);
        return pack(x, y, z);
    }

    double cell_ = 0.01;
    std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

}  // namespace affmap

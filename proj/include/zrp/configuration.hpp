// configuration.hpp — particle occupation numbers on the graph vertices.
#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "zrp/common.hpp"

namespace zrp {

struct Configuration {
    std::vector<std::int32_t> occupancy;  // indexed by flat vertex id
    std::int64_t total = 0;               // cached sum, maintained incrementally

    static Configuration zeros(std::int64_t n_vertices) {
        Configuration c;
        c.occupancy.assign(static_cast<std::size_t>(n_vertices), 0);
        c.total = 0;
        return c;
    }

    std::int64_t recount() const {
        return std::accumulate(occupancy.begin(), occupancy.end(), std::int64_t{0});
    }

    void move_particle(std::int32_t from, std::int32_t to) {
        if (occupancy[static_cast<std::size_t>(from)] <= 0) {
            throw ValidationError("move_particle: source vertex is empty");
        }
        --occupancy[static_cast<std::size_t>(from)];
        ++occupancy[static_cast<std::size_t>(to)];
    }
};

} // namespace zrp

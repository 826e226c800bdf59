#pragma once

#include <string>
#include <vector>

#include "diamond/cube.hpp"
#include "diamond/rng.hpp"

namespace fixtures {

using diamond::Cube;
using diamond::CubeBuilder;

// 6 products x 5 stores sales cube (measures in millions). Rows are emitted
// product-major with stores ordered Montreal, Miami, Paris, Berlin, Chicago;
// with immediate in-pass eviction this order yields the classic two-round
// deletion schedule (Chicago+TV first, then Berlin, Game console, DVD Player).
inline Cube sales_cube() {
    const char* products[] = {"TV", "Camcorder", "Phone", "Camera", "Game console", "DVD Player"};
    const char* stores[] = {"Montreal", "Miami", "Paris", "Berlin", "Chicago"};
    const double m[6][5] = {
        {0.9, 0.1, 0.9, 2.0, 3.4},  // TV
        {1.4, 3.1, 2.3, 2.1, 0.1},  // Camcorder
        {8.4, 2.1, 4.5, 0.1, 0.2},  // Phone
        {2.7, 6.3, 4.6, 3.5, 0.4},  // Camera
        {0.3, 0.3, 2.1, 1.5, 3.2},  // Game console
        {0.5, 0.5, 2.2, 2.3, 0.2},  // DVD Player
    };
    CubeBuilder b({"product", "store"}, "sales");
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j) b.add({products[i], stores[j]}, m[i][j]);
    return b.build();
}

inline std::string sales_csv() {
    const char* products[] = {"TV", "Camcorder", "Phone", "Camera", "Game console", "DVD Player"};
    const char* stores[] = {"Montreal", "Miami", "Paris", "Berlin", "Chicago"};
    const char* m[6][5] = {
        {"0.9", "0.1", "0.9", "2", "3.4"}, {"1.4", "3.1", "2.3", "2.1", "0.1"},
        {"8.4", "2.1", "4.5", "0.1", "0.2"}, {"2.7", "6.3", "4.6", "3.5", "0.4"},
        {"0.3", "0.3", "2.1", "1.5", "3.2"}, {"0.5", "0.5", "2.2", "2.3", "0.2"},
    };
    std::string out = "product,store,sales\n";
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 5; ++j)
            out += std::string(products[i]) + "," + stores[j] + "," + m[i][j] + "\n";
    return out;
}

// 10x10 two-cluster cube: a 16-cell upper-left block and a 15-cell circulant
// bottom-right quadrant in which every slice holds exactly 3 cells.
inline Cube two_cluster_cube() {
    CubeBuilder b({"row", "col"}, "measure");
    auto add = [&](int i, int j) {
        b.add({"r" + std::to_string(i), "c" + std::to_string(j)}, 1.0);
    };
    for (int j = 0; j <= 4; ++j) add(0, j);
    for (int j = 0; j <= 4; ++j) add(1, j);
    for (int i = 2; i <= 4; ++i) {
        add(i, 0);
        add(i, 1);
    }
    add(5, 5); add(5, 6); add(5, 7);
    add(6, 6); add(6, 7); add(6, 8);
    add(7, 7); add(7, 8); add(7, 9);
    add(8, 5); add(8, 8); add(8, 9);
    add(9, 5); add(9, 6); add(9, 9);
    return b.build();
}

// 4x4 checkerboard of +1/-1 measures: under SUM the even-index and odd-index
// 2x2 selections are incomparable maximal 2-carat cubes.
inline Cube checkerboard_cube() {
    CubeBuilder b({"row", "col"}, "measure");
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            b.add({"r" + std::to_string(i), "c" + std::to_string(j)},
                  (i + j) % 2 == 0 ? 1.0 : -1.0);
    return b.build();
}

// seeded random cube over the given shape; measures are integers in
// [0, max_measure] for SUM-friendly fixtures, or 1 when max_measure == 1
inline Cube random_cube(std::uint64_t seed, const std::vector<std::size_t>& shape, double density,
                        int max_measure = 1) {
    diamond::SplitMix64 rng(seed);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < shape.size(); ++j) names.push_back("d" + std::to_string(j));
    CubeBuilder b(names, "m");
    std::vector<std::size_t> idx(shape.size(), 0);
    std::vector<std::string> attrs(shape.size());
    for (;;) {
        if (rng.unit() < density) {
            for (std::size_t j = 0; j < shape.size(); ++j)
                attrs[j] = "v" + std::to_string(idx[j]);
            double m = max_measure <= 1
                           ? 1.0
                           : static_cast<double>(rng.below(static_cast<std::uint64_t>(max_measure) + 1));
            b.add(attrs, m);
        }
        std::size_t j = 0;
        while (j < shape.size()) {
            if (++idx[j] < shape[j]) break;
            idx[j] = 0;
            ++j;
        }
        if (j == shape.size()) break;
    }
    return b.build();
}

}  // namespace fixtures

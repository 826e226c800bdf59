#pragma once

#include <cstdint>
#include <vector>

#include "diamond/core.hpp"
#include "diamond/cube.hpp"
#include "diamond/dice.hpp"

namespace diamond {

/// Per-dimension cap on retained attribute values.
struct ShapeLimit {
    std::vector<std::size_t> p;

    static ShapeLimit uniform(std::size_t d, std::size_t value) {
        return ShapeLimit{std::vector<std::size_t>(d, value)};
    }
    void validate(std::size_t d) const;
    std::vector<std::size_t> effective(const Cube& cube) const;  // min(n_i, p_i)
};

struct DcldWork {
    std::uint64_t slice_deletions = 0;  // slices discarded while trimming to shape
    std::uint64_t swap_evals = 0;
    std::uint64_t swaps_applied = 0;
    std::uint64_t dice_probes = 0;
};

struct DcldResult {
    Cube subcube;
    double objective = 0.0;  // density for COUNT, total sum for SUM
    double total_sum = 0.0;
    double average = 0.0;    // sum / volume, reported for the SUM problem
    DcldWork work;
    bool fallback_whole_cube = false;  // no k >= 1 produced a qualifying diamond
    double seed_carats = 0.0;          // k whose diamond seeded the trim
};

struct DcldOptions {
    DiceOptions dice;
    std::uint64_t max_swap_evals = 10'000'000;  // local search state-space budget
};

/// density (COUNT) or total sum (SUM) of a cube against its own shape.
double dcld_objective(const Cube& cube, Aggregator agg);

/// Diamond-seeded heuristic: binary-search the largest uniform k whose diamond
/// still has at least min(n_i, p_i) values per dimension, then trim each
/// dimension in index order to the top-sigma values, re-ranking after every
/// dimension's trim. Ties in sigma break toward the smaller attribute id.
DcldResult dcld_diamond_heuristic(const Cube& cube, const ShapeLimit& limit, Aggregator agg,
                                  const DcldOptions& opts = {});

/// Greedy steepest-ascent local search over single-value swaps, dimensions
/// visited round-robin, starting from the top-sigma trim of the whole cube.
/// Swap deltas come from incrementally maintained slice cross-tallies; ties
/// break toward the smallest (retained, candidate) id pair. Stops after a
/// full cycle without an improving swap.
DcldResult dcld_local_search(const Cube& cube, const ShapeLimit& limit, Aggregator agg,
                             const DcldOptions& opts = {});

}  // namespace diamond

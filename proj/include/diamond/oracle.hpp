#pragma once

#include <cstdint>
#include <vector>

#include "diamond/core.hpp"
#include "diamond/cube.hpp"
#include "diamond/dice.hpp"

namespace diamond::oracle {

/// Enumeration limits, enforced before any work starts. Desk-scale only.
struct OracleBudget {
    double max_volume = 4096;          // diamond enumeration: cube volume cap
    double max_subset_combos = 1 << 24;  // diamond enumeration: prod 2^n_i cap
    double max_selections = 2'000'000;   // shape-limited enumeration cap
};

/// The unique maximal carat cube, computed as the union of every verifying
/// induced restriction. Independent of the streaming engine.
Cube brute_force_diamond(const Cube& cube, const CaratVector& carats, Aggregator agg,
                         const OracleBudget& budget = {});

struct DiamondReport {
    Cube diamond;                 // union of all maximal witnesses
    std::size_t maximal_witnesses = 0;
    bool unique = true;           // exactly one maximal witness
    bool union_verifies = true;   // induced cube on the unioned attributes still verifies
};

/// As above but also reports uniqueness, for non-monotone aggregators where
/// several incomparable maximal witnesses can exist.
DiamondReport brute_force_diamond_report(const Cube& cube, const CaratVector& carats,
                                         Aggregator agg, const OracleBudget& budget = {});

struct DcldOptimum {
    Cube subcube;
    double objective = 0.0;      // density for COUNT, total sum for SUM
    std::vector<std::vector<std::uint32_t>> selection;
};

/// Exhaustive optimum over every selection of min(n_i, p_i) attribute values
/// per dimension; ties resolved toward the smallest id tuple.
DcldOptimum brute_force_dcld(const Cube& cube, const std::vector<std::size_t>& limit,
                             Aggregator agg, const OracleBudget& budget = {});

}  // namespace diamond::oracle

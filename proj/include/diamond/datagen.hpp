#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "diamond/core.hpp"
#include "diamond/cube.hpp"

namespace diamond {

/// Power-distributed synthetic cube: each coordinate of a draw is
/// ceil(n_i * u^(1/a)) with u uniform on (0, 1], dimensions independent;
/// draws are collected until `target` distinct facts exist, all measures 1.
/// a = 1 gives uniform per-dimension values. Deterministic for a seed.
struct PowerGenSpec {
    std::vector<std::size_t> shape;
    double skew = 1.0;       // a
    std::size_t target = 0;  // distinct facts wanted
    std::uint64_t seed = 0;
};

Cube gen_power_cube(const PowerGenSpec& spec);

/// n x n COUNT cube with 2n cells whose 2-carat diamond is exactly the
/// upper-left 2x2 block and which the pruning loop can only peel one row and
/// one column per pass: two zigzag chains hang off the block, one from the
/// second column and one from the second row, each ending in a count-1 slice.
Cube gen_adversarial_chain(std::size_t n);

/// d-dimensional cube with n_i = 2 and all 2^d cells allocated, measure 1.
Cube gen_full_binary_cube(std::size_t d);

struct PerturbSpec {
    double p_missing = 0.0;
    std::uint64_t seed = 0;
};

/// Drops each cell independently with probability p_missing; dimension
/// dictionaries are preserved, so emptied slices remain until a dice removes
/// them. Deterministic per seed.
Cube perturb_missing(const Cube& cube, const PerturbSpec& spec);

/// Histogram of kappa over repeated perturb-then-search trials, one column
/// per deallocation probability.
struct RobustnessTable {
    std::vector<double> probs;
    int trials = 0;
    double unperturbed_kappa = 0.0;
    std::map<double, std::vector<int>, std::greater<double>> histogram;  // kappa -> per-prob counts

    double modal_kappa(std::size_t prob_index) const;
    std::string to_csv() const;
};

RobustnessTable robustness_experiment(const Cube& cube, const std::vector<double>& probs,
                                      int trials, std::uint64_t seed, Aggregator agg);

}  // namespace diamond

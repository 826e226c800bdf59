#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diamond/core.hpp"
#include "diamond/cube.hpp"
#include "diamond/dice.hpp"

namespace diamond {

struct BoundReport {
    std::string name;
    double value = 0.0;
    std::string kind;       // "lower" | "upper"
    std::string guarantee;  // "existence" | "non-existence"
};

/// Minimum number of allocated cells any k_1..k_d-carat cube must have:
/// max(max_i k_i*n_i, (prod k_i)^(1/(d-1))). Pass an empty shape for the
/// shape-free product form.
double min_size_for_carats(const CaratVector& carats, const std::vector<std::size_t>& shape);

/// Largest cell count a cube of the given shape can have without containing a
/// k-vector-carat subcube: 1 + sum_i (k_i - 1)(n_i - 1). COUNT semantics.
double max_cells_without_diamond(const std::vector<std::size_t>& shape, const CaratVector& carats);

/// Largest total sum a non-negative cube of the given shape can have without a
/// k-vector-sum-carat subcube: sum_i (n_i + 1) k_i + max_i k_i.
double max_sum_without_diamond(const std::vector<std::size_t>& shape, const CaratVector& carats);

/// max_sum_without_diamond divided by the volume: any shape-limited selection
/// averaging above it intersects the sum-carat diamond.
double hcld_average_threshold(const std::vector<std::size_t>& shape, const CaratVector& carats);

/// Largest integer k whose cell-count threshold the cube provably exceeds;
/// exact inversion of the containment bound. 0 for an empty cube.
std::int64_t kappa_lower_bound(const CubeStats& st);

/// The looser printed form |C| / sum_i (n_i - 1) - 3, reported alongside the
/// exact inversion.
double kappa_lower_bound_paper(const CubeStats& st);

/// Sum-aggregator analogue via the total-sum threshold.
std::int64_t kappa_lower_bound_sum(const CubeStats& st);

/// COUNT: min(prod of the d-1 smallest n_i, |C|); SUM: the total sum.
double kappa_upper_bound(const CubeStats& st, Aggregator agg);

/// Density above which any selection of min(n_i, p) values per dimension must
/// intersect the k-carat diamond.
double dcld_density_threshold(const std::vector<std::size_t>& shape, std::size_t p, double k);

/// Riemann zeta for s > 1 (Euler-Maclaurin; tail truncated below 1e-12).
double zeta(double s);

/// Expected fraction of slices marked for deletion after one COUNT pass when
/// per-slice cell counts follow a zeta distribution with skew s:
/// sum_i n_i * P_{k_i,s} / sum_i n_i with P_{k,s} = sum_{j<k} j^-s / zeta(s).
double expected_marked_fraction(const std::vector<std::size_t>& shape, const CaratVector& carats,
                                double s, int truncation);

struct PrefilterResult {
    bool feasible = false;
    Cube region;
    CaratVector carats_used;
};

/// Any perfect subcube of the target shape must live inside the diamond with
/// k_i = prod_{j != i} m_j under COUNT; feasible when that diamond is nonempty
/// and at least target-shaped.
PrefilterResult perfect_prefilter(const Cube& cube, const std::vector<std::size_t>& target_shape,
                                  const DiceOptions& opts = {});

}  // namespace diamond

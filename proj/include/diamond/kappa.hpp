#pragma once

#include <cstdint>
#include <vector>

#include "diamond/core.hpp"
#include "diamond/cube.hpp"
#include "diamond/dice.hpp"

namespace diamond {

enum class KappaMethod { Sequential, Binary };

struct KappaProbe {
    double k = 0.0;
    bool nonempty = false;
    int passes = 0;
};

/// Carat-number search result. `probes` lists every dice issued, in order;
/// `lower_bound`/`upper_bound` echo the window the search started from.
/// `exact` is false when SUM measures are not integers, in which case `kappa`
/// is the largest threshold verified nonempty (within `tolerance` of the true
/// carat-number).
struct KappaResult {
    double kappa = 0.0;
    Cube diamond;
    std::vector<KappaProbe> probes;
    KappaMethod method = KappaMethod::Binary;
    double tolerance = 0.0;
    bool exact = true;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool galloped = false;

    std::size_t dice_count() const { return probes.size(); }
};

/// Starts one past the proven lower bound and re-dices the previous diamond at
/// k+1 until a probe comes back empty.
KappaResult kappa_sequential(const Cube& cube, Aggregator agg, const DiceOptions& opts = {});

/// Binary search over [lower bound, upper bound]; every time the lower bound
/// rises the witnessing diamond is kept and later probes dice it instead of
/// the full cube. When the closed-form window is unreasonably wide the upper
/// end is found by doubling from the lower bound first. `tolerance` <= 0
/// selects the default 1e-6 * total sum for non-integer SUM measures.
KappaResult kappa_binary(const Cube& cube, Aggregator agg, double tolerance = 0.0,
                         const DiceOptions& opts = {});

}  // namespace diamond

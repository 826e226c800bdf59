#include "diamond/kappa.hpp"

#include <cmath>

#include "diamond/bounds.hpp"

namespace diamond {

namespace {

constexpr double kGallopWindow = 1e7;  // wider closed-form windows gallop first

bool integer_domain(const Cube& cube, Aggregator agg) {
    return agg == Aggregator::Count || cube.all_integer_measures;
}

double search_lower_bound(const CubeStats& st, Aggregator agg) {
    if (agg == Aggregator::Count)
        return static_cast<double>(std::max<std::int64_t>(kappa_lower_bound(st), 1));
    return static_cast<double>(std::max<std::int64_t>(kappa_lower_bound_sum(st), 0));
}

DiamondResult probe(const Cube& start, std::size_t d, double k, Aggregator agg,
                    const DiceOptions& opts, std::vector<KappaProbe>& probes) {
    DiamondResult r = dice(start, CaratVector::uniform(d, k), agg, opts);
    probes.push_back({k, r.diamond.cell_count() > 0, r.log.passes});
    return r;
}

}  // namespace

KappaResult kappa_sequential(const Cube& cube, Aggregator agg, const DiceOptions& opts) {
    KappaResult res;
    res.method = KappaMethod::Sequential;
    if (cube.cell_count() == 0) return res;

    const CubeStats st = stats(cube);
    const std::size_t d = cube.dim_count();
    const bool integral = integer_domain(cube, agg);
    res.exact = integral;
    res.tolerance = integral ? 0.0 : 1.0;  // non-integer SUM: finds floor(kappa)
    res.lower_bound = std::floor(search_lower_bound(st, agg));
    res.upper_bound = std::floor(kappa_upper_bound(st, agg));

    Cube current;  // diamond at the last nonempty probe; empty = still the cube itself
    bool have_witness = false;
    double k = res.lower_bound + 1.0;
    for (;;) {
        DiamondResult r = probe(have_witness ? current : cube, d, k, agg, opts, res.probes);
        if (r.diamond.cell_count() == 0) break;
        current = std::move(r.diamond);
        have_witness = true;
        k += 1.0;
    }
    res.kappa = k - 1.0;
    if (!have_witness) {
        // the first probe was already empty: materialize the bound's diamond
        DiamondResult r = probe(cube, d, res.kappa, agg, opts, res.probes);
        current = std::move(r.diamond);
    }
    res.diamond = std::move(current);
    return res;
}

KappaResult kappa_binary(const Cube& cube, Aggregator agg, double tolerance,
                         const DiceOptions& opts) {
    KappaResult res;
    res.method = KappaMethod::Binary;
    if (cube.cell_count() == 0) return res;

    const CubeStats st = stats(cube);
    const std::size_t d = cube.dim_count();
    const bool integral = integer_domain(cube, agg);
    res.exact = integral;

    double lo = search_lower_bound(st, agg);
    double hi = kappa_upper_bound(st, agg);
    if (integral) {
        lo = std::floor(lo);
        hi = std::floor(hi);
    }
    if (hi < lo) hi = lo;
    res.lower_bound = lo;
    res.upper_bound = hi;

    DiamondResult witness = probe(cube, d, lo, agg, opts, res.probes);
    if (witness.diamond.cell_count() == 0 && lo > 0.0) {
        // bounds guarantee a nonempty diamond at lo; recover defensively
        lo = 0.0;
        witness = probe(cube, d, 0.0, agg, opts, res.probes);
    }

    if (hi - lo > kGallopWindow) {
        res.galloped = true;
        double g = std::max(lo, 1.0);
        while (g < hi) {
            double g2 = std::min(g * 2.0, hi);
            DiamondResult r = probe(witness.diamond, d, g2, agg, opts, res.probes);
            if (r.diamond.cell_count() > 0) {
                lo = g2;
                witness = std::move(r);
                g = g2;
            } else {
                hi = integral ? g2 - 1.0 : g2;
                break;
            }
        }
    }

    if (integral) {
        while (lo < hi) {
            double mid = std::floor((lo + hi + 1.0) / 2.0);
            DiamondResult r = probe(witness.diamond, d, mid, agg, opts, res.probes);
            if (r.diamond.cell_count() > 0) {
                lo = mid;
                witness = std::move(r);
            } else {
                hi = mid - 1.0;
            }
        }
        res.tolerance = 0.0;
    } else {
        double tol = tolerance > 0.0 ? tolerance : std::max(1e-6 * st.total_sum, 1e-12);
        res.tolerance = tol;
        while (hi - lo > tol) {
            double mid = lo + (hi - lo) / 2.0;
            DiamondResult r = probe(witness.diamond, d, mid, agg, opts, res.probes);
            if (r.diamond.cell_count() > 0) {
                lo = mid;
                witness = std::move(r);
            } else {
                hi = mid;
            }
        }
    }
    res.kappa = lo;
    res.diamond = std::move(witness.diamond);
    return res;
}

}  // namespace diamond

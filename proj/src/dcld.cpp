#include "diamond/dcld.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diamond/bounds.hpp"

namespace diamond {

void ShapeLimit::validate(std::size_t d) const {
    if (p.size() != d) throw DomainError("shape limit length must match dimension count");
    for (std::size_t v : p)
        if (v < 1) throw DomainError("shape limit entries must be >= 1");
}

std::vector<std::size_t> ShapeLimit::effective(const Cube& cube) const {
    std::vector<std::size_t> m(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) m[j] = std::min<std::size_t>(cube.dims[j].size(), p[j]);
    return m;
}

double dcld_objective(const Cube& cube, Aggregator agg) {
    CubeStats st = stats(cube);
    if (agg == Aggregator::Count) return st.volume > 0.0 ? st.density : 0.0;
    return st.total_sum;
}

namespace {

using Selection = std::vector<std::vector<std::uint32_t>>;  // ids per dim, sorted

double row_sigma(const Cube& cube, std::size_t i, Aggregator agg) {
    return agg == Aggregator::Count ? 1.0 : cube.measures[i];
}

// sigma of every dim-j slice inside the current selection
std::vector<double> selection_sigmas(const Cube& cube, const std::vector<std::vector<char>>& in,
                                     std::size_t dim, Aggregator agg) {
    std::vector<double> sig(cube.dims[dim].size(), 0.0);
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        auto cell = cube.cell(i);
        bool inside = true;
        for (std::size_t j = 0; j < cube.dim_count() && inside; ++j)
            inside = j == dim || in[j][cell[j]];
        if (inside && in[dim][cell[dim]]) sig[cell[dim]] += row_sigma(cube, i, agg);
    }
    return sig;
}

// Trims dimension by dimension to the target shape, keeping the top-sigma
// values and re-ranking after each trim; sigma ties keep the smaller id.
Selection trim_to_shape(const Cube& cube, Selection selection, const std::vector<std::size_t>& m,
                        Aggregator agg, std::uint64_t& deletions) {
    const std::size_t d = cube.dim_count();
    std::vector<std::vector<char>> in(d);
    for (std::size_t j = 0; j < d; ++j) {
        in[j].assign(cube.dims[j].size(), 0);
        for (auto v : selection[j]) in[j][v] = 1;
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (selection[j].size() <= m[j]) continue;
        std::vector<double> sig = selection_sigmas(cube, in, j, agg);
        std::vector<std::uint32_t> order = selection[j];
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (sig[a] != sig[b]) return sig[a] > sig[b];
            return a < b;
        });
        deletions += order.size() - m[j];
        order.resize(m[j]);
        std::sort(order.begin(), order.end());
        selection[j] = order;
        std::fill(in[j].begin(), in[j].end(), 0);
        for (auto v : selection[j]) in[j][v] = 1;
    }
    return selection;
}

Selection all_values(const Cube& cube) {
    Selection s(cube.dim_count());
    for (std::size_t j = 0; j < cube.dim_count(); ++j) {
        s[j].resize(cube.dims[j].size());
        std::iota(s[j].begin(), s[j].end(), 0u);
    }
    return s;
}

DcldResult finish(const Cube& cube, const Selection& selection, Aggregator agg, DcldWork work,
                  bool fallback, double seed_k) {
    DcldResult r;
    r.subcube = restrict_cube(cube, selection);
    CubeStats st = stats(r.subcube);
    r.total_sum = st.total_sum;
    r.average = st.volume > 0.0 ? st.total_sum / st.volume : 0.0;
    r.objective = agg == Aggregator::Count ? st.density : st.total_sum;
    r.work = work;
    r.fallback_whole_cube = fallback;
    r.seed_carats = seed_k;
    return r;
}

}  // namespace

DcldResult dcld_diamond_heuristic(const Cube& cube, const ShapeLimit& limit, Aggregator agg,
                                  const DcldOptions& opts) {
    limit.validate(cube.dim_count());
    const std::vector<std::size_t> m = limit.effective(cube);
    DcldWork work;

    auto fits = [&](const Cube& diamond) {
        if (diamond.cell_count() == 0) return false;
        for (std::size_t j = 0; j < m.size(); ++j)
            if (diamond.dims[j].size() < m[j]) return false;
        return true;
    };

    // largest uniform k whose diamond still covers the target shape; the
    // predicate is monotone because diamonds nest as k grows
    Cube witness;
    bool feasible = false;
    double seed_k = 0.0;
    if (cube.cell_count() > 0) {
        DiamondResult at1 = dice(cube, CaratVector::uniform(cube.dim_count(), 1.0), agg, opts.dice);
        ++work.dice_probes;
        if (fits(at1.diamond)) {
            feasible = true;
            seed_k = 1.0;
            witness = std::move(at1.diamond);
            double lo = 1.0;
            double hi = std::max(1.0, std::floor(kappa_upper_bound(stats(cube), agg)));
            while (lo < hi) {
                double mid = std::floor((lo + hi + 1.0) / 2.0);
                DiamondResult r =
                    dice(witness, CaratVector::uniform(cube.dim_count(), mid), agg, opts.dice);
                ++work.dice_probes;
                if (fits(r.diamond)) {
                    lo = mid;
                    witness = std::move(r.diamond);
                } else {
                    hi = mid - 1.0;
                }
            }
            seed_k = lo;
        }
    }

    Selection selection;
    if (feasible) {
        selection.resize(cube.dim_count());
        for (std::size_t j = 0; j < cube.dim_count(); ++j) {
            for (const auto& name : witness.dims[j].values)
                selection[j].push_back(*cube.dims[j].find(name));
            std::sort(selection[j].begin(), selection[j].end());
        }
    } else {
        selection = all_values(cube);  // k = 0: the whole cube
    }
    selection = trim_to_shape(cube, std::move(selection), m, agg, work.slice_deletions);
    return finish(cube, selection, agg, work, !feasible, feasible ? seed_k : 0.0);
}

DcldResult dcld_local_search(const Cube& cube, const ShapeLimit& limit, Aggregator agg,
                             const DcldOptions& opts) {
    limit.validate(cube.dim_count());
    const std::size_t d = cube.dim_count();
    const std::vector<std::size_t> m = limit.effective(cube);
    DcldWork work;

    Selection selection = trim_to_shape(cube, all_values(cube), m, agg, work.slice_deletions);

    std::vector<std::vector<char>> in(d);
    for (std::size_t j = 0; j < d; ++j) {
        in[j].assign(cube.dims[j].size(), 0);
        for (auto v : selection[j]) in[j][v] = 1;
    }

    // cross-tallies: tally[j][v] = sigma of cells with coordinate v on dim j
    // whose every other coordinate is selected; miss[i] = number of
    // unselected coordinates of cell i
    std::vector<std::vector<std::uint32_t>> by_value_cells(d);
    std::vector<std::vector<std::uint32_t>> by_value_start(d);
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::uint32_t> count(cube.dims[j].size() + 1, 0);
        for (std::size_t i = 0; i < cube.cell_count(); ++i) ++count[cube.cell(i)[j] + 1];
        for (std::size_t v = 1; v < count.size(); ++v) count[v] += count[v - 1];
        by_value_start[j] = count;
        by_value_cells[j].resize(cube.cell_count());
        std::vector<std::uint32_t> cursor(count.begin(), count.end() - 1);
        for (std::size_t i = 0; i < cube.cell_count(); ++i)
            by_value_cells[j][cursor[cube.cell(i)[j]]++] = static_cast<std::uint32_t>(i);
    }

    std::vector<std::uint8_t> miss(cube.cell_count(), 0);
    std::vector<std::vector<double>> tally(d);
    for (std::size_t j = 0; j < d; ++j) tally[j].assign(cube.dims[j].size(), 0.0);
    double objective = 0.0;
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        auto cell = cube.cell(i);
        int misses = 0;
        std::size_t miss_at = 0;
        for (std::size_t j = 0; j < d; ++j)
            if (!in[j][cell[j]]) {
                ++misses;
                miss_at = j;
            }
        miss[i] = static_cast<std::uint8_t>(misses);
        double s = row_sigma(cube, i, agg);
        if (misses == 0) {
            objective += s;
            for (std::size_t j = 0; j < d; ++j) tally[j][cell[j]] += s;
        } else if (misses == 1) {
            tally[miss_at][cell[miss_at]] += s;
        }
    }

    auto other_miss = [&](std::size_t i, std::size_t skip) {
        auto cell = cube.cell(i);
        for (std::size_t j = 0; j < d; ++j)
            if (j != skip && !in[j][cell[j]]) return j;
        return skip;  // unreachable when a miss exists
    };

    // remove value v from dimension dim
    auto deselect = [&](std::size_t dim, std::uint32_t v) {
        in[dim][v] = 0;
        for (std::uint32_t idx = by_value_start[dim][v]; idx < by_value_start[dim][v + 1]; ++idx) {
            std::uint32_t i = by_value_cells[dim][idx];
            auto cell = cube.cell(i);
            double s = row_sigma(cube, i, agg);
            if (miss[i] == 0) {
                objective -= s;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != dim) tally[j][cell[j]] -= s;
            } else if (miss[i] == 1) {
                std::size_t j0 = other_miss(i, dim);
                tally[j0][cell[j0]] -= s;
            }
            ++miss[i];
        }
    };
    auto select = [&](std::size_t dim, std::uint32_t w) {
        in[dim][w] = 1;
        for (std::uint32_t idx = by_value_start[dim][w]; idx < by_value_start[dim][w + 1]; ++idx) {
            std::uint32_t i = by_value_cells[dim][idx];
            auto cell = cube.cell(i);
            double s = row_sigma(cube, i, agg);
            --miss[i];
            if (miss[i] == 0) {
                objective += s;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != dim) tally[j][cell[j]] += s;
            } else if (miss[i] == 1) {
                std::size_t j0 = other_miss(i, dim);
                tally[j0][cell[j0]] += s;
            }
        }
    };

    for (;;) {
        bool moved_in_cycle = false;
        for (std::size_t dim = 0; dim < d; ++dim) {
            std::vector<std::uint32_t> outside;
            for (std::uint32_t v = 0; v < cube.dims[dim].size(); ++v)
                if (!in[dim][v]) outside.push_back(v);
            if (outside.empty()) continue;

            work.swap_evals +=
                static_cast<std::uint64_t>(selection[dim].size()) * outside.size();
            if (work.swap_evals > opts.max_swap_evals)
                throw BudgetExceeded("dcld local search exceeded its swap-evaluation budget");

            double best_gain = 0.0;
            std::uint32_t best_v = 0, best_w = 0;
            bool found = false;
            for (std::uint32_t v : selection[dim])
                for (std::uint32_t w : outside) {
                    double gain = tally[dim][w] - tally[dim][v];
                    if (gain > best_gain) {
                        best_gain = gain;
                        best_v = v;
                        best_w = w;
                        found = true;
                    }
                }
            if (!found) continue;

            deselect(dim, best_v);
            select(dim, best_w);
            auto& sel = selection[dim];
            sel.erase(std::find(sel.begin(), sel.end(), best_v));
            sel.insert(std::upper_bound(sel.begin(), sel.end(), best_w), best_w);
            ++work.swaps_applied;
            moved_in_cycle = true;
        }
        if (!moved_in_cycle) break;
    }

    return finish(cube, selection, agg, work, false, 0.0);
}

}  // namespace diamond

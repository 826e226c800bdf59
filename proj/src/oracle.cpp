#include "diamond/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace diamond::oracle {

namespace {

struct MaskCombo {
    std::vector<std::uint64_t> masks;
};

void check_enum_budget(const Cube& cube, const OracleBudget& budget) {
    double volume = 1.0, combos = 1.0;
    for (const auto& d : cube.dims) {
        if (d.size() > 63) throw BudgetExceeded("oracle: dimension too wide to enumerate");
        volume *= static_cast<double>(d.size());
        combos *= std::pow(2.0, static_cast<double>(d.size()));
    }
    if (volume > budget.max_volume)
        throw BudgetExceeded("oracle: cube volume exceeds enumeration budget");
    if (combos > budget.max_subset_combos)
        throw BudgetExceeded("oracle: subset space exceeds enumeration budget");
}

// sigma per selected slice under the induced restriction; false when any
// selected value misses its threshold (an empty selected slice counts as 0)
bool combo_verifies(const Cube& cube, const std::vector<std::uint64_t>& masks,
                    const CaratVector& carats, Aggregator agg,
                    std::vector<std::vector<double>>& scratch) {
    const std::size_t d = cube.dim_count();
    for (std::size_t j = 0; j < d; ++j)
        std::fill(scratch[j].begin(), scratch[j].end(), 0.0);
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        auto cell = cube.cell(i);
        bool inside = true;
        for (std::size_t j = 0; j < d && inside; ++j)
            inside = (masks[j] >> cell[j]) & 1u;
        if (!inside) continue;
        double s = agg == Aggregator::Count ? 1.0 : cube.measures[i];
        for (std::size_t j = 0; j < d; ++j) scratch[j][cell[j]] += s;
    }
    for (std::size_t j = 0; j < d; ++j)
        for (std::uint32_t v = 0; v < cube.dims[j].size(); ++v)
            if (((masks[j] >> v) & 1u) && scratch[j][v] < carats[j]) return false;
    return true;
}

Cube induced(const Cube& cube, const std::vector<std::uint64_t>& masks) {
    std::vector<std::vector<std::uint32_t>> keep(cube.dim_count());
    for (std::size_t j = 0; j < cube.dim_count(); ++j)
        for (std::uint32_t v = 0; v < cube.dims[j].size(); ++v)
            if ((masks[j] >> v) & 1u) keep[j].push_back(v);
    return restrict_cube(cube, keep);
}

template <typename Fn>
void for_each_combo(const Cube& cube, Fn&& fn) {
    const std::size_t d = cube.dim_count();
    std::vector<std::uint64_t> masks(d, 0);
    std::vector<std::uint64_t> limits(d);
    for (std::size_t j = 0; j < d; ++j) limits[j] = 1ull << cube.dims[j].size();
    for (;;) {
        fn(masks);
        std::size_t j = 0;
        while (j < d) {
            if (++masks[j] < limits[j]) break;
            masks[j] = 0;
            ++j;
        }
        if (j == d) break;
    }
}

bool any_selected(const std::vector<std::uint64_t>& masks) {
    for (auto m : masks)
        if (m) return true;
    return false;
}

}  // namespace

Cube brute_force_diamond(const Cube& cube, const CaratVector& carats, Aggregator agg,
                         const OracleBudget& budget) {
    carats.validate_for(agg);
    if (carats.size() != cube.dim_count()) throw DomainError("carat vector length mismatch");
    check_enum_budget(cube, budget);

    std::vector<std::vector<double>> scratch(cube.dim_count());
    for (std::size_t j = 0; j < cube.dim_count(); ++j) scratch[j].assign(cube.dims[j].size(), 0.0);

    std::vector<std::uint64_t> unioned(cube.dim_count(), 0);
    for_each_combo(cube, [&](const std::vector<std::uint64_t>& masks) {
        if (!any_selected(masks)) return;
        if (combo_verifies(cube, masks, carats, agg, scratch))
            for (std::size_t j = 0; j < cube.dim_count(); ++j) unioned[j] |= masks[j];
    });
    return induced(cube, unioned);
}

DiamondReport brute_force_diamond_report(const Cube& cube, const CaratVector& carats,
                                         Aggregator agg, const OracleBudget& budget) {
    carats.validate_for(agg);
    if (carats.size() != cube.dim_count()) throw DomainError("carat vector length mismatch");
    check_enum_budget(cube, budget);

    std::vector<std::vector<double>> scratch(cube.dim_count());
    for (std::size_t j = 0; j < cube.dim_count(); ++j) scratch[j].assign(cube.dims[j].size(), 0.0);

    constexpr std::size_t kWitnessCap = 100000;
    std::vector<MaskCombo> witnesses;
    bool overflowed = false;
    std::vector<std::uint64_t> unioned(cube.dim_count(), 0);
    for_each_combo(cube, [&](const std::vector<std::uint64_t>& masks) {
        if (!any_selected(masks)) return;
        if (!combo_verifies(cube, masks, carats, agg, scratch)) return;
        for (std::size_t j = 0; j < cube.dim_count(); ++j) unioned[j] |= masks[j];
        if (witnesses.size() < kWitnessCap)
            witnesses.push_back({masks});
        else
            overflowed = true;
    });

    DiamondReport report;
    report.diamond = induced(cube, unioned);
    report.union_verifies = combo_verifies(cube, unioned, carats, agg, scratch);
    if (report.union_verifies) {
        // the union is itself a witness and contains every other one
        report.maximal_witnesses = report.diamond.cell_count() > 0 ? 1 : 0;
        report.unique = true;
        return report;
    }
    if (overflowed) throw BudgetExceeded("oracle: too many witnesses to rank for maximality");

    auto contained = [&](const MaskCombo& a, const MaskCombo& b) {
        for (std::size_t j = 0; j < a.masks.size(); ++j)
            if (a.masks[j] & ~b.masks[j]) return false;
        return true;
    };
    std::size_t maximal = 0;
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        bool is_max = true;
        for (std::size_t k = 0; k < witnesses.size() && is_max; ++k)
            if (k != i && contained(witnesses[i], witnesses[k]) &&
                !contained(witnesses[k], witnesses[i]))
                is_max = false;
        if (is_max) ++maximal;
    }
    report.maximal_witnesses = maximal;
    report.unique = maximal <= 1;
    return report;
}

DcldOptimum brute_force_dcld(const Cube& cube, const std::vector<std::size_t>& limit,
                             Aggregator agg, const OracleBudget& budget) {
    const std::size_t d = cube.dim_count();
    if (limit.size() != d) throw DomainError("limit length must match dimension count");
    for (std::size_t p : limit)
        if (p < 1) throw DomainError("shape limit entries must be >= 1");

    std::vector<std::size_t> m(d);
    double selections = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
        if (cube.dims[j].size() > 63) throw BudgetExceeded("oracle: dimension too wide");
        m[j] = std::min<std::size_t>(cube.dims[j].size(), limit[j]);
        // C(n, m)
        double c = 1.0;
        for (std::size_t i = 0; i < m[j]; ++i)
            c = c * static_cast<double>(cube.dims[j].size() - i) / static_cast<double>(i + 1);
        selections *= c;
    }
    if (selections > budget.max_selections)
        throw BudgetExceeded("oracle: selection space exceeds enumeration budget");

    // lexicographic combination odometer per dimension
    std::vector<std::vector<std::uint32_t>> pick(d);
    for (std::size_t j = 0; j < d; ++j) {
        pick[j].resize(m[j]);
        for (std::size_t i = 0; i < m[j]; ++i) pick[j][i] = static_cast<std::uint32_t>(i);
    }
    auto advance_dim = [&](std::size_t j) {  // next combination; false on wrap
        auto& ids = pick[j];
        const std::size_t n = cube.dims[j].size();
        std::size_t i = ids.size();
        while (i > 0) {
            --i;
            if (ids[i] + (ids.size() - i) < n) {
                ++ids[i];
                for (std::size_t t = i + 1; t < ids.size(); ++t) ids[t] = ids[t - 1] + 1;
                return true;
            }
        }
        for (std::size_t t = 0; t < ids.size(); ++t) ids[t] = static_cast<std::uint32_t>(t);
        return false;
    };

    double volume = 1.0;
    for (std::size_t j = 0; j < d; ++j) volume *= static_cast<double>(m[j]);

    std::vector<std::uint64_t> masks(d, 0);
    auto remask = [&](std::size_t j) {
        masks[j] = 0;
        for (auto v : pick[j]) masks[j] |= 1ull << v;
    };
    for (std::size_t j = 0; j < d; ++j) remask(j);

    double best = -1.0;
    std::vector<std::vector<std::uint32_t>> best_pick;
    for (;;) {
        double value = 0.0;
        for (std::size_t i = 0; i < cube.cell_count(); ++i) {
            auto cell = cube.cell(i);
            bool inside = true;
            for (std::size_t j = 0; j < d && inside; ++j) inside = (masks[j] >> cell[j]) & 1u;
            if (inside) value += agg == Aggregator::Count ? 1.0 : cube.measures[i];
        }
        if (value > best) {
            best = value;
            best_pick = pick;
        }
        std::size_t j = 0;
        while (j < d) {
            if (advance_dim(j)) {
                remask(j);
                break;
            }
            remask(j);
            ++j;
        }
        if (j == d) break;
    }

    DcldOptimum opt;
    opt.selection = best_pick;
    opt.subcube = restrict_cube(cube, best_pick);
    opt.objective = agg == Aggregator::Count ? (volume > 0.0 ? best / volume : 0.0) : best;
    return opt;
}

}  // namespace diamond::oracle

#include "diamond/datagen.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "diamond/csv.hpp"
#include "diamond/kappa.hpp"
#include "diamond/rng.hpp"

namespace diamond {

Cube gen_power_cube(const PowerGenSpec& spec) {
    if (spec.shape.empty()) throw DomainError("power cube needs at least one dimension");
    if (!(spec.skew > 0.0)) throw DomainError("skew must be > 0");
    double volume = 1.0;
    for (std::size_t n : spec.shape) {
        if (n < 1) throw DomainError("dimension cardinality must be >= 1");
        volume *= static_cast<double>(n);
    }
    if (static_cast<double>(spec.target) > volume)
        throw DomainError("target distinct facts exceed the cube volume");
    if (volume >= 9.2e18) throw DomainError("volume too large for distinct-fact tracking");

    std::vector<std::string> names;
    for (std::size_t j = 0; j < spec.shape.size(); ++j) names.push_back("d" + std::to_string(j + 1));
    CubeBuilder builder(names, "measure");

    SplitMix64 rng(spec.seed);
    const double inv_a = 1.0 / spec.skew;
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(spec.target * 2);
    std::vector<std::uint32_t> draw(spec.shape.size());
    std::vector<std::string> attrs(spec.shape.size());
    // value strings are pre-rendered lazily per dimension
    std::vector<std::vector<std::string>> labels(spec.shape.size());

    while (seen.size() < spec.target) {
        std::uint64_t key = 0;
        for (std::size_t j = 0; j < spec.shape.size(); ++j) {
            double u = rng.unit_positive();
            auto v = static_cast<std::uint32_t>(
                std::ceil(static_cast<double>(spec.shape[j]) * std::pow(u, inv_a)));
            if (v < 1) v = 1;
            if (v > spec.shape[j]) v = static_cast<std::uint32_t>(spec.shape[j]);
            draw[j] = v;
            key = key * static_cast<std::uint64_t>(spec.shape[j]) + (v - 1);
        }
        if (!seen.insert(key).second) continue;
        for (std::size_t j = 0; j < spec.shape.size(); ++j) {
            auto& lab = labels[j];
            if (lab.size() < spec.shape[j]) lab.resize(spec.shape[j]);
            std::string& s = lab[draw[j] - 1];
            if (s.empty()) s = "v" + std::to_string(draw[j]);
            attrs[j] = s;
        }
        builder.add(attrs, 1.0);
    }
    return builder.build();
}

Cube gen_adversarial_chain(std::size_t n) {
    if (n < 3) throw DomainError("adversarial chain needs n >= 3");

    auto r = [](std::size_t i) { return "r" + std::to_string(i); };
    auto c = [](std::size_t i) { return "c" + std::to_string(i); };
    CubeBuilder b({"row", "col"}, "measure");
    auto cell = [&](std::size_t i, std::size_t j) { b.add({r(i), c(j)}, 1.0); };

    // the diamond block
    cell(0, 0);
    cell(0, 1);
    cell(1, 0);
    cell(1, 1);

    // Chain cells are emitted attachment-side first so that, within a pass,
    // an eviction triggered near the free end lands after the next cell
    // inward has already been written: the cascade advances one link per
    // pass. The split point a keeps both chains near half length.
    const std::size_t a = std::max<std::size_t>(2, (n + 1) / 2);

    // down chain, hanging off column 1: c1, r2, c2, r3, ..., r_a
    cell(2, 1);
    for (std::size_t j = 2; j < a; ++j) {
        cell(j, j);
        cell(j + 1, j);
    }

    // right chain, hanging off row 1: r1, c_a, r_{a+1}, ..., c_{n-1}
    cell(1, a);
    for (std::size_t j = a; j + 1 < n; ++j) {
        cell(j + 1, j);
        cell(j + 1, j + 1);
    }

    return b.build();
}

Cube gen_full_binary_cube(std::size_t d) {
    if (d < 1 || d > 20) throw DomainError("full binary cube supports 1 <= d <= 20");
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("d" + std::to_string(j + 1));
    CubeBuilder b(names, "measure");
    std::vector<std::string> attrs(d);
    for (std::uint64_t bits = 0; bits < (1ull << d); ++bits) {
        for (std::size_t j = 0; j < d; ++j) attrs[j] = (bits >> j) & 1 ? "1" : "0";
        b.add(attrs, 1.0);
    }
    return b.build();
}

Cube perturb_missing(const Cube& cube, const PerturbSpec& spec) {
    if (spec.p_missing < 0.0 || spec.p_missing > 1.0)
        throw DomainError("p_missing must lie in [0, 1]");
    SplitMix64 rng(spec.seed);
    Cube out;
    out.dims = cube.dims;  // dictionaries preserved, emptied slices allowed
    out.measure_column = cube.measure_column;
    out.all_integer_measures = true;
    const std::size_t d = cube.dim_count();
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        if (rng.unit() < spec.p_missing) continue;
        auto cell = cube.cell(i);
        out.coords.insert(out.coords.end(), cell.begin(), cell.end());
        out.measures.push_back(cube.measures[i]);
        if (cube.measures[i] < 0.0) out.has_negative_measure = true;
        if (cube.measures[i] != std::floor(cube.measures[i])) out.all_integer_measures = false;
    }
    (void)d;
    return out;
}

double RobustnessTable::modal_kappa(std::size_t prob_index) const {
    double best_kappa = 0.0;
    int best_count = -1;
    for (const auto& [kappa, row] : histogram) {
        if (prob_index < row.size() && row[prob_index] > best_count) {
            best_count = row[prob_index];
            best_kappa = kappa;
        }
    }
    return best_kappa;
}

std::string RobustnessTable::to_csv() const {
    std::ostringstream out;
    out << "kappa";
    for (double p : probs) out << ",p=" << csv::format_double(p);
    out << "\n";
    for (const auto& [kappa, row] : histogram) {
        out << csv::format_double(kappa);
        for (int count : row) out << "," << count;
        out << "\n";
    }
    return out.str();
}

RobustnessTable robustness_experiment(const Cube& cube, const std::vector<double>& probs,
                                      int trials, std::uint64_t seed, Aggregator agg) {
    if (trials < 1) throw DomainError("robustness experiment needs trials >= 1");
    RobustnessTable table;
    table.probs = probs;
    table.trials = trials;
    table.unperturbed_kappa = kappa_binary(cube, agg).kappa;
    for (std::size_t pi = 0; pi < probs.size(); ++pi) {
        for (int t = 0; t < trials; ++t) {
            std::uint64_t trial_seed = derive_seed(seed, pi * 100003ull + static_cast<std::uint64_t>(t));
            Cube perturbed = perturb_missing(cube, {probs[pi], trial_seed});
            double kappa = kappa_binary(perturbed, agg).kappa;
            auto& row = table.histogram[kappa];
            if (row.size() < probs.size()) row.resize(probs.size(), 0);
            ++row[pi];
        }
    }
    return table;
}

}  // namespace diamond

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

#include "diamond/bounds.hpp"
#include "diamond/datagen.hpp"
#include "diamond/dice.hpp"
#include "diamond/kappa.hpp"

using namespace diamond;
using doctest::Approx;

namespace {

// Wilson-Hilferty approximation of the chi-square critical value
double chi2_critical(double df, double z) {
    double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

double marginal_chi2(const Cube& cube, std::size_t dim, std::size_t cardinality) {
    std::vector<double> counts(cardinality, 0.0);
    for (std::size_t i = 0; i < cube.cell_count(); ++i) counts[cube.cell(i)[dim]] += 1.0;
    double expected = static_cast<double>(cube.cell_count()) / static_cast<double>(cardinality);
    double chi = 0.0;
    for (double c : counts) chi += (c - expected) * (c - expected) / expected;
    return chi;
}

}  // namespace

TEST_CASE("power cube: uniform skew fills the target with near-uniform marginals") {
    PowerGenSpec spec{{10, 100, 1000, 10000}, 1.0, 250000, 2024};
    Cube cube = gen_power_cube(spec);
    CHECK(cube.cell_count() == 250000);
    // all marginals pass a goodness-of-fit check at significance 0.001
    const double z999 = 3.090232;
    for (std::size_t j = 0; j < spec.shape.size(); ++j) {
        // interned ids cover the nominal range at these sample sizes
        CHECK(cube.dims[j].size() == spec.shape[j]);
        double df = static_cast<double>(spec.shape[j]) - 1.0;
        CHECK(marginal_chi2(cube, j, spec.shape[j]) < chi2_critical(df, z999));
    }
}

TEST_CASE("power cube: heavy skew concentrates mass and lifts kappa above its bound") {
    PowerGenSpec spec{{10, 50, 200, 1000}, 0.02, 4000, 3};
    Cube cube = gen_power_cube(spec);
    CHECK(cube.cell_count() == 4000);
    double kappa = kappa_binary(cube, Aggregator::Count).kappa;
    auto lower = kappa_lower_bound(stats(cube));
    CHECK(kappa > static_cast<double>(lower));  // the skew gap
    // value 1 dominates every dimension
    for (std::size_t j = 0; j < 4; ++j) {
        auto id = cube.dims[j].find("v1");
        REQUIRE(id);
        CHECK(slice_sigma(cube, j, *id, Aggregator::Count) >
              2.0 * static_cast<double>(cube.cell_count()) / static_cast<double>(spec.shape[j]));
    }
}

TEST_CASE("power cube: edge cases") {
    CHECK(gen_power_cube({{4, 4}, 1.0, 0, 1}).cell_count() == 0);
    CHECK_THROWS_AS(gen_power_cube({{2, 2}, 1.0, 5, 1}), DomainError);
    CHECK_THROWS_AS(gen_power_cube({{2, 2}, 0.0, 1, 1}), DomainError);
    // target == volume enumerates the full cube
    CHECK(gen_power_cube({{3, 3}, 1.0, 9, 7}).cell_count() == 9);
}

TEST_CASE("power cube: bitwise reproducible per seed") {
    PowerGenSpec spec{{6, 30, 80}, 0.4, 500, 99};
    std::ostringstream a, b;
    write_csv(gen_power_cube(spec), a);
    write_csv(gen_power_cube(spec), b);
    CHECK(a.str() == b.str());
    spec.seed = 100;
    std::ostringstream c;
    write_csv(gen_power_cube(spec), c);
    CHECK(a.str() != c.str());
}

TEST_CASE("adversarial chain: structure audit across sizes") {
    for (std::size_t n = 3; n <= 256; n = n < 16 ? n + 1 : n * 2) {
        Cube cube = gen_adversarial_chain(n);
        CHECK(cube.cell_count() == 2 * n);
        CHECK(cube.dims[0].size() == n);
        CHECK(cube.dims[1].size() == n);
        for (std::size_t axis = 0; axis < 2; ++axis) {
            std::size_t ones = 0;
            for (std::uint32_t v = 0; v < n; ++v) {
                double c = slice_sigma(cube, axis, v, Aggregator::Count);
                CHECK(c >= 1.0);
                CHECK(c <= 3.0);
                if (c == 1.0) ++ones;
            }
            CHECK(ones == 1);  // exactly one count-1 slice per axis
        }
    }
}

TEST_CASE("adversarial chain: the 2-carat diamond is always the block") {
    for (std::size_t n = 3; n <= 256; n = n < 12 ? n + 1 : n * 2) {
        Cube cube = gen_adversarial_chain(n);
        DiamondResult r = dice(cube, CaratVector::uniform(2, 2), Aggregator::Count);
        CHECK(r.diamond.cell_count() == 4);
        CHECK(r.diamond.dims[0].size() == 2);
        CHECK(r.diamond.dims[1].size() == 2);
        CHECK(r.diamond.dims[0].find("r0"));
        CHECK(r.diamond.dims[0].find("r1"));
        CHECK(r.diamond.dims[1].find("c0"));
        CHECK(r.diamond.dims[1].find("c1"));
    }
    CHECK_THROWS_AS(gen_adversarial_chain(2), DomainError);
}

TEST_CASE("adversarial chain: streaming passes peel at most one slice per axis") {
    Cube cube = gen_adversarial_chain(32);
    DiamondResult r = dice(cube, CaratVector::uniform(2, 2), Aggregator::Count);
    CHECK(r.log.passes >= 31);
    for (int pass = 2; pass <= r.log.passes; ++pass) {
        int rows = 0, cols = 0;
        for (const auto& e : r.log.evictions)
            if (e.pass == pass) (e.dim == 0 ? rows : cols) += 1;
        CHECK(rows <= 1);
        CHECK(cols <= 1);
    }
}

TEST_CASE("full binary cubes") {
    Cube c3 = gen_full_binary_cube(3);
    CHECK(c3.cell_count() == 8);
    CHECK(c3.dim_count() == 3);
    Cube c1 = gen_full_binary_cube(1);
    CHECK(c1.cell_count() == 2);
    CHECK(kappa_binary(c1, Aggregator::Count).kappa == 1.0);
    CHECK_THROWS_AS(gen_full_binary_cube(0), DomainError);
    CHECK_THROWS_AS(gen_full_binary_cube(21), DomainError);
}

TEST_CASE("perturb: identity, annihilation, concentration") {
    Cube cube = gen_power_cube({{8, 40, 100}, 0.5, 3000, 11});
    SUBCASE("p = 0 keeps everything including the dictionaries") {
        Cube same = perturb_missing(cube, {0.0, 5});
        CHECK(cube_equal(same, cube));
    }
    SUBCASE("p = 1 keeps dictionaries but no cells") {
        Cube none = perturb_missing(cube, {1.0, 5});
        CHECK(none.cell_count() == 0);
        CHECK(none.dims[2].size() == cube.dims[2].size());
    }
    SUBCASE("survivors stay within 4 sigma of the binomial mean") {
        for (double p : {0.1, 0.5, 0.9}) {
            for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
                Cube kept = perturb_missing(cube, {p, seed});
                double mean = (1.0 - p) * static_cast<double>(cube.cell_count());
                double sigma = std::sqrt(static_cast<double>(cube.cell_count()) * p * (1.0 - p));
                CHECK(std::abs(static_cast<double>(kept.cell_count()) - mean) <= 4.0 * sigma);
            }
        }
    }
    SUBCASE("deterministic per seed") {
        Cube a = perturb_missing(cube, {0.3, 17});
        Cube b = perturb_missing(cube, {0.3, 17});
        CHECK(cube_equal(a, b));
    }
    CHECK_THROWS_AS(perturb_missing(cube, {1.5, 0}), DomainError);
}

TEST_CASE("robustness experiment structure") {
    Cube cube = gen_power_cube({{6, 10, 16}, 0.3, 400, 5});
    SUBCASE("single trial at p = 0 lands on kappa itself") {
        RobustnessTable t = robustness_experiment(cube, {0.0}, 1, 3, Aggregator::Count);
        CHECK(t.histogram.size() == 1);
        CHECK(t.histogram.begin()->first == t.unperturbed_kappa);
        CHECK(t.histogram.begin()->second[0] == 1);
    }
    SUBCASE("columns each sum to the trial count") {
        RobustnessTable t =
            robustness_experiment(cube, {0.01, 0.03, 0.05}, 12, 99, Aggregator::Count);
        for (std::size_t pi = 0; pi < 3; ++pi) {
            int total = 0;
            for (const auto& [kappa, row] : t.histogram) total += row[pi];
            CHECK(total == 12);
        }
        // CSV shape: header plus one row per observed kappa
        std::istringstream csv(t.to_csv());
        std::string header;
        std::getline(csv, header);
        CHECK(header == "kappa,p=0.01,p=0.03,p=0.05");
    }
    CHECK_THROWS_AS(robustness_experiment(cube, {0.1}, 0, 1, Aggregator::Count), DomainError);
}

#include "doctest.h"
#include "fixtures.hpp"

#include "diamond/dice.hpp"
#include "diamond/kappa.hpp"
#include "diamond/oracle.hpp"

using namespace diamond;

TEST_CASE("oracle agrees with dice on the sales cube") {
    Cube cube = fixtures::sales_cube();
    Cube expect = oracle::brute_force_diamond(cube, CaratVector({4, 10}), Aggregator::Sum);
    DiamondResult got = dice(cube, CaratVector({4, 10}), Aggregator::Sum);
    CHECK(expect.cell_count() == 9);
    CHECK(cube_equal(expect, got.diamond));
}

TEST_CASE("zero carats return the whole cube") {
    Cube cube = fixtures::sales_cube();
    Cube whole = oracle::brute_force_diamond(cube, CaratVector({0, 0}), Aggregator::Sum);
    CHECK(cube_equal(whole, cube));
}

TEST_CASE("checkerboard SUM carats are not unique") {
    Cube board = fixtures::checkerboard_cube();
    oracle::DiamondReport report =
        oracle::brute_force_diamond_report(board, CaratVector({2, 2}), Aggregator::Sum);
    CHECK_FALSE(report.unique);
    CHECK(report.maximal_witnesses == 2);
    CHECK_FALSE(report.union_verifies);  // the induced union slices sum to 0

    // under COUNT the same thresholds have a unique maximal cube
    oracle::DiamondReport count_report =
        oracle::brute_force_diamond_report(board, CaratVector({2, 2}), Aggregator::Count);
    CHECK(count_report.unique);
}

TEST_CASE("dice equals the oracle on random small cubes") {
    const std::vector<std::vector<std::size_t>> shapes = {{3, 3}, {4, 4}, {2, 3, 4}, {3, 3, 3}};
    for (const auto& shape : shapes) {
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            Cube cube = fixtures::random_cube(seed * 7 + shape.size(), shape, 0.45, 3);
            SplitMix64 krng(seed);
            CaratVector k = CaratVector::uniform(shape.size(), 0);
            for (auto& kv : k.k) kv = static_cast<double>(krng.below(4));
            for (Aggregator agg : {Aggregator::Count, Aggregator::Sum}) {
                Cube expect = oracle::brute_force_diamond(cube, k, agg);
                DiamondResult got = dice(cube, k, agg);
                CHECK(cube_equal(expect, got.diamond));
            }
        }
    }
}

TEST_CASE("kappa equals the oracle's largest nonempty threshold") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Cube cube = fixtures::random_cube(seed * 37, {4, 4, 4}, 0.5);
        double kappa = kappa_binary(cube, Aggregator::Count).kappa;
        if (cube.cell_count() == 0) continue;
        CHECK(oracle::brute_force_diamond(cube, CaratVector::uniform(3, kappa), Aggregator::Count)
                  .cell_count() > 0);
        CHECK(oracle::brute_force_diamond(cube, CaratVector::uniform(3, kappa + 1), Aggregator::Count)
                  .cell_count() == 0);
    }
}

TEST_CASE("oracle budgets refuse oversized instances") {
    Cube big = fixtures::random_cube(1, {70, 2}, 1.1);  // a 70-wide dimension
    CHECK_THROWS_AS(oracle::brute_force_diamond(big, CaratVector({1, 1}), Aggregator::Count),
                    BudgetExceeded);
    oracle::OracleBudget tiny;
    tiny.max_volume = 4;
    Cube cube = fixtures::random_cube(2, {3, 3}, 1.1);  // full 3x3, volume 9
    CHECK_THROWS_AS(oracle::brute_force_diamond(cube, CaratVector({1, 1}), Aggregator::Count, tiny),
                    BudgetExceeded);
    tiny.max_volume = 4096;
    tiny.max_selections = 2;
    CHECK_THROWS_AS(oracle::brute_force_dcld(cube, {2, 2}, Aggregator::Count, tiny),
                    BudgetExceeded);
}

TEST_CASE("exhaustive dcld") {
    SUBCASE("two-cluster cube optimum is the 16-cell block") {
        Cube cube = fixtures::two_cluster_cube();
        oracle::DcldOptimum opt = oracle::brute_force_dcld(cube, {5, 5}, Aggregator::Count);
        CHECK(opt.subcube.cell_count() == 16);
        CHECK(opt.objective == doctest::Approx(0.64));
    }
    SUBCASE("p = n returns the whole cube") {
        Cube cube = fixtures::random_cube(5, {3, 4}, 0.5);
        oracle::DcldOptimum opt =
            oracle::brute_force_dcld(cube, {cube.dims[0].size(), cube.dims[1].size()},
                                     Aggregator::Count);
        CHECK(cube_equal(opt.subcube, cube));
    }
    SUBCASE("all-ones 3x3 at p=2 picks any 2x2 at density 1") {
        Cube cube = fixtures::random_cube(3, {3, 3}, 1.1);
        oracle::DcldOptimum opt = oracle::brute_force_dcld(cube, {2, 2}, Aggregator::Count);
        CHECK(opt.objective == doctest::Approx(1.0));
        CHECK(opt.subcube.cell_count() == 4);
    }
}

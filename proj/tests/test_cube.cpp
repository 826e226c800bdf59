#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"

#include "diamond/cube.hpp"

using namespace diamond;
using doctest::Approx;

TEST_CASE("ingest builds the sales cube") {
    std::istringstream in(fixtures::sales_csv());
    Cube cube = ingest_csv(in, {{"product", "store"}, "sales"});
    CubeStats st = stats(cube);
    CHECK(st.cell_count == 30);
    CHECK(st.shape == std::vector<std::size_t>{6, 5});
    CHECK(st.volume == 30.0);
    CHECK(st.density == Approx(1.0));
    CHECK(st.total_sum == Approx(62.2));
    CHECK_FALSE(cube.has_negative_measure);
    CHECK_FALSE(cube.all_integer_measures);
    CHECK(cube_equal(cube, fixtures::sales_cube()));
}

TEST_CASE("ingest: empty stream, duplicates, errors") {
    SUBCASE("header only yields an empty cube") {
        std::istringstream in("a,b\n");
        Cube cube = ingest_csv(in, {{}, std::nullopt});
        CHECK(cube.cell_count() == 0);
        CHECK(cube.dim_count() == 2);
        CHECK(cube.dims[0].size() == 0);
    }
    SUBCASE("duplicate coordinates roll up by summing") {
        std::istringstream in("a,b,m\nx,y,1.0\nx,y,2.0\n");
        Cube cube = ingest_csv(in, {{}, "m"});
        CHECK(cube.cell_count() == 1);
        CHECK(cube.measures[0] == Approx(3.0));
    }
    SUBCASE("no measure column means measure 1") {
        std::istringstream in("a,b\nx,y\nx,z\n");
        Cube cube = ingest_csv(in, {{}, std::nullopt});
        CHECK(cube.cell_count() == 2);
        CHECK(cube.measures[0] == 1.0);
        CHECK(cube.all_integer_measures);
    }
    SUBCASE("ragged row names the record") {
        std::istringstream in("a,b\nx\n");
        CHECK_THROWS_WITH_AS(ingest_csv(in, {{}, std::nullopt}),
                             doctest::Contains("record 2"), IngestError);
    }
    SUBCASE("unparseable measure is an ingest error") {
        std::istringstream in("a,b,m\nx,y,notanumber\n");
        CHECK_THROWS_AS(ingest_csv(in, {{}, "m"}), IngestError);
    }
    SUBCASE("negative measures are flagged") {
        std::istringstream in("a,b,m\nx,y,-2\n");
        Cube cube = ingest_csv(in, {{}, "m"});
        CHECK(cube.has_negative_measure);
    }
    SUBCASE("measure column by index") {
        std::istringstream in("a,b,m\nx,y,4\n");
        Cube cube = ingest_csv(in, {{"a", "b"}, "2"});
        CHECK(cube.measures[0] == 4.0);
    }
}

TEST_CASE("slice sigma") {
    Cube cube = fixtures::sales_cube();
    auto store = cube.dims[1].find("Montreal");
    REQUIRE(store);
    CHECK(slice_sigma(cube, 1, *store, Aggregator::Sum) == Approx(14.2));
    CHECK(slice_sigma(cube, 1, *store, Aggregator::Count) == 6.0);
    CHECK(slice_sigma(cube, 1, *cube.dims[1].find("Chicago"), Aggregator::Sum) == Approx(7.5));
    CHECK_THROWS_AS(slice_sigma(cube, 1, 99, Aggregator::Sum), LookupError);
    CHECK_THROWS_AS(slice_sigma(cube, 7, 0, Aggregator::Sum), LookupError);

    // COUNT sigmas over one dimension partition the cells
    double total = 0;
    for (std::uint32_t v = 0; v < cube.dims[0].size(); ++v)
        total += slice_sigma(cube, 0, v, Aggregator::Count);
    CHECK(total == 30.0);
}

TEST_CASE("restrict") {
    Cube cube = fixtures::sales_cube();
    SUBCASE("named corner of the sales cube") {
        Cube r = restrict_by_names(cube, {{"Camcorder", "Phone", "Camera"},
                                          {"Montreal", "Miami", "Paris"}});
        CHECK(r.cell_count() == 9);
        CHECK(stats(r).total_sum == Approx(35.4));
        CHECK(contains(cube, r));
        CHECK_FALSE(contains(r, cube));
    }
    SUBCASE("keeping everything is the identity") {
        std::vector<std::vector<std::uint32_t>> keep(2);
        for (std::size_t j = 0; j < 2; ++j)
            for (std::uint32_t v = 0; v < cube.dims[j].size(); ++v) keep[j].push_back(v);
        Cube r = restrict_cube(cube, keep);
        CHECK(cube_equal(r, cube));
        Cube again = restrict_cube(r, keep);
        CHECK(cube_equal(again, cube));  // idempotent
    }
    SUBCASE("an empty keep set empties the cube") {
        Cube r = restrict_cube(cube, {{}, {0, 1}});
        CHECK(r.cell_count() == 0);
        CHECK(r.dims[0].size() == 0);
        CHECK(r.dims[1].size() == 2);
    }
    SUBCASE("unknown keep id is a lookup error") {
        CHECK_THROWS_AS(restrict_cube(cube, {{99}, {}}), LookupError);
    }
}

TEST_CASE("union of restrictions") {
    Cube cube = fixtures::sales_cube();
    Cube a = restrict_by_names(cube, {{"Camcorder"}, {"Montreal", "Miami"}});
    Cube b = restrict_by_names(cube, {{"Camcorder", "Phone"}, {"Montreal", "Miami"}});

    SUBCASE("union with a superset returns the superset") {
        CHECK(cube_equal(union_cubes(a, b), b));
    }
    SUBCASE("the empty cube is the identity element") {
        Cube empty = restrict_cube(cube, {{}, {}});
        CHECK(cube_equal(union_cubes(a, empty), a));
    }
    SUBCASE("commutative, associative, idempotent") {
        Cube c = restrict_by_names(cube, {{"Camera"}, {"Paris"}});
        CHECK(cube_equal(union_cubes(a, c), union_cubes(c, a)));
        CHECK(cube_equal(union_cubes(union_cubes(a, b), c), union_cubes(a, union_cubes(b, c))));
        CHECK(cube_equal(union_cubes(a, a), a));
    }
    SUBCASE("checkerboard even/odd union has 8 cells under COUNT semantics") {
        Cube board = fixtures::checkerboard_cube();
        Cube evens = restrict_by_names(board, {{"r0", "r2"}, {"c0", "c2"}});
        Cube odds = restrict_by_names(board, {{"r1", "r3"}, {"c1", "c3"}});
        Cube u = union_cubes(evens, odds);
        CHECK(u.cell_count() == 8);
        CHECK(u.dims[0].size() == 4);
        CHECK(u.dims[1].size() == 4);
    }
    SUBCASE("measure conflict raises") {
        CubeBuilder b1({"x", "y"}, "m");
        b1.add({"a", "b"}, 1.0);
        CubeBuilder b2({"x", "y"}, "m");
        b2.add({"a", "b"}, 2.0);
        CHECK_THROWS_AS(union_cubes(b1.build(), b2.build()), IncompatibleRestriction);
    }
}

TEST_CASE("contains") {
    Cube cube = fixtures::sales_cube();
    CHECK(contains(cube, cube));  // reflexive
    Cube diamond = restrict_by_names(cube, {{"Camcorder", "Phone", "Camera"},
                                            {"Montreal", "Miami", "Paris"}});
    CHECK(contains(cube, diamond));
    CHECK_FALSE(contains(diamond, cube));
}

TEST_CASE("csv round-trip preserves the cube") {
    Cube cube = fixtures::sales_cube();
    std::ostringstream out;
    write_csv(cube, out);
    std::istringstream in(out.str());
    Cube back = ingest_csv(in, {{"product", "store"}, "sales"});
    CHECK(cube_equal(cube, back));

    // and byte-for-byte stability of the writer itself
    std::ostringstream out2;
    write_csv(back, out2);
    CHECK(out.str() == out2.str());
}

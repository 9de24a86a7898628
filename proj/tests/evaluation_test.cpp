#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "linemap/errors.hpp"
#include "linemap/evaluation.hpp"

using namespace linemap;
using std::numbers::pi;

namespace {

const Thresholds kDense = Thresholds::dense();
const GridGeometry kGrid{Point::Zero(), 0.01};

} // namespace

TEST_CASE("cell lookup snaps onto boundaries")
{
    CHECK(kGrid.cellOf(Point(0.03, 0.0)) == CellKey{3, 0});
    CHECK(kGrid.cellOf(Point(0.0299, -0.0001)) == CellKey{2, -1});
    CHECK(kGrid.cellCenter({2, -1}).isApprox(Point(0.025, -0.005)));
}

TEST_CASE("kernel values around a single point")
{
    LookupTable table(kGrid, 0.03);
    const Point p(0.005, 0.005);  // a cell center
    table.addPoint(p);
    CHECK(table.value(CellKey{0, 0}) == doctest::Approx(1.0));
    CHECK(table.value(CellKey{3, 0}) == doctest::Approx(std::exp(-0.5)));
    CHECK(table.value(CellKey{6, 0}) == doctest::Approx(std::exp(-2.0)));
    CHECK(table.value(CellKey{7, 0}) == 0.0);
    CHECK(table.value(CellKey{5, 5}) == 0.0);  // 7.07 cm away
    CHECK(table.value(CellKey{-40, 2}) == 0.0);

    // Overlapping splats keep the larger value.
    table.addPoint(Point(0.035, 0.005));
    CHECK(table.value(CellKey{3, 0}) == doctest::Approx(1.0));
    CHECK(table.value(CellKey{0, 0}) == doctest::Approx(1.0));

    CHECK_THROWS_AS(LookupTable(kGrid, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LookupTable(GridGeometry{Point::Zero(), -1.0}, 0.03), std::invalid_argument);
}

TEST_CASE("table from registered scans")
{
    LaserScan s;
    s.angleMin = 0;
    s.angleIncrement = pi / 2;
    s.ranges = {1.0, 80.0};
    Trajectory t;
    t.append(0, Pose2D{});
    const LookupTable table = buildLookupTable(std::span<const LaserScan>(&s, 1), t);
    CHECK(table.value(Point(1.0, 0.0)) > 0.8);
    CHECK(table.value(Point(0.0, 1.0)) == 0.0);
    CHECK(table.occupiedCells() > 0);
    CHECK(table.meanOccupiedValue() > 0.0);
    CHECK(table.meanOccupiedValue() <= 1.0);
}

TEST_CASE("pgm output")
{
    LookupTable table(kGrid, 0.03);
    table.addPoint(Point(0.005, 0.005));
    std::ostringstream out;
    writePgm(out, table);
    const std::string text = out.str();
    REQUIRE(text.rfind("P5", 0) == 0);
    // 13 x 13 cells covered by a 2 sigma disc.
    CHECK(text.find("13 13") != std::string::npos);
    CHECK(text.find("255") != std::string::npos);
}

TEST_CASE("angle bins")
{
    CHECK(angleBinOf(0.0) == 0);
    CHECK(angleBinOf(pi / 2) == 90);
    CHECK(angleBinOf(-pi / 2) == 270);
    CHECK(angleBinOf(pi) == 180);
    CHECK(angleBinOf(degToRad(359.5)) == 359);
    CHECK(angleBinDistance(1, 359) == 2);
    CHECK(angleBinDistance(0, 180) == 180);
    CHECK(angleBinOf(degToRad(45.0), 5.0) == 9);
}

TEST_CASE("rasterization")
{
    const auto flat = rasterizeSegment(LineSegment({0, 0}, {0.03, 0}), kGrid);
    REQUIRE(flat.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(flat[i].cell == CellKey{i, 0});
        CHECK(flat[i].angleBin == 0);
    }

    const auto diagonal = rasterizeSegment(LineSegment({0.005, 0.005}, {0.035, 0.035}), kGrid);
    REQUIRE(diagonal.size() == 4);
    CHECK(diagonal.back().cell == CellKey{3, 3});
    CHECK(diagonal.front().angleBin == 45);

    const auto tiny = rasterizeSegment(LineSegment({0.001, 0.001}, {0.002, 0.002}), kGrid);
    CHECK(tiny.size() == 1);

    // Reversal keeps the cells and flips the bin by 180 degrees.
    const LineSegment s({0.013, 0.52}, {0.871, -0.204});
    const auto forward = rasterizeSegment(s, kGrid);
    const auto backward = rasterizeSegment(s.reversed(), kGrid);
    REQUIRE(forward.size() == backward.size());
    for (std::size_t i = 0; i < forward.size(); ++i)
        CHECK(forward[i].cell == backward[i].cell);
    CHECK(angleBinDistance(forward[0].angleBin, backward[0].angleBin) == 180);
}

TEST_CASE("redundant pairs")
{
    GlobalMap identical;
    identical.segments.emplace(0, LineSegment({0, 0}, {1, 0}, 1, 0));
    identical.segments.emplace(1, LineSegment({0, 0}, {1, 0}, 1, 1));
    auto r = detectRedundantPairs(identical, kDense, kGrid);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});

    GlobalMap perpendicular;
    perpendicular.segments.emplace(0, LineSegment({0, 0}, {1, 0}, 1, 0));
    perpendicular.segments.emplace(1, LineSegment({0.5, -0.5}, {0.5, 0.5}, 1, 1));
    CHECK(detectRedundantPairs(perpendicular, kDense, kGrid).pairs.empty());

    GlobalMap opposite;
    opposite.segments.emplace(0, LineSegment({0, 0}, {1, 0}, 1, 0));
    opposite.segments.emplace(1, LineSegment({1, 0.02}, {0, 0.02}, 1, 1));
    CHECK(detectRedundantPairs(opposite, kDense, kGrid).pairs.empty());

    GlobalMap parallelFar;
    parallelFar.segments.emplace(0, LineSegment({0, 0}, {1, 0}, 1, 0));
    parallelFar.segments.emplace(1, LineSegment({0, 0.3}, {1, 0.3}, 1, 1));
    CHECK(detectRedundantPairs(parallelFar, kDense, kGrid).pairs.empty());

    GlobalMap three;
    for (std::size_t i = 0; i < 3; ++i)
        three.segments.emplace(i, LineSegment({0, 0.01 * i}, {1, 0.01 * i}, 1, i));
    r = detectRedundantPairs(three, kDense, kGrid);
    CHECK(r.pairs.size() == 2);
    CHECK(r.pairs[0].first == 0);
    CHECK(r.pairs[1].first == 0);

    // A short piece mostly outside the strip stays below the fraction.
    GlobalMap partial;
    partial.segments.emplace(0, LineSegment({0, 0}, {1, 0}, 1, 0));
    partial.segments.emplace(1, LineSegment({0.95, 0.0}, {2.0, 0.0}, 1, 1));
    CHECK(detectRedundantPairs(partial, kDense, kGrid).pairs.empty());
}

TEST_CASE("quality score")
{
    GlobalMap map;
    map.segments.emplace(0, LineSegment({0.005, 0.005}, {0.505, 0.005}, 1, 0));
    LookupTable table(kGrid, 0.03);
    for (int i = 0; i <= 50; ++i)
        table.addPoint(Point(0.005 + 0.01 * i, 0.005));
    const QualityReport perfect = mapQuality(map, table, kDense);
    CHECK(perfect.q == doctest::Approx(1.0));
    CHECK(perfect.percent == doctest::Approx(100.0));
    CHECK(perfect.totalPixels == 51);
    CHECK(perfect.redundantPixels == 0);

    GlobalMap doubled = map;
    doubled.segments.emplace(1, LineSegment({0.005, 0.005}, {0.505, 0.005}, 1, 1));
    EvalParams params;
    params.lambda = 0.5;
    const QualityReport dup = mapQuality(doubled, table, kDense, params);
    CHECK(dup.q == doctest::Approx(-0.5));
    CHECK(dup.meanPixelScore == doctest::Approx(1.0));
    CHECK(dup.redundantPairs.size() == 1);
    CHECK(dup.redundantPixels == 102);

    CHECK_THROWS_AS(mapQuality(GlobalMap{}, table, kDense), DataError);
}

TEST_CASE("error metric")
{
    GlobalMap map;
    map.segments.emplace(0, LineSegment({0, 0}, {2, 0}, 1, 0));
    CorrespondenceStore store;
    store.subsets[0] = {{LineSegment({0, 0.02}, {2, 0.02}), 0, 0}};
    Trajectory t;
    t.append(0, Pose2D{});
    const ErrorReport single = errorMetric(map, store, t);
    CHECK(single.e == doctest::Approx(0.02));
    CHECK(single.K == 1);
    CHECK(single.originals == 1);

    // Pooled over originals, not averaged per segment.
    map.segments.emplace(1, LineSegment({0, 5}, {2, 5}, 3, 1));
    store.subsets[1] = {{LineSegment({0, 5}, {2, 5}), 0, 1},
                        {LineSegment({0, 5}, {2, 5}), 0, 2},
                        {LineSegment({0, 5}, {2, 5}), 0, 3}};
    const ErrorReport pooled = errorMetric(map, store, t);
    CHECK(pooled.e == doctest::Approx(0.005));
    REQUIRE(pooled.perSegment.size() == 2);
    CHECK(pooled.perSegment[0].second == doctest::Approx(0.02));

    // Originals are re-expressed with the trajectory.
    Trajectory lifted;
    lifted.append(0, Pose2D(0, -0.02, 0));
    CHECK(errorMetric(map, store, lifted).e == doctest::Approx(0.015));

    CorrespondenceStore missing;
    CHECK_THROWS_AS(errorMetric(map, missing, t), DataError);
}

TEST_CASE("distance metric")
{
    GlobalMap map;
    map.segments.emplace(0, LineSegment({0, 0}, {2, 0}, 1, 0));
    CorrespondenceStore store;
    store.subsets[0] = {{LineSegment({0, 0.02}, {2, 0.02}), 0, 0}};
    Trajectory t;
    t.append(0, Pose2D{});
    CHECK(distanceMetric(map, store, t, 1.0, 0.0) == doctest::Approx(errorMetric(map, store, t).e));

    // A small rotation about the center adds only the heading term.
    const Pose2D r(0, 0, 0.02);
    const Point c(1, 0);
    CorrespondenceStore rotated;
    rotated.subsets[0] = {{LineSegment(r.rotation() * (Point(0, 0) - c) + c, r.rotation() * (Point(2, 0) - c) + c), 0, 0}};
    CHECK(distanceMetric(map, rotated, t, 1.0, 1.0) == doctest::Approx(0.02));
    CHECK(distanceMetric(map, rotated, t, 1.0, 0.0) == doctest::Approx(0.0));
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "linemap/fusion.hpp"

using namespace linemap;
using std::numbers::pi;

namespace {

const Thresholds kDense = Thresholds::dense();

void checkPoint(const Point& got, const Point& expected, double tol = 1e-12)
{
    CHECK(got.x() == doctest::Approx(expected.x()).epsilon(tol));
    CHECK(got.y() == doctest::Approx(expected.y()).epsilon(tol));
}

} // namespace

TEST_CASE("threshold presets")
{
    CHECK(kDense.thetaMax == doctest::Approx(4 * pi / 180));
    CHECK(kDense.dMax == 0.1);
    CHECK(kDense.pMin == -0.1);
    const auto sparse = Thresholds::sparse();
    CHECK(sparse.thetaMax == doctest::Approx(2 * pi / 180));
    CHECK(sparse.dMax == 0.05);
    CHECK(sparse.pMin == -0.05);
    CHECK_THROWS_AS((Thresholds{0.0, 0.1, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Thresholds{pi / 2, 0.1, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((Thresholds{0.1, 0.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("heading deviation")
{
    const LineSegment a({0, 0}, {1, 0});
    CHECK(headingDeviation(a, a) == 0.0);

    const LineSegment nearPi({0, 0}, {std::cos(pi - 0.01), std::sin(pi - 0.01)});
    const LineSegment nearMinusPi({0, 0}, {std::cos(-pi + 0.01), std::sin(-pi + 0.01)});
    CHECK(headingDeviation(nearPi, nearMinusPi) == doctest::Approx(0.02));

    CHECK(headingDeviation(a, LineSegment({1, 0}, {0, 0})) == doctest::Approx(pi));
}

TEST_CASE("separation distance")
{
    const LineSegment xAxis({0, 0}, {1, 0});
    CHECK(separationDistance(xAxis, LineSegment({0, 0.05}, {1, 0.08})) == doctest::Approx(0.08));
    CHECK(separationDistance(xAxis, LineSegment({3, 0}, {5, 0})) == 0.0);
    CHECK(separationDistance(xAxis, LineSegment({0, 0.1}, {1, -0.1})) == doctest::Approx(0.1));
}

TEST_CASE("overlap length")
{
    const LineSegment lM({0, 0}, {5, 0});

    const auto inside = overlapLength(lM, LineSegment({2, 0.1}, {4, 0.1}));
    CHECK(inside.length == doctest::Approx(2.0));
    REQUIRE(inside.endpoints);
    checkPoint(inside.endpoints->first, {2, 0});
    checkPoint(inside.endpoints->second, {4, 0});

    const auto gap = overlapLength(lM, LineSegment({6, 0.1}, {8, 0.1}));
    CHECK(gap.length == doctest::Approx(-1.0));
    CHECK_FALSE(gap.endpoints);

    const auto before = overlapLength(lM, LineSegment({-3, 0}, {-0.5, 0}));
    CHECK(before.length == doctest::Approx(-0.5));

    const LineSegment small({1.5, -0.02}, {2.25, 0.03});
    CHECK(overlapLength(lM, small).length == doctest::Approx(0.75));

    const auto reversed = overlapLength(lM, LineSegment({4, 0}, {2, 0}));
    CHECK(reversed.length == doctest::Approx(2.0));

    const auto covering = overlapLength(lM, LineSegment({-1, 0}, {7, 0}));
    CHECK(covering.length == doctest::Approx(5.0));
}

TEST_CASE("fusion conditions")
{
    const LineSegment a({0, 0}, {3, 0});
    CHECK(satisfiesFusionConditions(a, a, kDense));

    // Two faces of a thin wall point in opposite directions.
    const LineSegment otherFace({3, 0.05}, {0, 0.05});
    FusionCounters counters;
    CHECK_FALSE(satisfiesFusionConditions(a, otherFace, kDense, &counters));
    CHECK(counters.headingChecks == 1);
    CHECK(counters.distanceChecks == 0);
    CHECK(counters.overlapChecks == 0);

    CHECK(satisfiesFusionConditions(a, LineSegment({3.05, 0}, {5, 0}), kDense));
    CHECK_FALSE(satisfiesFusionConditions(a, LineSegment({3.15, 0}, {5, 0}), kDense));

    counters = {};
    CHECK_FALSE(satisfiesFusionConditions(a, LineSegment({0, 1}, {3, 1}), kDense, &counters));
    CHECK(counters.headingChecks == 1);
    CHECK(counters.distanceChecks == 1);
    CHECK(counters.overlapChecks == 0);

    counters = {};
    CHECK_FALSE(satisfiesFusionConditions(a, LineSegment({4, 0}, {6, 0}), kDense, &counters));
    CHECK(counters.overlapChecks == 1);
}

TEST_CASE("self fusion holds for every segment")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 300; ++i) {
        const LineSegment s({u(rng), u(rng)}, {u(rng), u(rng)});
        CHECK(satisfiesFusionConditions(s, s, kDense));
        CHECK(satisfiesFusionConditions(s, s, Thresholds{0.01, 1e-6, s.length()}));
    }
}

TEST_CASE("merge of a single segment is the identity")
{
    const LineSegment s({1, 2}, {3, 4}, 5);
    CHECK(mergeSegments({s}) == s);
    CHECK_THROWS_AS(mergeSegments(std::vector<LineSegment>{}), std::invalid_argument);
}

TEST_CASE("merge of two offset segments")
{
    const LineSegment merged = mergeSegments({LineSegment({0, 0}, {4, 0}), LineSegment({2, 0.2}, {6, 0.2})});
    checkPoint(merged.start(), {0, 0.1}, 1e-12);
    checkPoint(merged.end(), {6, 0.1}, 1e-12);
    CHECK(merged.weight() == 2);
    CHECK_FALSE(merged.index());
}

TEST_CASE("merge weights the centers")
{
    const LineSegment merged =
        mergeSegments({LineSegment({0, 0}, {4, 0}, 3), LineSegment({0, 0.4}, {4, 0.4}, 1)});
    CHECK(merged.center().y() == doctest::Approx(0.1));
    CHECK(merged.weight() == 4);
}

TEST_CASE("merge of copies and across the wrap")
{
    const LineSegment s({5, 1}, {2, 1.1}, 2);
    const LineSegment merged = mergeSegments({s, s, s});
    CHECK(merged.weight() == 6);
    CHECK((merged.start() - s.start()).norm() < 1e-12);
    CHECK((merged.end() - s.end()).norm() < 1e-12);

    // Headings pi - 0.01 and -pi + 0.01 average to pi, not 0.
    const LineSegment a({0, 0}, {-2, 0.02});
    const LineSegment b({0, 0}, {-2, -0.02});
    const LineSegment wrapped = mergeSegments({a, b});
    CHECK(std::abs(normAngle(wrapped.heading() - pi)) < 1e-12);
}

TEST_CASE("merged endpoints lie on the fused line")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (int i = 0; i < 200; ++i) {
        std::vector<LineSegment> set;
        for (int k = 0; k < 5; ++k)
            set.emplace_back(Point(jitter(rng), jitter(rng)), Point(3 + jitter(rng), 1 + jitter(rng)),
                             1 + k % 3);
        const LineSegment m = mergeSegments(set);
        const double theta = m.heading();
        const Point u(std::cos(theta), std::sin(theta));
        double cw = 0;
        Point c = Point::Zero();
        for (const auto& s : set) {
            c += s.weight() * s.center();
            cw += s.weight();
        }
        c /= cw;
        const Point n(-u.y(), u.x());
        CHECK(std::abs(n.dot(m.start() - c)) < 1e-9);
        CHECK(std::abs(n.dot(m.end() - c)) < 1e-9);
    }
}

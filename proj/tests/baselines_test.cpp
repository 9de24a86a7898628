#include <doctest.h>

#include <random>
#include <vector>

#include "linemap/baselines.hpp"

using namespace linemap;

namespace {

const Thresholds kDense = Thresholds::dense();

} // namespace

TEST_CASE("a single candidate gives the same map as one-to-many")
{
    MapState oto;
    MapState otm;
    const std::vector<LineSegment> first{LineSegment({0, 0}, {3, 0}), LineSegment({0, 2}, {0, 5})};
    const std::vector<LineSegment> second{LineSegment({1, 0.03}, {4, 0.01}), LineSegment({2, 2}, {5, 2})};
    for (const auto* scan : {&first, &second}) {
        otoIncrementalMerge(oto, *scan, 0, Pose2D{}, kDense);
        incrementalMerge(otm, *scan, 0, Pose2D{}, kDense);
    }
    CHECK(oto.map.segments == otm.map.segments);
    CHECK(oto.map.lastIndex == otm.map.lastIndex);
    CHECK(checkInvariants(oto, 4).empty());
}

TEST_CASE("two collinear map segments and one spanning scan segment")
{
    const std::vector<LineSegment> initial{LineSegment({0, 0}, {2, 0}), LineSegment({2.3, 0.02}, {4, 0.02})};
    const std::vector<LineSegment> spanning{LineSegment({1, 0.01}, {3, 0.01})};

    MapState oto;
    otoIncrementalMerge(oto, initial, 0, Pose2D{}, kDense);
    otoIncrementalMerge(oto, spanning, 1, Pose2D{}, kDense);
    CHECK(oto.map.size() == 2);

    MapState otm;
    incrementalMerge(otm, initial, 0, Pose2D{}, kDense);
    incrementalMerge(otm, spanning, 1, Pose2D{}, kDense);
    CHECK(otm.map.size() == 1);
}

TEST_CASE("one-to-one picks the closest candidate")
{
    MapState state;
    const std::vector<LineSegment> initial{LineSegment({0, 0.08}, {4, 0.08}), LineSegment({0, -0.02}, {4, -0.02})};
    otoIncrementalMerge(state, initial, 0, Pose2D{}, kDense);
    // Both pass the gates when checked one at a time against the scan.
    REQUIRE(state.map.size() == 1);

    MapState two;
    two.map.segments.emplace(0, LineSegment({0, 0.08}, {4, 0.08}, 1, 0));
    two.map.segments.emplace(1, LineSegment({0, -0.02}, {4, -0.02}, 1, 1));
    two.store.subsets[0] = {{LineSegment({0, 0.08}, {4, 0.08}), 0, 0}};
    two.store.subsets[1] = {{LineSegment({0, -0.02}, {4, -0.02}), 0, 1}};
    two.map.lastIndex = 2;
    two.originalsInserted = 2;
    const std::vector<LineSegment> scan{LineSegment({1, 0}, {3, 0})};
    otoIncrementalMerge(two, scan, 1, Pose2D{}, kDense);
    CHECK(two.map.size() == 2);
    CHECK(two.map.segments.at(1).weight() == 2);
    CHECK(two.map.segments.at(0).weight() == 1);
    CHECK(two.map.segments.at(0).start() == Point(0, 0.08));

    // Equal distances go to the smaller index.
    MapState tie;
    tie.map.segments.emplace(0, LineSegment({0, 0.02}, {4, 0.02}, 1, 0));
    tie.map.segments.emplace(1, LineSegment({0, -0.02}, {4, -0.02}, 1, 1));
    tie.store.subsets[0] = {{LineSegment({0, 0.02}, {4, 0.02}), 0, 0}};
    tie.store.subsets[1] = {{LineSegment({0, -0.02}, {4, -0.02}), 0, 1}};
    tie.map.lastIndex = 2;
    tie.originalsInserted = 2;
    otoIncrementalMerge(tie, scan, 1, Pose2D{}, kDense);
    CHECK(tie.map.segments.at(0).weight() == 2);
    CHECK(tie.map.segments.at(1).weight() == 1);
}

TEST_CASE("unmatched segments are appended")
{
    MapState state;
    const std::vector<LineSegment> a{LineSegment({0, 0}, {1, 0})};
    const std::vector<LineSegment> b{LineSegment({0, 5}, {1, 5})};
    otoIncrementalMerge(state, a, 0, Pose2D{}, kDense);
    otoIncrementalMerge(state, b, 1, Pose2D{}, kDense);
    CHECK(state.map.size() == 2);
    CHECK(state.map.lastIndex == 2);
}

TEST_CASE("offline replay")
{
    Trajectory poses;
    poses.append(0, Pose2D(1, 2, 0.3));
    poses.append(1, Pose2D(1, 2, 0.3));
    const std::vector<LineSegment> segs{LineSegment({1, -1}, {1, 1}), LineSegment({2, 2}, {4, 2})};

    const std::vector<ScanSegments> single{{0, segs}};
    const MapState one = o2toOfflineMerge(single, poses, kDense);
    REQUIRE(one.map.size() == 2);
    CHECK((one.map.segments.at(0).start() - transformToGlobal(segs[0], poses.at(0)).start()).norm() < 1e-12);

    const std::vector<ScanSegments> twice{{0, segs}, {1, segs}};
    const MapState dup = o2toOfflineMerge(twice, poses, kDense);
    CHECK(dup.map.size() == 2);
    for (const auto& [index, s] : dup.map.segments)
        CHECK(s.weight() == 2);
    CHECK(checkInvariants(dup, 4).empty());
}

TEST_CASE("one-to-one touches at most one map segment per scan segment")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> jitter(-0.04, 0.04);
    std::uniform_real_distribution<double> start(0.0, 6.0);
    MapState state;
    std::size_t fed = 0;
    for (std::size_t scan = 0; scan < 200; ++scan) {
        const double x = start(rng);
        const std::vector<LineSegment> segs{LineSegment({x, jitter(rng)}, {x + 1.0, jitter(rng)})};
        const auto before = state.map.segments;
        otoIncrementalMerge(state, segs, scan, Pose2D{}, kDense);
        fed += 1;
        std::size_t changed = 0;
        for (const auto& [index, s] : before)
            if (!state.map.segments.contains(index) || !(state.map.segments.at(index) == s))
                ++changed;
        CHECK(changed <= 1);
        CHECK(state.map.size() >= before.size());
        CHECK(checkInvariants(state, fed).empty());
    }
}

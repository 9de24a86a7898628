#include "linemap/baselines.hpp"

#include <limits>
#include <optional>

namespace linemap {

void otoIncrementalMerge(MapState& state, std::span<const LineSegment> scanSegments,
                         std::size_t poseIndex, const Pose2D& pose, const Thresholds& thresholds,
                         FusionCounters* counters)
{
    auto& segments = state.map.segments;
    auto& subsets = state.store.subsets;

    for (const LineSegment& scanSegment : scanSegments) {
        const LineSegment local(scanSegment.start(), scanSegment.end());
        const LineSegment global = transformToGlobal(local, pose);
        OriginalSegment original{local, poseIndex, state.originalsInserted++};

        std::optional<std::size_t> best;
        double bestDistance = std::numeric_limits<double>::infinity();
        for (const auto& [index, mapSegment] : segments) {
            if (!satisfiesFusionConditions(mapSegment, global, thresholds, counters))
                continue;
            const double d = separationDistance(mapSegment, global);
            if (d < bestDistance) {
                bestDistance = d;
                best = index;
            }
        }

        if (!best) {
            const std::size_t index = state.map.lastIndex++;
            LineSegment inserted = global;
            inserted.setIndex(index);
            segments.emplace(index, inserted);
            subsets[index].push_back(std::move(original));
            continue;
        }

        LineSegment fused = mergeSegments({segments.at(*best), global});
        fused.setIndex(*best);
        segments.insert_or_assign(*best, fused);
        subsets.at(*best).push_back(std::move(original));
    }
}

MapState o2toOfflineMerge(std::span<const ScanSegments> orderedScans, const Trajectory& finalPoses,
                          const Thresholds& thresholds)
{
    MapState state;
    for (const auto& scan : orderedScans)
        otoIncrementalMerge(state, scan.segments, scan.scanIndex, finalPoses.at(scan.scanIndex),
                            thresholds);
    return state;
}

} // namespace linemap

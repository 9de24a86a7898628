// One-to-one comparison mergers: the online variant and its offline replay
// on final poses.

#ifndef LINEMAP_BASELINES_HPP
#define LINEMAP_BASELINES_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "linemap/mapper.hpp"

namespace linemap {

/// Each scan segment fuses with at most one map segment: among those passing
/// the fusion conditions, the one with the smallest separation distance
/// (ties to the smaller index). Bookkeeping matches incrementalMerge.
void otoIncrementalMerge(MapState& state, std::span<const LineSegment> scanSegments,
                         std::size_t poseIndex, const Pose2D& pose, const Thresholds& thresholds,
                         FusionCounters* counters = nullptr);

struct ScanSegments {
    std::size_t scanIndex;
    std::vector<LineSegment> segments;  // sensor frame
};

/// Replays the scans in log order through otoIncrementalMerge with the final
/// poses and no adjustment.
MapState o2toOfflineMerge(std::span<const ScanSegments> orderedScans, const Trajectory& finalPoses,
                          const Thresholds& thresholds);

} // namespace linemap

#endif // LINEMAP_BASELINES_HPP

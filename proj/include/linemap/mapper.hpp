// One-to-many incremental merging and the parallel global map adjustment that
// re-merges every subset after the trajectory is re-optimized.

#ifndef LINEMAP_MAPPER_HPP
#define LINEMAP_MAPPER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linemap/fusion.hpp"
#include "linemap/geometry.hpp"
#include "linemap/map.hpp"
#include "linemap/scan_io.hpp"

namespace linemap {

/// Merges one scan's segments (sensor frame) into the state. Every map segment
/// that satisfies the fusion conditions with a scan segment is absorbed; the
/// fused segment takes the smallest matched index and the matched subsets are
/// coalesced under it. Scan segments are handled in order and each sees the
/// map as left by the previous one.
void incrementalMerge(MapState& state, std::span<const LineSegment> scanSegments,
                      std::size_t poseIndex, const Pose2D& pose, const Thresholds& thresholds,
                      FusionCounters* counters = nullptr);

/// Looks the pose up in the trajectory; throws DataError when it is missing.
void incrementalMerge(MapState& state, std::span<const LineSegment> scanSegments,
                      std::size_t poseIndex, const Trajectory& trajectory,
                      const Thresholds& thresholds, FusionCounters* counters = nullptr);

/// Re-expresses every subset with the trajectory poses and replaces each map
/// segment by the fusion of its subset. Indices, subsets and weights are kept.
/// workers == 0 runs the serial reference path; otherwise subsets are spread
/// over that many threads and committed once all have finished. The result is
/// identical for every worker count.
void globalMapAdjust(MapState& state, const Trajectory& trajectory, unsigned workers = 0);

/// Fusion of one subset under the given trajectory, ordered by
/// (poseIndex, id).
LineSegment remergeSubset(std::span<const OriginalSegment> subset, const Trajectory& trajectory);

/// Subsets whose members, after re-expression with the trajectory, no longer
/// all lie within dMax of the re-merged line.
std::vector<std::size_t> staleSubsets(const MapState& state, const Trajectory& trajectory,
                                      const Thresholds& thresholds);

/// Segments updated more than minUpdates times (weight > minUpdates).
GlobalMap filterByWeight(const GlobalMap& map, int minUpdates);

struct MapStatistics {
    std::size_t count = 0;
    std::optional<double> minLength;   // meters
    std::optional<double> maxLength;
    std::optional<double> meanLength;
};

MapStatistics mapStatistics(const GlobalMap& map);

/// Empty when all bookkeeping invariants hold, otherwise one message per
/// violation. expectedOriginals is the number of originals fed in so far.
std::vector<std::string> checkInvariants(const MapState& state, std::size_t expectedOriginals);

} // namespace linemap

#endif // LINEMAP_MAPPER_HPP

// Map state shared by the online mergers: the indexed global map and the
// partition of every original segment into per-map-segment subsets.

#ifndef LINEMAP_MAP_HPP
#define LINEMAP_MAP_HPP

#include <cstddef>
#include <map>
#include <vector>

#include "linemap/geometry.hpp"

namespace linemap {

/// A segment as extracted from one scan, kept in the sensor frame.
struct OriginalSegment {
    LineSegment segment;     // local frame
    std::size_t poseIndex;   // scan index of the pose it was extracted under
    std::size_t id;          // global insertion order, unique per original
};

struct GlobalMap {
    std::map<std::size_t, LineSegment> segments;  // global frame, keyed by map index
    std::size_t lastIndex = 0;                    // next index to hand out

    bool empty() const { return segments.empty(); }
    std::size_t size() const { return segments.size(); }
};

struct CorrespondenceStore {
    std::map<std::size_t, std::vector<OriginalSegment>> subsets;

    std::size_t originalCount() const
    {
        std::size_t n = 0;
        for (const auto& [index, subset] : subsets)
            n += subset.size();
        return n;
    }
};

/// Map plus correspondences, the complete state of an incremental merger.
struct MapState {
    GlobalMap map;
    CorrespondenceStore store;
    std::size_t originalsInserted = 0;
};

} // namespace linemap

#endif // LINEMAP_MAP_HPP

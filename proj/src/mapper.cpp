#include "linemap/mapper.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <limits>
#include <thread>
#include <tuple>

#include "linemap/errors.hpp"

namespace linemap {

void incrementalMerge(MapState& state, std::span<const LineSegment> scanSegments,
                      std::size_t poseIndex, const Pose2D& pose, const Thresholds& thresholds,
                      FusionCounters* counters)
{
    auto& segments = state.map.segments;
    auto& subsets = state.store.subsets;

    std::vector<std::size_t> matched;
    std::vector<LineSegment> group;
    for (const LineSegment& scanSegment : scanSegments) {
        const LineSegment local(scanSegment.start(), scanSegment.end());
        const LineSegment global = transformToGlobal(local, pose);
        OriginalSegment original{local, poseIndex, state.originalsInserted++};

        matched.clear();
        for (const auto& [index, mapSegment] : segments)
            if (satisfiesFusionConditions(mapSegment, global, thresholds, counters))
                matched.push_back(index);

        if (matched.empty()) {
            const std::size_t index = state.map.lastIndex++;
            LineSegment inserted = global;
            inserted.setIndex(index);
            segments.emplace(index, inserted);
            subsets[index].push_back(std::move(original));
            continue;
        }

        // std::map iterates in key order, so the first match is the minimum.
        const std::size_t target = matched.front();
        group.clear();
        for (std::size_t index : matched)
            group.push_back(segments.at(index));
        group.push_back(global);

        LineSegment fused = mergeSegments(group);
        fused.setIndex(target);

        auto& targetSubset = subsets.at(target);
        for (std::size_t index : matched) {
            if (index == target)
                continue;
            auto node = subsets.extract(index);
            targetSubset.insert(targetSubset.end(), std::make_move_iterator(node.mapped().begin()),
                                std::make_move_iterator(node.mapped().end()));
            segments.erase(index);
        }
        targetSubset.push_back(std::move(original));
        segments.insert_or_assign(target, fused);
    }
}

void incrementalMerge(MapState& state, std::span<const LineSegment> scanSegments,
                      std::size_t poseIndex, const Trajectory& trajectory,
                      const Thresholds& thresholds, FusionCounters* counters)
{
    incrementalMerge(state, scanSegments, poseIndex, trajectory.at(poseIndex), thresholds, counters);
}

LineSegment remergeSubset(std::span<const OriginalSegment> subset, const Trajectory& trajectory)
{
    if (subset.empty())
        throw DataError("cannot re-merge an empty subset");

    std::vector<const OriginalSegment*> ordered;
    ordered.reserve(subset.size());
    for (const auto& o : subset)
        ordered.push_back(&o);
    std::sort(ordered.begin(), ordered.end(), [](const OriginalSegment* a, const OriginalSegment* b) {
        return std::tie(a->poseIndex, a->id) < std::tie(b->poseIndex, b->id);
    });

    std::vector<LineSegment> global;
    global.reserve(ordered.size());
    for (const OriginalSegment* o : ordered)
        global.push_back(transformToGlobal(o->segment, trajectory.at(o->poseIndex)));
    return mergeSegments(global);
}

void globalMapAdjust(MapState& state, const Trajectory& trajectory, unsigned workers)
{
    struct Job {
        std::size_t index;
        const std::vector<OriginalSegment>* subset;
    };
    std::vector<Job> jobs;
    jobs.reserve(state.store.subsets.size());
    for (const auto& [index, subset] : state.store.subsets) {
        for (const auto& o : subset)
            if (!trajectory.contains(o.poseIndex))
                throw DataError("global map adjustment: no pose for scan index " +
                                std::to_string(o.poseIndex) + " (map segment " +
                                std::to_string(index) + ")");
        jobs.push_back({index, &subset});
    }

    std::vector<std::optional<LineSegment>> results(jobs.size());
    const auto run = [&](std::size_t i) {
        results[i] = remergeSubset(*jobs[i].subset, trajectory);
    };

    if (workers == 0 || jobs.size() <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            run(i);
    } else {
        const std::size_t threadCount = std::min<std::size_t>(workers, jobs.size());
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(threadCount);
        std::vector<std::thread> threads;
        threads.reserve(threadCount);
        for (std::size_t t = 0; t < threadCount; ++t) {
            threads.emplace_back([&, t] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
                        run(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& thread : threads)
            thread.join();
        for (const auto& error : errors)
            if (error)
                std::rethrow_exception(error);
    }

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        LineSegment segment = *results[i];
        segment.setIndex(jobs[i].index);
        state.map.segments.insert_or_assign(jobs[i].index, segment);
    }
}

std::vector<std::size_t> staleSubsets(const MapState& state, const Trajectory& trajectory,
                                      const Thresholds& thresholds)
{
    std::vector<std::size_t> stale;
    for (const auto& [index, subset] : state.store.subsets) {
        if (subset.size() < 2)
            continue;
        const LineSegment line = remergeSubset(subset, trajectory);
        for (const auto& o : subset) {
            const LineSegment g = transformToGlobal(o.segment, trajectory.at(o.poseIndex));
            if (separationDistance(line, g) > thresholds.dMax) {
                stale.push_back(index);
                break;
            }
        }
    }
    return stale;
}

GlobalMap filterByWeight(const GlobalMap& map, int minUpdates)
{
    GlobalMap filtered;
    filtered.lastIndex = map.lastIndex;
    for (const auto& [index, segment] : map.segments)
        if (segment.weight() > minUpdates)
            filtered.segments.emplace(index, segment);
    return filtered;
}

MapStatistics mapStatistics(const GlobalMap& map)
{
    MapStatistics stats;
    stats.count = map.segments.size();
    if (map.segments.empty())
        return stats;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double sum = 0.0;
    for (const auto& [index, segment] : map.segments) {
        const double len = segment.length();
        lo = std::min(lo, len);
        hi = std::max(hi, len);
        sum += len;
    }
    stats.minLength = lo;
    stats.maxLength = hi;
    stats.meanLength = sum / static_cast<double>(stats.count);
    return stats;
}

std::vector<std::string> checkInvariants(const MapState& state, std::size_t expectedOriginals)
{
    std::vector<std::string> problems;
    const auto& segments = state.map.segments;
    const auto& subsets = state.store.subsets;

    if (segments.size() != subsets.size())
        problems.push_back("map has " + std::to_string(segments.size()) + " segments but store has " +
                           std::to_string(subsets.size()) + " subsets");

    std::set<std::size_t> ids;
    std::size_t originals = 0;
    for (const auto& [index, subset] : subsets) {
        const auto it = segments.find(index);
        if (it == segments.end()) {
            problems.push_back("subset " + std::to_string(index) + " has no map segment");
            continue;
        }
        if (subset.empty())
            problems.push_back("subset " + std::to_string(index) + " is empty");
        if (static_cast<std::size_t>(it->second.weight()) != subset.size())
            problems.push_back("segment " + std::to_string(index) + " weight " +
                               std::to_string(it->second.weight()) + " != subset size " +
                               std::to_string(subset.size()));
        for (const auto& o : subset) {
            if (!ids.insert(o.id).second)
                problems.push_back("original " + std::to_string(o.id) + " appears in two subsets");
            ++originals;
        }
    }
    for (const auto& [index, segment] : segments) {
        if (!subsets.contains(index))
            problems.push_back("segment " + std::to_string(index) + " has no subset");
        if (index >= state.map.lastIndex)
            problems.push_back("segment index " + std::to_string(index) + " >= lastIndex " +
                               std::to_string(state.map.lastIndex));
        if (segment.index() != index)
            problems.push_back("segment " + std::to_string(index) + " carries a different index");
    }
    if (originals != expectedOriginals || state.originalsInserted != expectedOriginals)
        problems.push_back("store holds " + std::to_string(originals) + " originals, expected " +
                           std::to_string(expectedOriginals));
    if (!ids.empty() && (*ids.rbegin() + 1 != ids.size()))
        problems.push_back("original ids are not the contiguous range [0, n)");
    return problems;
}

} // namespace linemap

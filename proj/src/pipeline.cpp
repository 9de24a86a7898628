#include "linemap/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "linemap/baselines.hpp"
#include "linemap/errors.hpp"

namespace linemap {

namespace {

using Clock = std::chrono::steady_clock;

double millisSince(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

} // namespace

std::optional<MergerKind> parseMergerKind(const std::string& name)
{
    if (name == "cae")
        return MergerKind::Cae;
    if (name == "oto")
        return MergerKind::Oto;
    if (name == "o2to")
        return MergerKind::O2to;
    return std::nullopt;
}

std::string mergerName(MergerKind kind)
{
    switch (kind) {
    case MergerKind::Cae: return "cae";
    case MergerKind::Oto: return "oto";
    case MergerKind::O2to: return "o2to";
    }
    return "?";
}

PipelineResult runPipeline(std::span<const LaserScan> scans, const Trajectory& primary,
                           const Trajectory* optimized, const PipelineOptions& options)
{
    if (!options.adjustAt.empty() && optimized == nullptr)
        throw DataError("adjust markers need an optimized trajectory");
    options.thresholds.validate();

    PipelineResult result;
    MapState& state = result.state;
    std::vector<std::size_t> markers = options.adjustAt;
    std::sort(markers.begin(), markers.end());
    auto nextMarker = markers.begin();

    const bool offline = options.merger == MergerKind::O2to;
    const bool adjusting = options.merger == MergerKind::Cae;
    const Trajectory& finalPoses = optimized ? *optimized : primary;
    bool useOptimized = offline;
    std::size_t originals = 0;

    const auto adjust = [&] {
        const auto start = Clock::now();
        globalMapAdjust(state, *optimized, options.workers);
        result.totalMillis += millisSince(start);
        ++result.adjustments;
    };

    for (std::size_t position : selectKeyframes(scans, primary, options.keyframe)) {
        const LaserScan& scan = scans[position];
        for (; nextMarker != markers.end() && *nextMarker <= scan.scanIndex; ++nextMarker) {
            useOptimized = true;
            if (adjusting)
                adjust();
        }
        const Pose2D& pose = useOptimized ? finalPoses.at(scan.scanIndex) : primary.at(scan.scanIndex);
        const std::vector<LineSegment> segments = extractSegments(scan, options.extraction);
        originals += segments.size();

        const auto start = Clock::now();
        if (options.merger == MergerKind::Cae)
            incrementalMerge(state, segments, scan.scanIndex, pose, options.thresholds);
        else
            otoIncrementalMerge(state, segments, scan.scanIndex, pose, options.thresholds);
        const double elapsed = millisSince(start);
        result.frameMillis.push_back(elapsed);
        result.totalMillis += elapsed;
        result.keyframes.push_back(scan.scanIndex);

        if (options.checkEachFrame)
            for (const auto& problem : checkInvariants(state, originals))
                result.violations.push_back("scan " + std::to_string(scan.scanIndex) + ": " + problem);
    }

    if (adjusting && optimized && (markers.empty() || nextMarker != markers.end()))
        adjust();
    return result;
}

} // namespace linemap

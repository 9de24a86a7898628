// Log replay: keyframe selection, extraction and one of the mergers, with
// optional map adjustment when a re-optimized trajectory becomes available.

#ifndef LINEMAP_PIPELINE_HPP
#define LINEMAP_PIPELINE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linemap/extraction.hpp"
#include "linemap/mapper.hpp"
#include "linemap/scan_io.hpp"

namespace linemap {

enum class MergerKind { Cae, Oto, O2to };

std::optional<MergerKind> parseMergerKind(const std::string& name);
std::string mergerName(MergerKind kind);

struct PipelineOptions {
    MergerKind merger = MergerKind::Cae;
    ExtractionParams extraction;
    Thresholds thresholds = Thresholds::dense();
    KeyframeParams keyframe;
    std::vector<std::size_t> adjustAt;  // scan indices at which the optimized poses take over
    unsigned workers = 0;
    bool checkEachFrame = false;
};

struct PipelineResult {
    MapState state;
    std::vector<std::size_t> keyframes;  // scan indices processed
    std::vector<double> frameMillis;     // merge time per keyframe
    double totalMillis = 0.0;            // merging plus adjustment
    std::size_t adjustments = 0;
    std::vector<std::string> violations; // invariant failures, "scan N: ..."
};

/// Keyframes are chosen on the primary trajectory. The online mergers use the
/// primary poses until the first adjust marker is reached and the optimized
/// poses afterwards; the one-to-many merger also runs globalMapAdjust at each
/// marker, or once at the end when optimized poses are given without markers.
/// The offline baseline replays every keyframe with the optimized poses (the
/// primary ones when none are given). Throws DataError when markers are
/// given without an optimized trajectory or a pose is missing.
PipelineResult runPipeline(std::span<const LaserScan> scans, const Trajectory& primary,
                           const Trajectory* optimized, const PipelineOptions& options);

} // namespace linemap

#endif // LINEMAP_PIPELINE_HPP

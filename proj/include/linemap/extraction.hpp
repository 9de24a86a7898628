// Line segment extraction from a single scan, in the sensor frame.

#ifndef LINEMAP_EXTRACTION_HPP
#define LINEMAP_EXTRACTION_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "linemap/geometry.hpp"
#include "linemap/scan_io.hpp"

namespace linemap {

struct ExtractionParams {
    double minLength = 0.6;       // meters
    int minPoints = 10;
    double splitThreshold = 0.05; // meters
    double maxPointGap = 0.5;     // meters

    void validate() const;
};

/// Total least squares line through a point set: centroid plus unit direction
/// (principal axis of the scatter matrix).
struct LineFit {
    Point centroid;
    Point direction;
    double maxResidual = 0.0;
};

LineFit fitLine(std::span<const Point> points);

/// Split-and-merge (iterative end point fit) with gap breaking. Each accepted
/// run is refit by total least squares and its endpoints are the projections
/// of the run's first and last points, so segments point in increasing beam
/// angle. Returned segments have weight 1 and are in beam order.
std::vector<LineSegment> extractSegments(const LaserScan& scan, const ExtractionParams& params);

/// Same procedure on an ordered point chain.
std::vector<LineSegment> extractSegments(std::span<const Point> orderedPoints,
                                         const ExtractionParams& params);

class SegmentExtractor {
public:
    virtual ~SegmentExtractor() = default;
    virtual std::vector<LineSegment> extract(const LaserScan& scan) const = 0;
};

class SplitAndMergeExtractor final : public SegmentExtractor {
public:
    explicit SplitAndMergeExtractor(ExtractionParams params) : params_(params) { params_.validate(); }

    std::vector<LineSegment> extract(const LaserScan& scan) const override
    {
        return extractSegments(scan, params_);
    }

    const ExtractionParams& params() const { return params_; }

private:
    ExtractionParams params_;
};

} // namespace linemap

#endif // LINEMAP_EXTRACTION_HPP

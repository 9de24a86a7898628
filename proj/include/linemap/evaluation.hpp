// Map-quality evaluation: a Gaussian-smeared occupancy lookup table built from
// registered scans, directed rasterization of map segments, strip-based
// redundancy detection and the correlation, error and distance metrics.

#ifndef LINEMAP_EVALUATION_HPP
#define LINEMAP_EVALUATION_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "linemap/fusion.hpp"
#include "linemap/map.hpp"
#include "linemap/scan_io.hpp"

namespace linemap {

struct CellKey {
    int x = 0;
    int y = 0;

    friend bool operator==(const CellKey&, const CellKey&) = default;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& c) const noexcept
    {
        const auto packed = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                            static_cast<std::uint32_t>(c.y);
        return std::hash<std::uint64_t>{}(packed * 0x9E3779B97F4A7C15ull);
    }
};

/// Cell (i, j) covers [origin + i*res, origin + (i+1)*res) on each axis.
struct GridGeometry {
    Point origin = Point::Zero();
    double resolution = 0.01;

    /// Coordinates within 1e-9 cells of a boundary snap onto it, so that
    /// 0.03 / 0.01 lands in cell 3 rather than 2.
    CellKey cellOf(const Point& p) const;
    Point cellCenter(const CellKey& c) const;
};

class LookupTable {
public:
    LookupTable(GridGeometry geometry, double sigma);

    const GridGeometry& geometry() const { return geometry_; }
    double sigma() const { return sigma_; }

    /// Zero for cells never touched.
    double value(const CellKey& cell) const;
    double value(const Point& p) const { return value(geometry_.cellOf(p)); }

    /// Splats one world point: every cell whose center lies within 2 sigma
    /// takes max(current, exp(-d^2 / (2 sigma^2))).
    void addPoint(const Point& p);

    std::size_t occupiedCells() const { return cells_.size(); }
    double meanOccupiedValue() const;
    const std::unordered_map<CellKey, double, CellKeyHash>& cells() const { return cells_; }

private:
    GridGeometry geometry_;
    double sigma_;
    std::unordered_map<CellKey, double, CellKeyHash> cells_;
};

LookupTable buildLookupTable(std::span<const Point> worldPoints, const GridGeometry& geometry,
                             double sigma);
LookupTable buildLookupTable(std::span<const LaserScan> scans, const Trajectory& trajectory,
                             double resolution = 0.01, double sigma = 0.03);

/// 8-bit binary PGM of the table's bounding box, +y up.
void writePgm(std::ostream& out, const LookupTable& table);

struct DirectedPixel {
    CellKey cell;
    int angleBin = 0;

    friend bool operator==(const DirectedPixel&, const DirectedPixel&) = default;
};

int angleBinOf(double heading, double binDeg = 1.0);
int angleBinDistance(int a, int b, double binDeg = 1.0);

/// Bresenham cells between the endpoint cells, traversed from the
/// lexicographically smaller cell, each tagged with the heading's bin.
std::vector<DirectedPixel> rasterizeSegment(const LineSegment& s, const GridGeometry& geometry,
                                            double angleBinDeg = 1.0);

struct EvalParams {
    double resolution = 0.01;
    double sigma = 0.03;
    double angleBinDeg = 1.0;
    double lambda = 1.0;
    double superpositionFraction = 0.20;
};

struct RedundancyResult {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (kept, redundant)
    std::map<std::size_t, bool> redundant;                   // flagged against an earlier segment
};

/// Segments are checked in ascending index against the segments already
/// accepted as non-redundant. A segment is redundant against an accepted one
/// when at least `fraction` of its pixels fall in the accepted segment's
/// strip (length x 2 dMax, cell center inside) and the bin distance of the
/// headings is within thetaMax. Each segment is flagged at most once.
RedundancyResult detectRedundantPairs(const GlobalMap& map, const Thresholds& thresholds,
                                      const GridGeometry& geometry, double fraction = 0.20,
                                      double angleBinDeg = 1.0);

struct QualityReport {
    double q = 0.0;
    std::size_t totalPixels = 0;      // N
    std::size_t redundantPixels = 0;  // n
    double lambda = 1.0;
    std::vector<std::pair<std::size_t, std::size_t>> redundantPairs;
    double percent = 0.0;             // 100 q
    double meanPixelScore = 0.0;      // plain mean of L over all pixels
    double meanOccupiedCellValue = 0.0;
};

/// Correlation score: pixels of segments that belong to a redundant pair
/// (both members) enter with weight -lambda, all others with +1, averaged
/// over every pixel. Throws on an empty map.
QualityReport mapQuality(const GlobalMap& map, const LookupTable& table, const Thresholds& thresholds,
                         const EvalParams& params = {});

struct ErrorReport {
    double e = 0.0;               // meters
    std::size_t K = 0;            // final segments
    std::size_t originals = 0;    // sum of k_i
    std::vector<std::pair<std::size_t, double>> perSegment;  // (index, mean deviation)
};

/// Pooled mean distance of original centers (re-expressed with the
/// trajectory) to the infinite line of their final segment.
ErrorReport errorMetric(const GlobalMap& map, const CorrespondenceStore& store,
                        const Trajectory& trajectory);

/// Pooled mean of wDist * center distance + wAng * |heading deviation|.
double distanceMetric(const GlobalMap& map, const CorrespondenceStore& store,
                      const Trajectory& trajectory, double wDist = 1.0, double wAng = 1.0);

} // namespace linemap

#endif // LINEMAP_EVALUATION_HPP

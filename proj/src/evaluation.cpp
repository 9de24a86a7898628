#include "linemap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include "linemap/errors.hpp"

namespace linemap {

namespace {

int snapFloor(double q)
{
    const double r = std::round(q);
    if (std::abs(q - r) < 1e-9 * std::max(1.0, std::abs(q)))
        return static_cast<int>(r);
    return static_cast<int>(std::floor(q));
}

struct Strip {
    Point origin;
    Point along;
    Point across;
    double length;
    double halfWidth;

    bool contains(const Point& p) const
    {
        constexpr double kEps = 1e-12;
        const Point d = p - origin;
        const double s = along.dot(d);
        return s >= -kEps && s <= length + kEps && std::abs(across.dot(d)) <= halfWidth + kEps;
    }
};

Strip stripOf(const LineSegment& s, double halfWidth)
{
    const Point u = s.direction();
    return {s.start(), u, Point(-u.y(), u.x()), s.length(), halfWidth};
}

} // namespace

CellKey GridGeometry::cellOf(const Point& p) const
{
    return {snapFloor((p.x() - origin.x()) / resolution), snapFloor((p.y() - origin.y()) / resolution)};
}

Point GridGeometry::cellCenter(const CellKey& c) const
{
    return {origin.x() + (c.x + 0.5) * resolution, origin.y() + (c.y + 0.5) * resolution};
}

LookupTable::LookupTable(GridGeometry geometry, double sigma) : geometry_(geometry), sigma_(sigma)
{
    if (!(geometry_.resolution > 0.0))
        throw std::invalid_argument("LookupTable: resolution must be positive");
    if (!(sigma_ > 0.0))
        throw std::invalid_argument("LookupTable: sigma must be positive");
}

double LookupTable::value(const CellKey& cell) const
{
    const auto it = cells_.find(cell);
    return it == cells_.end() ? 0.0 : it->second;
}

void LookupTable::addPoint(const Point& p)
{
    const double radius = 2.0 * sigma_;
    const double radiusSq = radius * radius * (1.0 + 1e-9);
    const double twoSigmaSq = 2.0 * sigma_ * sigma_;
    const CellKey lo = geometry_.cellOf(p - Point(radius, radius));
    const CellKey hi = geometry_.cellOf(p + Point(radius, radius));
    for (int x = lo.x; x <= hi.x; ++x) {
        for (int y = lo.y; y <= hi.y; ++y) {
            const CellKey cell{x, y};
            const double dSq = (geometry_.cellCenter(cell) - p).squaredNorm();
            if (dSq > radiusSq)
                continue;
            const double v = std::exp(-dSq / twoSigmaSq);
            auto [it, inserted] = cells_.try_emplace(cell, v);
            if (!inserted && v > it->second)
                it->second = v;
        }
    }
}

double LookupTable::meanOccupiedValue() const
{
    if (cells_.empty())
        return 0.0;
    double sum = 0.0;
    for (const auto& [cell, v] : cells_)
        sum += v;
    return sum / static_cast<double>(cells_.size());
}

LookupTable buildLookupTable(std::span<const Point> worldPoints, const GridGeometry& geometry,
                             double sigma)
{
    LookupTable table(geometry, sigma);
    for (const auto& p : worldPoints)
        table.addPoint(p);
    return table;
}

LookupTable buildLookupTable(std::span<const LaserScan> scans, const Trajectory& trajectory,
                             double resolution, double sigma)
{
    const std::vector<Point> points = registerScans(scans, trajectory);
    GridGeometry geometry;
    geometry.resolution = resolution;
    return buildLookupTable(std::span<const Point>(points), geometry, sigma);
}

void writePgm(std::ostream& out, const LookupTable& table)
{
    if (table.cells().empty()) {
        out << "P5\n1 1\n255\n" << static_cast<char>(0);
        return;
    }
    CellKey lo{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
    CellKey hi{std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
    for (const auto& [cell, v] : table.cells()) {
        lo = {std::min(lo.x, cell.x), std::min(lo.y, cell.y)};
        hi = {std::max(hi.x, cell.x), std::max(hi.y, cell.y)};
    }
    const int width = hi.x - lo.x + 1;
    const int height = hi.y - lo.y + 1;
    out << "P5\n" << width << ' ' << height << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(width));
    for (int y = hi.y; y >= lo.y; --y) {
        for (int x = lo.x; x <= hi.x; ++x) {
            const double v = table.value(CellKey{x, y});
            row[static_cast<std::size_t>(x - lo.x)] =
                static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

int angleBinOf(double heading, double binDeg)
{
    double deg = radToDeg(normAngle(heading));
    if (deg < 0.0)
        deg += 360.0;
    const int bins = static_cast<int>(std::lround(360.0 / binDeg));
    return std::clamp(snapFloor(deg / binDeg), 0, bins - 1) % bins;
}

int angleBinDistance(int a, int b, double binDeg)
{
    const int bins = static_cast<int>(std::lround(360.0 / binDeg));
    const int d = std::abs(a - b) % bins;
    return std::min(d, bins - d);
}

std::vector<DirectedPixel> rasterizeSegment(const LineSegment& s, const GridGeometry& geometry,
                                            double angleBinDeg)
{
    CellKey a = geometry.cellOf(s.start());
    CellKey b = geometry.cellOf(s.end());
    if (b < a)
        std::swap(a, b);
    const int bin = angleBinOf(s.heading(), angleBinDeg);

    std::vector<DirectedPixel> pixels;
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    int x = a.x;
    int y = a.y;
    pixels.reserve(static_cast<std::size_t>(std::max(dx, -dy) + 1));
    while (true) {
        pixels.push_back({{x, y}, bin});
        if (x == b.x && y == b.y)
            break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return pixels;
}

RedundancyResult detectRedundantPairs(const GlobalMap& map, const Thresholds& thresholds,
                                      const GridGeometry& geometry, double fraction,
                                      double angleBinDeg)
{
    struct Accepted {
        std::size_t index;
        Strip strip;
        int bin;
    };
    const double maxBinDeviation = radToDeg(thresholds.thetaMax) + 1e-9;

    RedundancyResult result;
    std::vector<Accepted> accepted;
    for (const auto& [index, segment] : map.segments) {
        const auto pixels = rasterizeSegment(segment, geometry, angleBinDeg);
        const int bin = pixels.front().angleBin;

        bool flagged = false;
        for (const Accepted& other : accepted) {
            if (angleBinDistance(bin, other.bin, angleBinDeg) * angleBinDeg > maxBinDeviation)
                continue;
            std::size_t inside = 0;
            for (const auto& px : pixels)
                if (other.strip.contains(geometry.cellCenter(px.cell)))
                    ++inside;
            if (static_cast<double>(inside) >= fraction * static_cast<double>(pixels.size())) {
                result.pairs.emplace_back(other.index, index);
                flagged = true;
                break;
            }
        }
        result.redundant[index] = flagged;
        if (!flagged)
            accepted.push_back({index, stripOf(segment, thresholds.dMax), bin});
    }
    return result;
}

QualityReport mapQuality(const GlobalMap& map, const LookupTable& table, const Thresholds& thresholds,
                         const EvalParams& params)
{
    if (map.segments.empty())
        throw DataError("map quality is undefined for an empty map");

    const GridGeometry& geometry = table.geometry();
    const RedundancyResult redundancy = detectRedundantPairs(
        map, thresholds, geometry, params.superpositionFraction, params.angleBinDeg);

    std::set<std::size_t> penalized;
    for (const auto& [kept, redundant] : redundancy.pairs) {
        penalized.insert(kept);
        penalized.insert(redundant);
    }

    QualityReport report;
    report.lambda = params.lambda;
    report.redundantPairs = redundancy.pairs;
    double signedSum = 0.0;
    double plainSum = 0.0;
    for (const auto& [index, segment] : map.segments) {
        const bool negative = penalized.contains(index);
        for (const auto& px : rasterizeSegment(segment, geometry, params.angleBinDeg)) {
            const double score = table.value(px.cell);
            plainSum += score;
            signedSum += negative ? -params.lambda * score : score;
            ++report.totalPixels;
            if (negative)
                ++report.redundantPixels;
        }
    }
    const double n = static_cast<double>(report.totalPixels);
    report.q = signedSum / n;
    report.meanPixelScore = plainSum / n;
    report.percent = 100.0 * report.q;
    report.meanOccupiedCellValue = table.meanOccupiedValue();
    return report;
}

namespace {

template <typename Visit>
std::size_t forEachOriginal(const GlobalMap& map, const CorrespondenceStore& store,
                            const Trajectory& trajectory, Visit&& visit)
{
    std::size_t count = 0;
    for (const auto& [index, final] : map.segments) {
        const auto it = store.subsets.find(index);
        if (it == store.subsets.end())
            throw DataError("no correspondence subset for map segment " + std::to_string(index));
        for (const auto& o : it->second) {
            visit(index, final, transformToGlobal(o.segment, trajectory.at(o.poseIndex)));
            ++count;
        }
    }
    return count;
}

} // namespace

ErrorReport errorMetric(const GlobalMap& map, const CorrespondenceStore& store,
                        const Trajectory& trajectory)
{
    ErrorReport report;
    report.K = map.segments.size();
    std::map<std::size_t, std::pair<double, std::size_t>> perSegment;
    double total = 0.0;
    report.originals = forEachOriginal(
        map, store, trajectory,
        [&](std::size_t index, const LineSegment& final, const LineSegment& original) {
            const double d = pointToLineDistance(Point(original.center()), toGeneralForm(final));
            total += d;
            auto& [sum, count] = perSegment[index];
            sum += d;
            ++count;
        });
    report.e = report.originals == 0 ? 0.0 : total / static_cast<double>(report.originals);
    for (const auto& [index, acc] : perSegment)
        report.perSegment.emplace_back(index, acc.first / static_cast<double>(acc.second));
    return report;
}

double distanceMetric(const GlobalMap& map, const CorrespondenceStore& store,
                      const Trajectory& trajectory, double wDist, double wAng)
{
    double total = 0.0;
    const std::size_t count = forEachOriginal(
        map, store, trajectory,
        [&](std::size_t, const LineSegment& final, const LineSegment& original) {
            const double d = pointToLineDistance(Point(original.center()), toGeneralForm(final));
            const double a = std::abs(normAngle(original.heading() - final.heading()));
            total += wDist * d + wAng * a;
        });
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

} // namespace linemap

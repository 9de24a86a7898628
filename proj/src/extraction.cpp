#include "linemap/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace linemap {

namespace {

using Range = std::pair<std::size_t, std::size_t>;  // inclusive [first, last]

double chordDistance(const Point& p, const Point& a, const Point& b)
{
    const Point ab = b - a;
    const double len = ab.norm();
    if (len == 0.0)
        return (p - a).norm();
    return std::abs(ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x())) / len;
}

void splitRecursive(std::span<const Point> pts, Range range, double threshold,
                    std::vector<Range>& out)
{
    const auto [first, last] = range;
    if (last - first < 2) {
        out.push_back(range);
        return;
    }
    double worst = -1.0;
    std::size_t worstAt = first;
    for (std::size_t k = first + 1; k < last; ++k) {
        const double d = chordDistance(pts[k], pts[first], pts[last]);
        if (d > worst) {
            worst = d;
            worstAt = k;
        }
    }
    if (worst <= threshold) {
        out.push_back(range);
        return;
    }
    splitRecursive(pts, {first, worstAt}, threshold, out);
    splitRecursive(pts, {worstAt, last}, threshold, out);
}

std::span<const Point> slice(std::span<const Point> pts, Range r)
{
    return pts.subspan(r.first, r.second - r.first + 1);
}

} // namespace

void ExtractionParams::validate() const
{
    if (!(minLength > 0.0))
        throw std::invalid_argument("extraction: min_length must be positive");
    if (minPoints < 2)
        throw std::invalid_argument("extraction: min_points must be at least 2");
    if (!(splitThreshold > 0.0))
        throw std::invalid_argument("extraction: split_threshold must be positive");
    if (!(maxPointGap > 0.0))
        throw std::invalid_argument("extraction: max_point_gap must be positive");
}

LineFit fitLine(std::span<const Point> points)
{
    if (points.size() < 2)
        throw std::invalid_argument("fitLine: need at least two points");

    Point centroid = Point::Zero();
    for (const auto& p : points)
        centroid += p;
    centroid /= static_cast<double>(points.size());

    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : points) {
        const Point d = p - centroid;
        scatter.noalias() += d * d.transpose();
    }

    // Eigenvalues come back in increasing order; the last vector is the axis.
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(scatter);
    LineFit fit;
    fit.centroid = centroid;
    fit.direction = solver.eigenvectors().col(1).normalized();

    const Point normal(-fit.direction.y(), fit.direction.x());
    for (const auto& p : points)
        fit.maxResidual = std::max(fit.maxResidual, std::abs(normal.dot(p - centroid)));
    return fit;
}

std::vector<LineSegment> extractSegments(std::span<const Point> pts, const ExtractionParams& params)
{
    params.validate();
    std::vector<LineSegment> segments;
    if (pts.size() < 2)
        return segments;

    // Break the chain wherever consecutive returns are too far apart.
    std::vector<Range> runs;
    std::size_t runStart = 0;
    for (std::size_t i = 1; i <= pts.size(); ++i) {
        if (i == pts.size() || (pts[i] - pts[i - 1]).norm() > params.maxPointGap) {
            if (i - runStart >= 2)
                runs.push_back({runStart, i - 1});
            runStart = i;
        }
    }

    for (const Range& run : runs) {
        std::vector<Range> pieces;
        splitRecursive(pts, run, params.splitThreshold, pieces);

        // Merge neighbours whose union still fits one line.
        std::vector<Range> merged;
        for (const Range& piece : pieces) {
            if (!merged.empty() && merged.back().second == piece.first) {
                const Range combined{merged.back().first, piece.second};
                if (fitLine(slice(pts, combined)).maxResidual <= params.splitThreshold) {
                    merged.back() = combined;
                    continue;
                }
            }
            merged.push_back(piece);
        }

        for (const Range& piece : merged) {
            const auto span = slice(pts, piece);
            if (static_cast<int>(span.size()) < params.minPoints)
                continue;
            const LineFit fit = fitLine(span);
            const Point start = fit.centroid + fit.direction * fit.direction.dot(span.front() - fit.centroid);
            const Point end = fit.centroid + fit.direction * fit.direction.dot(span.back() - fit.centroid);
            if ((end - start).norm() < params.minLength)
                continue;
            segments.emplace_back(start, end);
        }
    }
    return segments;
}

std::vector<LineSegment> extractSegments(const LaserScan& scan, const ExtractionParams& params)
{
    const std::vector<Point> pts = scan.localPoints();
    return extractSegments(std::span<const Point>(pts), params);
}

} // namespace linemap

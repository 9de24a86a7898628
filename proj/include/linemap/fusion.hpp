// Fusion conditions (heading deviation, separation distance, overlap) and the
// weighted fusion that collapses an associated set into one segment.

#ifndef LINEMAP_FUSION_HPP
#define LINEMAP_FUSION_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "linemap/geometry.hpp"

namespace linemap {

template <typename Scalar>
struct FusionThresholds {
    Scalar thetaMax;  // radians
    Scalar dMax;      // meters
    Scalar pMin;      // meters, negative values tolerate gaps

    void validate() const
    {
        if (!(thetaMax > 0 && thetaMax < std::numbers::pi_v<Scalar> / 2))
            throw std::invalid_argument("FusionThresholds: thetaMax must lie in (0, pi/2)");
        if (!(dMax > 0))
            throw std::invalid_argument("FusionThresholds: dMax must be positive");
        if (!std::isfinite(pMin))
            throw std::invalid_argument("FusionThresholds: pMin must be finite");
    }

    /// 4 deg / 100 mm / -100 mm, used for the dense indoor logs.
    static FusionThresholds dense()
    {
        return {degToRad(Scalar(4)), Scalar(0.1), Scalar(-0.1)};
    }
    /// 2 deg / 50 mm / -50 mm, used for sparse pre-registered logs.
    static FusionThresholds sparse()
    {
        return {degToRad(Scalar(2)), Scalar(0.05), Scalar(-0.05)};
    }
};

using Thresholds = FusionThresholds<double>;

template <typename Scalar>
struct FusionMeasurements {
    Scalar headingDeviation;
    Scalar separationDistance;
    Scalar overlap;
};

template <typename Scalar>
struct Overlap {
    Scalar length;  // negative when the projected interval misses lM (gap length)
    std::optional<std::pair<Point2<Scalar>, Point2<Scalar>>> endpoints;
};

/// Per-gate evaluation counts, used to observe the coarse-to-fine screening.
struct FusionCounters {
    std::size_t headingChecks = 0;
    std::size_t distanceChecks = 0;
    std::size_t overlapChecks = 0;
};

template <typename Scalar>
Scalar headingDeviation(const Segment<Scalar>& lM, const Segment<Scalar>& lS)
{
    return std::abs(normAngle(lM.heading() - lS.heading()));
}

template <typename Scalar>
Scalar separationDistance(const Segment<Scalar>& lM, const Segment<Scalar>& lS)
{
    const LineForm<Scalar> line = toGeneralForm(lM);
    return std::max(pointToLineDistance(lS.start(), line), pointToLineDistance(lS.end(), line));
}

template <typename Scalar>
Overlap<Scalar> overlapLength(const Segment<Scalar>& lM, const Segment<Scalar>& lS)
{
    // Work in fractions of lM so that lM's own endpoints land on exactly 0
    // and 1 and a segment overlaps itself by exactly its length.
    const Point2<Scalar> v = lM.vector();
    const Scalar vv = v.squaredNorm();
    const Scalar t1 = v.dot(lS.start() - lM.start()) / vv;
    const Scalar t2 = v.dot(lS.end() - lM.start()) / vv;
    const Scalar lo = std::max(Scalar(0), std::min(t1, t2));
    const Scalar hi = std::min(Scalar(1), std::max(t1, t2));

    Overlap<Scalar> result{(hi - lo) * lM.length(), std::nullopt};
    if (hi > lo)
        result.endpoints = std::make_pair(Point2<Scalar>(lM.start() + v * lo),
                                          Point2<Scalar>(lM.start() + v * hi));
    return result;
}

template <typename Scalar>
FusionMeasurements<Scalar> measure(const Segment<Scalar>& lM, const Segment<Scalar>& lS)
{
    return {headingDeviation(lM, lS), separationDistance(lM, lS), overlapLength(lM, lS).length};
}

/// Evaluated in order heading -> distance -> overlap, stopping at the first
/// failing gate.
template <typename Scalar>
bool satisfiesFusionConditions(const Segment<Scalar>& lM, const Segment<Scalar>& lS,
                               const FusionThresholds<Scalar>& t,
                               FusionCounters* counters = nullptr)
{
    if (counters)
        ++counters->headingChecks;
    if (headingDeviation(lM, lS) > t.thetaMax)
        return false;

    if (counters)
        ++counters->distanceChecks;
    if (separationDistance(lM, lS) > t.dMax)
        return false;

    if (counters)
        ++counters->overlapChecks;
    return overlapLength(lM, lS).length >= t.pMin;
}

namespace detail {

template <typename Scalar>
bool lexicographicallyLess(const Segment<Scalar>& a, const Segment<Scalar>& b)
{
    const auto key = [](const Segment<Scalar>& s) {
        return std::tuple(s.start().x(), s.start().y(), s.end().x(), s.end().y());
    };
    return key(a) < key(b);
}

} // namespace detail

/// Weighted fusion of an associated set. The center is the weight-weighted
/// mean of the input centers; the heading is the weighted mean taken relative
/// to the heaviest input so it stays well defined across the +-pi wrap; the
/// endpoints are the extreme projections of all input endpoints onto the
/// fused line. The result carries the summed weight and no index.
template <typename Scalar>
Segment<Scalar> mergeSegments(std::span<const Segment<Scalar>> segments)
{
    if (segments.empty())
        throw std::invalid_argument("mergeSegments: empty input");
    if (segments.size() == 1)
        return segments.front();

    const Segment<Scalar>* reference = &segments.front();
    for (const auto& s : segments) {
        if (s.weight() > reference->weight() ||
            (s.weight() == reference->weight() && detail::lexicographicallyLess(s, *reference)))
            reference = &s;
    }
    const Scalar refHeading = reference->heading();

    Scalar totalWeight = 0;
    long long weightSum = 0;
    Point2<Scalar> center = Point2<Scalar>::Zero();
    Scalar headingOffset = 0;
    for (const auto& s : segments) {
        const Scalar w = static_cast<Scalar>(s.weight());
        const Scalar dev = normAngle(s.heading() - refHeading);
        assert(std::abs(dev) < std::numbers::pi_v<Scalar> / 2);
        totalWeight += w;
        weightSum += s.weight();
        center += w * s.center();
        headingOffset += w * dev;
    }
    center /= totalWeight;
    // Rotate the reference direction by the mean offset instead of rebuilding
    // it from the angle, so exact copies keep an exact direction.
    const Scalar offset = headingOffset / totalWeight;
    const Point2<Scalar> r = reference->direction();
    const Scalar c = std::cos(offset);
    const Scalar sn = std::sin(offset);
    const Point2<Scalar> u(c * r.x() - sn * r.y(), sn * r.x() + c * r.y());

    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = -std::numeric_limits<Scalar>::infinity();
    for (const auto& s : segments) {
        for (const auto* p : {&s.start(), &s.end()}) {
            const Scalar t = u.dot(*p - center);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }

    if (weightSum > std::numeric_limits<int>::max())
        throw std::overflow_error("mergeSegments: weight overflow");
    return Segment<Scalar>(center + lo * u, center + hi * u, static_cast<int>(weightSum));
}

template <typename Scalar>
Segment<Scalar> mergeSegments(std::initializer_list<Segment<Scalar>> segments)
{
    return mergeSegments(std::span<const Segment<Scalar>>(segments.begin(), segments.size()));
}

template <typename Scalar>
Segment<Scalar> mergeSegments(const std::vector<Segment<Scalar>>& segments)
{
    return mergeSegments(std::span<const Segment<Scalar>>(segments));
}

} // namespace linemap

#endif // LINEMAP_FUSION_HPP

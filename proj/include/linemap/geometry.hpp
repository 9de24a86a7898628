// 2D primitives shared by every stage of the line-map pipeline: angles,
// poses, directed segments and their general line form.

#ifndef LINEMAP_GEOMETRY_HPP
#define LINEMAP_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>

namespace linemap {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;

using Point = Point2<double>;

/// Wraps an angle into the half-open interval (-pi, pi].
template <typename Scalar>
Scalar normAngle(Scalar angle)
{
    if (!std::isfinite(angle))
        throw std::invalid_argument("normAngle: non-finite angle");

    constexpr Scalar kPi = std::numbers::pi_v<Scalar>;
    constexpr Scalar kTwoPi = 2 * kPi;

    Scalar wrapped = std::remainder(angle, kTwoPi);
    if (wrapped <= -kPi)
        wrapped += kTwoPi;
    return wrapped;
}

template <typename Scalar>
Scalar degToRad(Scalar deg) { return deg * std::numbers::pi_v<Scalar> / 180; }

template <typename Scalar>
Scalar radToDeg(Scalar rad) { return rad * 180 / std::numbers::pi_v<Scalar>; }

template <typename Scalar>
struct Pose2 {
    Scalar x = 0;
    Scalar y = 0;
    Scalar theta = 0;

    Pose2() = default;
    Pose2(Scalar x_, Scalar y_, Scalar theta_)
        : x(x_), y(y_), theta(normAngle(theta_)) {}

    Eigen::Matrix<Scalar, 2, 2> rotation() const
    {
        const Scalar c = std::cos(theta);
        const Scalar s = std::sin(theta);
        Eigen::Matrix<Scalar, 2, 2> r;
        r << c, -s, s, c;
        return r;
    }

    Point2<Scalar> translation() const { return {x, y}; }

    /// Maps a point from this pose's local frame into the parent frame.
    Point2<Scalar> apply(const Point2<Scalar>& local) const
    {
        return rotation() * local + translation();
    }

    friend bool operator==(const Pose2&, const Pose2&) = default;
};

using Pose2D = Pose2<double>;

/// Directed segment from start to end. The heading is the direction of
/// end - start. Zero-length segments are rejected at construction.
template <typename Scalar>
class Segment {
public:
    using PointType = Point2<Scalar>;

    Segment(const PointType& start, const PointType& end, int weight = 1,
            std::optional<std::size_t> index = std::nullopt)
        : start_(start), end_(end), weight_(weight), index_(index)
    {
        if (!start.allFinite() || !end.allFinite())
            throw std::invalid_argument("Segment: non-finite endpoint");
        if (start == end)
            throw std::invalid_argument("Segment: degenerate (zero-length) segment");
        if (weight < 1)
            throw std::invalid_argument("Segment: weight must be >= 1");
    }

    const PointType& start() const { return start_; }
    const PointType& end() const { return end_; }
    int weight() const { return weight_; }
    std::optional<std::size_t> index() const { return index_; }

    void setWeight(int weight)
    {
        if (weight < 1)
            throw std::invalid_argument("Segment: weight must be >= 1");
        weight_ = weight;
    }
    void setIndex(std::optional<std::size_t> index) { index_ = index; }

    PointType vector() const { return end_ - start_; }
    PointType direction() const { return vector().normalized(); }
    PointType center() const { return (start_ + end_) / Scalar(2); }
    Scalar length() const { return vector().norm(); }

    Scalar heading() const
    {
        const PointType v = vector();
        return normAngle(std::atan2(v.y(), v.x()));
    }

    Segment reversed() const { return Segment(end_, start_, weight_, index_); }

    friend bool operator==(const Segment&, const Segment&) = default;

private:
    PointType start_;
    PointType end_;
    int weight_;
    std::optional<std::size_t> index_;
};

using LineSegment = Segment<double>;

/// Normalized general form a*x + b*y + c = 0 with a^2 + b^2 = 1.
template <typename Scalar>
struct LineForm {
    Scalar a = 0;
    Scalar b = 1;
    Scalar c = 0;

    Scalar signedDistance(const Point2<Scalar>& p) const { return a * p.x() + b * p.y() + c; }
};

using GeneralLineForm = LineForm<double>;

template <typename Scalar>
Scalar heading(const Segment<Scalar>& s) { return s.heading(); }

template <typename Scalar>
Segment<Scalar> reverse(const Segment<Scalar>& s) { return s.reversed(); }

/// Line through both endpoints, normal pointing to the left of the heading.
template <typename Scalar>
LineForm<Scalar> toGeneralForm(const Segment<Scalar>& s)
{
    const Point2<Scalar> d = s.direction();
    LineForm<Scalar> line;
    line.a = -d.y();
    line.b = d.x();
    line.c = -(line.a * s.start().x() + line.b * s.start().y());
    return line;
}

template <typename Scalar>
Scalar pointToLineDistance(const Point2<Scalar>& p, const LineForm<Scalar>& line)
{
    return std::abs(line.signedDistance(p));
}

/// Orthogonal projection of p onto the infinite line through s.
template <typename Scalar>
Point2<Scalar> projectOnto(const Point2<Scalar>& p, const Segment<Scalar>& s)
{
    const Point2<Scalar> d = s.direction();
    return s.start() + d * d.dot(p - s.start());
}

/// Signed abscissa of p's projection along s, measured from s.start().
template <typename Scalar>
Scalar abscissaAlong(const Point2<Scalar>& p, const Segment<Scalar>& s)
{
    return s.direction().dot(p - s.start());
}

template <typename Scalar>
Segment<Scalar> transformToGlobal(const Segment<Scalar>& local, const Pose2<Scalar>& pose)
{
    return Segment<Scalar>(pose.apply(local.start()), pose.apply(local.end()),
                           local.weight(), local.index());
}

} // namespace linemap

#endif // LINEMAP_GEOMETRY_HPP

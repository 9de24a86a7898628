// Laser logs, trajectories, segment map files and SVG rendering.

#ifndef LINEMAP_SCAN_IO_HPP
#define LINEMAP_SCAN_IO_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linemap/geometry.hpp"
#include "linemap/map.hpp"

namespace linemap {

/// Ranges at or beyond this value are treated as no-return.
inline constexpr double kDefaultMaxRange = 80.0;

struct LaserScan {
    std::size_t scanIndex = 0;
    std::vector<double> ranges;
    double angleMin = 0.0;
    double angleIncrement = 0.0;
    double maxRange = kDefaultMaxRange;
    std::optional<Pose2D> odometry;
    std::optional<Pose2D> laserPose;
    double timestamp = 0.0;

    double angle(std::size_t beam) const { return angleMin + angleIncrement * static_cast<double>(beam); }

    bool isValid(std::size_t beam) const
    {
        const double r = ranges[beam];
        return std::isfinite(r) && r > 0.0 && r < maxRange;
    }

    Point localPoint(std::size_t beam) const
    {
        const double a = angle(beam);
        return {ranges[beam] * std::cos(a), ranges[beam] * std::sin(a)};
    }

    /// Valid returns in the sensor frame, in beam order.
    std::vector<Point> localPoints() const;
};

/// Poses keyed by strictly increasing scan index.
class Trajectory {
public:
    using Entry = std::pair<std::size_t, Pose2D>;

    void append(std::size_t scanIndex, const Pose2D& pose);

    const Pose2D* find(std::size_t scanIndex) const;
    /// Throws DataError naming the index when it is absent.
    const Pose2D& at(std::size_t scanIndex) const;
    bool contains(std::size_t scanIndex) const { return find(scanIndex) != nullptr; }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    const std::vector<Entry>& entries() const { return entries_; }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

private:
    std::vector<Entry> entries_;
};

/// CARMEN FLASER records:
///   FLASER n r_1 ... r_n x y theta odom_x odom_y odom_theta ts host log_ts
/// Scans are numbered by their position among FLASER records. The 180 degree
/// front-laser convention gives angleMin = -pi/2, increment = pi/(n-1).
std::vector<LaserScan> parseCarmenLog(std::istream& in, double maxRange = kDefaultMaxRange);
std::vector<LaserScan> readCarmenLog(const std::string& path, double maxRange = kDefaultMaxRange);
void writeCarmenLog(std::ostream& out, std::span<const LaserScan> scans);

/// Records "scanIndex x y theta", '#' starts a comment.
Trajectory parseTrajectory(std::istream& in);
Trajectory readTrajectory(const std::string& path);
void writeTrajectory(std::ostream& out, const Trajectory& trajectory);

struct SegmentMapFile {
    GlobalMap map;
    std::vector<std::pair<std::string, std::string>> metadata;

    friend bool operator==(const SegmentMapFile& a, const SegmentMapFile& b)
    {
        return a.map.segments == b.map.segments && a.map.lastIndex == b.map.lastIndex &&
               a.metadata == b.metadata;
    }
};

/// "linemap v1" header, "# key=value" metadata, then one
/// "index x1 y1 x2 y2 weight" record per segment with 6-decimal coordinates.
void writeSegmentMap(std::ostream& out, const SegmentMapFile& file);
void writeSegmentMap(const std::string& path, const SegmentMapFile& file);
SegmentMapFile readSegmentMap(std::istream& in);
SegmentMapFile readSegmentMap(const std::string& path);

/// "linecorr v1" header then "mapIndex poseIndex id x1 y1 x2 y2" per original,
/// local-frame coordinates at full precision.
void writeCorrespondences(std::ostream& out, const CorrespondenceStore& store);
CorrespondenceStore readCorrespondences(std::istream& in);

/// Scan returns transformed into the world frame with the trajectory poses.
std::vector<Point> registerScans(std::span<const LaserScan> scans, const Trajectory& trajectory);

struct KeyframeParams {
    double minTranslation = 0.2;          // meters
    double minRotation = degToRad(10.0);  // radians
};

/// Positions (into scans) of the scans to process: the first scan, then every
/// scan whose pose moved more than minTranslation or rotated more than
/// minRotation since the last selected one.
std::vector<std::size_t> selectKeyframes(std::span<const LaserScan> scans,
                                         const Trajectory& trajectory,
                                         const KeyframeParams& params);

struct SvgOptions {
    double pixelsPerMeter = 20.0;
    double margin = 1.0;  // meters around the content
    double strokeWidth = 1.5;
    double endpointRadius = 2.0;
    double scanPointRadius = 0.8;
};

/// Segments as blue lines with red start and green end markers, optional
/// scan points drawn underneath. World +y is screen-up.
void exportSvg(std::ostream& out, const GlobalMap& map, std::span<const Point> scanPoints = {},
               const SvgOptions& options = {});

} // namespace linemap

#endif // LINEMAP_SCAN_IO_HPP

// Ray-cast scan generator for desk-scale ground truth: a world of wall
// segments, a waypoint path, Gaussian range noise and an odometry drift model.

#ifndef LINEMAP_SYNTH_HPP
#define LINEMAP_SYNTH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "linemap/geometry.hpp"
#include "linemap/scan_io.hpp"

namespace linemap {

struct World {
    std::vector<LineSegment> walls;
    std::vector<Point> waypoints;
};

/// Lines "wall x1 y1 x2 y2" and "waypoint x y"; '#' starts a comment.
/// At least one wall and two waypoints are required.
World parseWorld(std::istream& in);
World readWorld(const std::string& path);
void writeWorld(std::ostream& out, const World& world);

/// "square-room" or "loop-corridor"; nullopt for other names.
std::optional<World> worldPreset(const std::string& name);

struct SynthParams {
    int beams = 181;                      // spread over a 180 degree field of view
    double sensorRange = 8.0;             // farther hits are reported as no-return
    double rangeNoise = 0.01;             // meters, Gaussian sigma
    double step = 0.3;                    // meters between scans along a leg
    double turnStep = degToRad(10.0);     // radians per in-place rotation scan
    double driftPerMeter = 0.001;         // translational sigma per meter travelled
    double headingDriftPerMeter = 0.0002; // radians sigma per meter travelled
    double headingDriftPerRadian = 0.001; // radians sigma per radian turned
    std::uint64_t seed = 1;
};

struct SynthResult {
    std::vector<LaserScan> scans;
    Trajectory truth;
    Trajectory odometry;  // drifted dead reckoning, same scan indices
};

/// Poses follow the waypoints with the heading along each leg, rotating in
/// place at every waypoint. Each scan stores the true pose as its laser pose
/// and the drifted one as its odometry. Deterministic for a given seed.
SynthResult synthesize(const World& world, const SynthParams& params);

/// Distance along a ray to the nearest wall, nullopt when nothing is hit.
std::optional<double> castRay(const World& world, const Point& origin, double angle);

} // namespace linemap

#endif // LINEMAP_SYNTH_HPP

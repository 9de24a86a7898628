#include "linemap/synth.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "linemap/errors.hpp"

namespace linemap {

namespace {

void addRectangle(World& world, double x0, double y0, double x1, double y1)
{
    world.walls.emplace_back(Point(x0, y0), Point(x1, y0));
    world.walls.emplace_back(Point(x1, y0), Point(x1, y1));
    world.walls.emplace_back(Point(x1, y1), Point(x0, y1));
    world.walls.emplace_back(Point(x0, y1), Point(x0, y0));
}

std::vector<Pose2D> pathPoses(const World& world, const SynthParams& params)
{
    const auto& wp = world.waypoints;
    std::vector<Pose2D> poses;
    double heading = std::atan2(wp[1].y() - wp[0].y(), wp[1].x() - wp[0].x());
    poses.emplace_back(wp[0].x(), wp[0].y(), heading);

    for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
        const Point leg = wp[k + 1] - wp[k];
        const double length = leg.norm();
        if (length == 0.0)
            continue;
        const double target = std::atan2(leg.y(), leg.x());
        const double turn = normAngle(target - heading);
        const int turns = static_cast<int>(std::ceil(std::abs(turn) / params.turnStep - 1e-9));
        for (int j = 1; j <= turns; ++j)
            poses.emplace_back(wp[k].x(), wp[k].y(), heading + turn * j / turns);
        heading = target;

        const int steps = std::max(1, static_cast<int>(std::ceil(length / params.step - 1e-9)));
        for (int j = 1; j <= steps; ++j) {
            const Point p = wp[k] + leg * (static_cast<double>(j) / steps);
            poses.emplace_back(p.x(), p.y(), heading);
        }
    }
    return poses;
}

double sample(std::mt19937_64& rng, double sigma)
{
    if (sigma <= 0.0)
        return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(rng);
}

} // namespace

World parseWorld(std::istream& in)
{
    World world;
    std::string raw;
    std::size_t lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        std::istringstream line(raw.substr(0, raw.find('#')));
        std::string kind;
        if (!(line >> kind))
            continue;
        if (kind == "wall") {
            double x1, y1, x2, y2;
            if (!(line >> x1 >> y1 >> x2 >> y2))
                throw DataError("world: wall needs four numbers", lineNo);
            try {
                world.walls.emplace_back(Point(x1, y1), Point(x2, y2));
            } catch (const std::invalid_argument& e) {
                throw DataError(std::string("world: ") + e.what(), lineNo);
            }
        } else if (kind == "waypoint") {
            double x, y;
            if (!(line >> x >> y) || !std::isfinite(x) || !std::isfinite(y))
                throw DataError("world: waypoint needs two numbers", lineNo);
            world.waypoints.emplace_back(x, y);
        } else {
            throw DataError("world: unknown record '" + kind + "'", lineNo);
        }
        std::string extra;
        if (line >> extra)
            throw DataError("world: trailing token '" + extra + "'", lineNo);
    }
    if (world.walls.empty())
        throw DataError("world: no walls");
    if (world.waypoints.size() < 2)
        throw DataError("world: at least two waypoints are required");
    return world;
}

World readWorld(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open world file '" + path + "'");
    return parseWorld(in);
}

void writeWorld(std::ostream& out, const World& world)
{
    out << std::setprecision(17);
    for (const auto& w : world.walls)
        out << "wall " << w.start().x() << ' ' << w.start().y() << ' ' << w.end().x() << ' '
            << w.end().y() << '\n';
    for (const auto& p : world.waypoints)
        out << "waypoint " << p.x() << ' ' << p.y() << '\n';
}

std::optional<World> worldPreset(const std::string& name)
{
    World world;
    if (name == "square-room") {
        addRectangle(world, 0.0, 0.0, 6.0, 6.0);
        world.waypoints = {{1.0, 1.0}, {5.0, 1.0}, {5.0, 5.0}, {1.0, 5.0}};
        return world;
    }
    if (name == "loop-corridor") {
        // A 2 m wide ring corridor; the path closes the loop and then runs on
        // past its start so the revisited walls are seen again.
        addRectangle(world, 0.0, 0.0, 24.0, 14.0);
        addRectangle(world, 2.0, 2.0, 22.0, 12.0);
        world.waypoints = {{8.0, 1.0}, {23.0, 1.0}, {23.0, 13.0}, {1.0, 13.0}, {1.0, 1.0}, {16.0, 1.0}};
        return world;
    }
    return std::nullopt;
}

std::optional<double> castRay(const World& world, const Point& origin, double angle)
{
    const Point dir(std::cos(angle), std::sin(angle));
    std::optional<double> best;
    for (const auto& wall : world.walls) {
        const Point e = wall.vector();
        const double denom = dir.x() * e.y() - dir.y() * e.x();
        if (std::abs(denom) < 1e-12)
            continue;
        const Point w = wall.start() - origin;
        const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
        const double u = (w.x() * dir.y() - w.y() * dir.x()) / denom;
        if (t > 1e-9 && u >= 0.0 && u <= 1.0 && (!best || t < *best))
            best = t;
    }
    return best;
}

SynthResult synthesize(const World& world, const SynthParams& params)
{
    if (world.walls.empty() || world.waypoints.size() < 2)
        throw std::invalid_argument("synthesize: world needs walls and two waypoints");
    if (params.beams < 2 || !(params.sensorRange > 0.0) || !(params.step > 0.0) ||
        !(params.turnStep > 0.0) || params.rangeNoise < 0.0 || params.driftPerMeter < 0.0 ||
        params.headingDriftPerMeter < 0.0 || params.headingDriftPerRadian < 0.0)
        throw std::invalid_argument("synthesize: invalid parameters");

    std::mt19937_64 rng(params.seed);
    const std::vector<Pose2D> poses = pathPoses(world, params);
    const double angleMin = -std::numbers::pi / 2.0;
    const double increment = std::numbers::pi / (params.beams - 1);

    SynthResult result;
    Pose2D odom = poses.front();
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const Pose2D& pose = poses[i];
        if (i > 0) {
            // Relative motion in the previous body frame, corrupted.
            const Pose2D& prev = poses[i - 1];
            const Point delta = prev.rotation().transpose() * (pose.translation() - prev.translation());
            const double dTheta = normAngle(pose.theta - prev.theta);
            const double dist = delta.norm();
            const double transSigma = params.driftPerMeter * std::sqrt(dist);
            const double rotSigma = params.headingDriftPerMeter * std::sqrt(dist) +
                                    params.headingDriftPerRadian * std::sqrt(std::abs(dTheta));
            const Point noisy(delta.x() + sample(rng, transSigma), delta.y() + sample(rng, transSigma));
            const double noisyTheta = dTheta + sample(rng, rotSigma);
            const Point t = odom.apply(noisy);
            odom = Pose2D(t.x(), t.y(), odom.theta + noisyTheta);
        }

        LaserScan scan;
        scan.scanIndex = i;
        scan.angleMin = angleMin;
        scan.angleIncrement = increment;
        scan.maxRange = kDefaultMaxRange;
        scan.laserPose = pose;
        scan.odometry = odom;
        scan.timestamp = 0.1 * static_cast<double>(i);
        scan.ranges.resize(static_cast<std::size_t>(params.beams));
        for (std::size_t b = 0; b < scan.ranges.size(); ++b) {
            const auto hit = castRay(world, pose.translation(), pose.theta + scan.angle(b));
            double r = kDefaultMaxRange;
            if (hit && *hit <= params.sensorRange)
                r = std::max(1e-3, *hit + sample(rng, params.rangeNoise));
            scan.ranges[b] = r;
        }
        result.scans.push_back(std::move(scan));
        result.truth.append(i, pose);
        result.odometry.append(i, odom);
    }
    return result;
}

} // namespace linemap

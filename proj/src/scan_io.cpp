#include "linemap/scan_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string_view>

#include "linemap/errors.hpp"

namespace linemap {

namespace {

std::vector<std::string_view> tokenize(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
            ++pos;
        const std::size_t begin = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])))
            ++pos;
        if (pos > begin)
            tokens.push_back(line.substr(begin, pos - begin));
    }
    return tokens;
}

double toDouble(std::string_view token, std::size_t lineNo, const char* field)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw DataError(std::string("non-numeric ") + field + " '" + std::string(token) + "'", lineNo);
    return value;
}

std::size_t toIndex(std::string_view token, std::size_t lineNo, const char* field)
{
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw DataError(std::string("invalid ") + field + " '" + std::string(token) + "'", lineNo);
    return value;
}

std::string_view stripComment(std::string_view line)
{
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
    return line;
}

std::ifstream openInput(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    return in;
}

} // namespace

std::vector<Point> LaserScan::localPoints() const
{
    std::vector<Point> points;
    points.reserve(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i)
        if (isValid(i))
            points.push_back(localPoint(i));
    return points;
}

void Trajectory::append(std::size_t scanIndex, const Pose2D& pose)
{
    if (!entries_.empty() && scanIndex <= entries_.back().first)
        throw DataError("trajectory scan index " + std::to_string(scanIndex) +
                        " is not greater than " + std::to_string(entries_.back().first));
    entries_.emplace_back(scanIndex, Pose2D(pose.x, pose.y, pose.theta));
}

const Pose2D* Trajectory::find(std::size_t scanIndex) const
{
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), scanIndex,
                                     [](const Entry& e, std::size_t idx) { return e.first < idx; });
    if (it == entries_.end() || it->first != scanIndex)
        return nullptr;
    return &it->second;
}

const Pose2D& Trajectory::at(std::size_t scanIndex) const
{
    if (const Pose2D* pose = find(scanIndex))
        return *pose;
    throw DataError("no pose for scan index " + std::to_string(scanIndex));
}

std::vector<LaserScan> parseCarmenLog(std::istream& in, double maxRange)
{
    std::vector<LaserScan> scans;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto tokens = tokenize(line);
        if (tokens.empty() || tokens.front() != "FLASER")
            continue;
        if (tokens.size() < 2)
            throw DataError("FLASER record without beam count", lineNo);

        const std::size_t n = toIndex(tokens[1], lineNo, "beam count");
        if (n < 2)
            throw DataError("FLASER record needs at least 2 beams", lineNo);
        if (tokens.size() != n + 11)
            throw DataError("FLASER record has " + std::to_string(tokens.size()) +
                                " tokens, expected " + std::to_string(n + 11),
                            lineNo);

        LaserScan scan;
        scan.scanIndex = scans.size();
        scan.maxRange = maxRange;
        scan.angleMin = -std::numbers::pi / 2;
        scan.angleIncrement = std::numbers::pi / static_cast<double>(n - 1);
        scan.ranges.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            scan.ranges.push_back(toDouble(tokens[2 + i], lineNo, "range"));

        std::size_t k = 2 + n;
        const double lx = toDouble(tokens[k], lineNo, "laser x");
        const double ly = toDouble(tokens[k + 1], lineNo, "laser y");
        const double lt = toDouble(tokens[k + 2], lineNo, "laser theta");
        const double ox = toDouble(tokens[k + 3], lineNo, "odom x");
        const double oy = toDouble(tokens[k + 4], lineNo, "odom y");
        const double ot = toDouble(tokens[k + 5], lineNo, "odom theta");
        scan.laserPose = Pose2D(lx, ly, lt);
        scan.odometry = Pose2D(ox, oy, ot);
        scan.timestamp = toDouble(tokens[k + 6], lineNo, "timestamp");
        scans.push_back(std::move(scan));
    }
    return scans;
}

std::vector<LaserScan> readCarmenLog(const std::string& path, double maxRange)
{
    auto in = openInput(path);
    return parseCarmenLog(in, maxRange);
}

void writeCarmenLog(std::ostream& out, std::span<const LaserScan> scans)
{
    out << "# CARMEN log written by linemap\n";
    out << std::fixed;
    for (const auto& scan : scans) {
        const Pose2D laser = scan.laserPose.value_or(scan.odometry.value_or(Pose2D{}));
        const Pose2D odom = scan.odometry.value_or(laser);
        out << "FLASER " << scan.ranges.size();
        out << std::setprecision(4);
        for (double r : scan.ranges)
            out << ' ' << r;
        out << std::setprecision(6);
        out << ' ' << laser.x << ' ' << laser.y << ' ' << laser.theta << ' ' << odom.x << ' '
            << odom.y << ' ' << odom.theta << ' ' << scan.timestamp << " linemap "
            << scan.timestamp << '\n';
    }
}

Trajectory parseTrajectory(std::istream& in)
{
    Trajectory trajectory;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto tokens = tokenize(stripComment(line));
        if (tokens.empty())
            continue;
        if (tokens.size() != 4)
            throw DataError("trajectory record needs 'scanIndex x y theta'", lineNo);
        const std::size_t index = toIndex(tokens[0], lineNo, "scan index");
        const double x = toDouble(tokens[1], lineNo, "x");
        const double y = toDouble(tokens[2], lineNo, "y");
        const double theta = toDouble(tokens[3], lineNo, "theta");
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(theta))
            throw DataError("non-finite pose", lineNo);
        if (!trajectory.empty() && index <= trajectory.entries().back().first)
            throw DataError("scan index " + std::to_string(index) + " is duplicate or decreasing",
                            lineNo);
        trajectory.append(index, Pose2D(x, y, theta));
    }
    return trajectory;
}

Trajectory readTrajectory(const std::string& path)
{
    auto in = openInput(path);
    return parseTrajectory(in);
}

void writeTrajectory(std::ostream& out, const Trajectory& trajectory)
{
    out << "# scanIndex x y theta\n";
    out << std::setprecision(17);
    for (const auto& [index, pose] : trajectory)
        out << index << ' ' << pose.x << ' ' << pose.y << ' ' << pose.theta << '\n';
}

void writeSegmentMap(std::ostream& out, const SegmentMapFile& file)
{
    out << "linemap v1\n";
    for (const auto& [key, value] : file.metadata)
        out << "# " << key << '=' << value << '\n';
    out << "# last_index=" << file.map.lastIndex << '\n';
    out << std::fixed << std::setprecision(6);
    for (const auto& [index, s] : file.map.segments) {
        out << index << ' ' << s.start().x() << ' ' << s.start().y() << ' ' << s.end().x() << ' '
            << s.end().y() << ' ' << s.weight() << '\n';
    }
}

void writeSegmentMap(const std::string& path, const SegmentMapFile& file)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    writeSegmentMap(out, file);
    if (!out)
        throw DataError("write failed for '" + path + "'");
}

SegmentMapFile readSegmentMap(std::istream& in)
{
    SegmentMapFile file;
    std::string line;
    std::size_t lineNo = 0;
    bool sawHeader = false;
    std::optional<std::size_t> lastIndex;

    while (std::getline(in, line)) {
        ++lineNo;
        std::string_view view(line);
        if (!sawHeader) {
            const auto tokens = tokenize(view);
            if (tokens.empty())
                continue;
            if (tokens.size() != 2 || tokens[0] != "linemap")
                throw DataError("missing 'linemap v1' header", lineNo);
            if (tokens[1] != "v1")
                throw DataError("unsupported map version '" + std::string(tokens[1]) + "'", lineNo);
            sawHeader = true;
            continue;
        }

        const auto first = view.find_first_not_of(" \t\r");
        if (first == std::string_view::npos)
            continue;
        if (view[first] == '#') {
            std::string_view body = view.substr(first + 1);
            while (!body.empty() && body.front() == ' ')
                body.remove_prefix(1);
            while (!body.empty() && (body.back() == '\r' || body.back() == ' '))
                body.remove_suffix(1);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos)
                continue;
            const std::string key(body.substr(0, eq));
            const std::string value(body.substr(eq + 1));
            if (key == "last_index")
                lastIndex = toIndex(value, lineNo, "last_index");
            else
                file.metadata.emplace_back(key, value);
            continue;
        }

        const auto tokens = tokenize(view);
        if (tokens.size() != 6)
            throw DataError("map record needs 'index x1 y1 x2 y2 weight'", lineNo);
        const std::size_t index = toIndex(tokens[0], lineNo, "index");
        const Point start(toDouble(tokens[1], lineNo, "x1"), toDouble(tokens[2], lineNo, "y1"));
        const Point end(toDouble(tokens[3], lineNo, "x2"), toDouble(tokens[4], lineNo, "y2"));
        const std::size_t weight = toIndex(tokens[5], lineNo, "weight");
        if (weight < 1 || weight > static_cast<std::size_t>(std::numeric_limits<int>::max()))
            throw DataError("weight must be >= 1", lineNo);
        if (file.map.segments.contains(index))
            throw DataError("duplicate map index " + std::to_string(index), lineNo);
        try {
            file.map.segments.emplace(index,
                                      LineSegment(start, end, static_cast<int>(weight), index));
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), lineNo);
        }
    }
    if (!sawHeader)
        throw DataError("empty map file: missing 'linemap v1' header");

    const std::size_t minLast = file.map.segments.empty() ? 0 : file.map.segments.rbegin()->first + 1;
    file.map.lastIndex = std::max(lastIndex.value_or(minLast), minLast);
    return file;
}

SegmentMapFile readSegmentMap(const std::string& path)
{
    auto in = openInput(path);
    return readSegmentMap(in);
}

void writeCorrespondences(std::ostream& out, const CorrespondenceStore& store)
{
    out << "linecorr v1\n";
    out << std::setprecision(17);
    for (const auto& [index, subset] : store.subsets) {
        for (const auto& o : subset) {
            out << index << ' ' << o.poseIndex << ' ' << o.id << ' ' << o.segment.start().x() << ' '
                << o.segment.start().y() << ' ' << o.segment.end().x() << ' '
                << o.segment.end().y() << '\n';
        }
    }
}

CorrespondenceStore readCorrespondences(std::istream& in)
{
    CorrespondenceStore store;
    std::string line;
    std::size_t lineNo = 0;
    bool sawHeader = false;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto tokens = tokenize(stripComment(line));
        if (tokens.empty())
            continue;
        if (!sawHeader) {
            if (tokens.size() != 2 || tokens[0] != "linecorr" || tokens[1] != "v1")
                throw DataError("missing 'linecorr v1' header", lineNo);
            sawHeader = true;
            continue;
        }
        if (tokens.size() != 7)
            throw DataError("correspondence record needs 'mapIndex poseIndex id x1 y1 x2 y2'",
                            lineNo);
        const std::size_t index = toIndex(tokens[0], lineNo, "map index");
        const std::size_t poseIndex = toIndex(tokens[1], lineNo, "pose index");
        const std::size_t id = toIndex(tokens[2], lineNo, "id");
        const Point start(toDouble(tokens[3], lineNo, "x1"), toDouble(tokens[4], lineNo, "y1"));
        const Point end(toDouble(tokens[5], lineNo, "x2"), toDouble(tokens[6], lineNo, "y2"));
        try {
            store.subsets[index].push_back({LineSegment(start, end), poseIndex, id});
        } catch (const std::invalid_argument& e) {
            throw DataError(e.what(), lineNo);
        }
    }
    if (!sawHeader)
        throw DataError("empty correspondence file: missing 'linecorr v1' header");
    return store;
}

std::vector<Point> registerScans(std::span<const LaserScan> scans, const Trajectory& trajectory)
{
    std::vector<Point> points;
    for (const auto& scan : scans) {
        const Pose2D& pose = trajectory.at(scan.scanIndex);
        for (std::size_t i = 0; i < scan.ranges.size(); ++i)
            if (scan.isValid(i))
                points.push_back(pose.apply(scan.localPoint(i)));
    }
    return points;
}

std::vector<std::size_t> selectKeyframes(std::span<const LaserScan> scans,
                                         const Trajectory& trajectory,
                                         const KeyframeParams& params)
{
    std::vector<std::size_t> selected;
    const Pose2D* last = nullptr;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        const Pose2D& pose = trajectory.at(scans[i].scanIndex);
        if (last) {
            const double moved = std::hypot(pose.x - last->x, pose.y - last->y);
            const double turned = std::abs(normAngle(pose.theta - last->theta));
            if (!(moved > params.minTranslation || turned > params.minRotation))
                continue;
        }
        selected.push_back(i);
        last = &pose;
    }
    return selected;
}

void exportSvg(std::ostream& out, const GlobalMap& map, std::span<const Point> scanPoints,
               const SvgOptions& options)
{
    double minX = std::numeric_limits<double>::infinity();
    double minY = minX;
    double maxX = -minX;
    double maxY = -minX;
    const auto extend = [&](const Point& p) {
        minX = std::min(minX, p.x());
        minY = std::min(minY, p.y());
        maxX = std::max(maxX, p.x());
        maxY = std::max(maxY, p.y());
    };
    for (const auto& [index, s] : map.segments) {
        extend(s.start());
        extend(s.end());
    }
    for (const auto& p : scanPoints)
        extend(p);
    if (minX > maxX) {
        minX = minY = 0.0;
        maxX = maxY = 0.0;
    }
    minX -= options.margin;
    minY -= options.margin;
    maxX += options.margin;
    maxY += options.margin;

    const double ppm = options.pixelsPerMeter;
    const double width = (maxX - minX) * ppm;
    const double height = (maxY - minY) * ppm;
    const auto sx = [&](const Point& p) { return (p.x() - minX) * ppm; };
    const auto sy = [&](const Point& p) { return (maxY - p.y()) * ppm; };

    out << std::fixed << std::setprecision(2);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    if (!scanPoints.empty()) {
        out << "<g id=\"scan\" fill=\"#2ca02c\" fill-opacity=\"0.6\">\n";
        for (const auto& p : scanPoints)
            out << "<circle cx=\"" << sx(p) << "\" cy=\"" << sy(p) << "\" r=\""
                << options.scanPointRadius << "\"/>\n";
        out << "</g>\n";
    }

    out << "<g id=\"segments\" stroke=\"#1f3fbf\" stroke-width=\"" << options.strokeWidth << "\">\n";
    for (const auto& [index, s] : map.segments)
        out << "<line data-index=\"" << index << "\" x1=\"" << sx(s.start()) << "\" y1=\""
            << sy(s.start()) << "\" x2=\"" << sx(s.end()) << "\" y2=\"" << sy(s.end()) << "\"/>\n";
    out << "</g>\n";

    out << "<g id=\"endpoints\">\n";
    for (const auto& [index, s] : map.segments) {
        out << "<circle class=\"start\" cx=\"" << sx(s.start()) << "\" cy=\"" << sy(s.start())
            << "\" r=\"" << options.endpointRadius << "\" fill=\"red\"/>\n";
        out << "<circle class=\"end\" cx=\"" << sx(s.end()) << "\" cy=\"" << sy(s.end())
            << "\" r=\"" << options.endpointRadius << "\" fill=\"green\"/>\n";
    }
    out << "</g>\n</svg>\n";
}

} // namespace linemap

// Command-line front end: merge, evaluate, render, synth, stats.
// Exit status 0 on success, 1 for usage errors, 2 for data errors.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linemap/config.hpp"
#include "linemap/errors.hpp"
#include "linemap/evaluation.hpp"
#include "linemap/pipeline.hpp"
#include "linemap/scan_io.hpp"
#include "linemap/synth.hpp"

using namespace linemap;

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigOptions {
    std::string path;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--config", path, "key=value configuration file");
        cmd->add_option("--set", overrides, "override one setting, key=value")->take_all();
    }

    Config load() const
    {
        Config config = path.empty() ? Config{} : readConfig(path);
        for (const auto& item : overrides) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw UsageError("--set expects key=value, got '" + item + "'");
            applySetting(config, item.substr(0, eq), item.substr(eq + 1));
        }
        config.validate();
        return config;
    }
};

Trajectory trajectoryFromLog(std::span<const LaserScan> scans)
{
    Trajectory t;
    for (const auto& scan : scans) {
        if (!scan.laserPose)
            throw DataError("scan " + std::to_string(scan.scanIndex) + " has no pose in the log");
        t.append(scan.scanIndex, *scan.laserPose);
    }
    return t;
}

std::ofstream openOutput(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write '" + path + "'");
    return out;
}

std::string formatNumber(double v, int precision = 6)
{
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

// ---------------------------------------------------------------- merge

struct MergeArgs {
    std::string log;
    std::string traj;
    std::string optimized;
    std::vector<std::size_t> adjustAt;
    std::string merger = "cae";
    std::string out;
    std::string correspondences;
    bool checkInvariants = false;
    ConfigOptions config;
};

int runMerge(const MergeArgs& args)
{
    const Config config = args.config.load();
    const auto kind = parseMergerKind(args.merger);
    if (!kind)
        throw UsageError("unknown merger '" + args.merger + "' (cae, oto, o2to)");
    if (!args.adjustAt.empty() && args.optimized.empty())
        throw UsageError("--adjust-at needs --optimized");

    const std::vector<LaserScan> scans = readCarmenLog(args.log, config.maxRange);
    const Trajectory primary = args.traj.empty() ? trajectoryFromLog(scans) : readTrajectory(args.traj);
    std::optional<Trajectory> optimized;
    if (!args.optimized.empty())
        optimized = readTrajectory(args.optimized);

    PipelineOptions options;
    options.merger = *kind;
    options.extraction = config.extraction;
    options.thresholds = config.fusion;
    options.keyframe = config.keyframe;
    options.adjustAt = args.adjustAt;
    options.workers = config.adjustWorkers;
    options.checkEachFrame = args.checkInvariants;
    const PipelineResult result =
        runPipeline(scans, primary, optimized ? &*optimized : nullptr, options);

    for (const auto& v : result.violations)
        std::cerr << "invariant violated: " << v << '\n';

    SegmentMapFile file;
    file.map = filterByWeight(result.state.map, config.minUpdates);
    file.metadata.emplace_back("merger", mergerName(*kind));
    file.metadata.emplace_back("log", args.log);
    file.metadata.emplace_back("scans", std::to_string(scans.size()));
    file.metadata.emplace_back("keyframes", std::to_string(result.keyframes.size()));
    file.metadata.emplace_back("unfiltered_segments", std::to_string(result.state.map.size()));
    for (auto& kv : describeConfig(config))
        file.metadata.push_back(std::move(kv));
    writeSegmentMap(args.out, file);

    if (!args.correspondences.empty()) {
        CorrespondenceStore kept;
        for (const auto& [index, segment] : file.map.segments)
            kept.subsets.emplace(index, result.state.store.subsets.at(index));
        auto out = openOutput(args.correspondences);
        writeCorrespondences(out, kept);
    }

    const MapStatistics stats = mapStatistics(file.map);
    const double perFrame =
        result.frameMillis.empty()
            ? 0.0
            : std::accumulate(result.frameMillis.begin(), result.frameMillis.end(), 0.0) /
                  static_cast<double>(result.frameMillis.size());
    const auto opt = [](const std::optional<double>& v) { return v ? formatNumber(*v, 3) : std::string("-"); };
    std::cout << "merger segments min_length_m max_length_m mean_length_m keyframes adjustments"
                 " per_frame_ms total_ms\n";
    std::cout << mergerName(*kind) << ' ' << stats.count << ' ' << opt(stats.minLength) << ' '
              << opt(stats.maxLength) << ' ' << opt(stats.meanLength) << ' '
              << result.keyframes.size() << ' ' << result.adjustments << ' '
              << formatNumber(perFrame, 4) << ' ' << formatNumber(result.totalMillis, 3) << '\n';
    return result.violations.empty() ? 0 : kDataError;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string map;
    std::string log;
    std::string traj;
    std::string correspondences;
    std::string record;
    std::string pgm;
    ConfigOptions config;
};

struct Bounds {
    Point lo = Point::Constant(std::numeric_limits<double>::infinity());
    Point hi = Point::Constant(-std::numeric_limits<double>::infinity());

    void add(const Point& p)
    {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    bool intersects(const Bounds& o) const
    {
        return lo.x() <= o.hi.x() && o.lo.x() <= hi.x() && lo.y() <= o.hi.y() && o.lo.y() <= hi.y();
    }
};

int runEvaluate(const EvaluateArgs& args)
{
    const Config config = args.config.load();
    const SegmentMapFile file = readSegmentMap(args.map);
    const std::vector<LaserScan> scans = readCarmenLog(args.log, config.maxRange);
    const Trajectory traj = args.traj.empty() ? trajectoryFromLog(scans) : readTrajectory(args.traj);

    const LookupTable table = buildLookupTable(scans, traj, config.eval.resolution, config.eval.sigma);
    if (!args.pgm.empty()) {
        std::ofstream out(args.pgm, std::ios::binary);
        if (!out)
            throw DataError("cannot write '" + args.pgm + "'");
        writePgm(out, table);
    }

    Bounds mapBounds;
    Bounds scanBounds;
    for (const auto& [index, s] : file.map.segments) {
        mapBounds.add(s.start());
        mapBounds.add(s.end());
    }
    for (const auto& p : registerScans(scans, traj))
        scanBounds.add(p);
    if (!file.map.empty() && !mapBounds.intersects(scanBounds))
        std::cerr << "warning: map and registered scans do not overlap; check the trajectory frame\n";

    std::vector<std::pair<std::string, std::string>> record;
    record.emplace_back("map", args.map);
    record.emplace_back("segments", std::to_string(file.map.size()));
    const QualityReport quality = mapQuality(file.map, table, config.fusion, config.eval);
    record.emplace_back("quality.q", formatNumber(quality.q, 9));
    record.emplace_back("quality.percent", formatNumber(quality.percent, 4));
    record.emplace_back("quality.mean_pixel_score", formatNumber(quality.meanPixelScore, 9));
    record.emplace_back("quality.pixels", std::to_string(quality.totalPixels));
    record.emplace_back("quality.redundant_pixels", std::to_string(quality.redundantPixels));
    record.emplace_back("quality.redundant_pairs", std::to_string(quality.redundantPairs.size()));
    record.emplace_back("table.occupied_cells", std::to_string(table.occupiedCells()));
    record.emplace_back("table.mean_occupied_value", formatNumber(quality.meanOccupiedCellValue, 9));

    if (!args.correspondences.empty()) {
        std::ifstream in(args.correspondences);
        if (!in)
            throw DataError("cannot open '" + args.correspondences + "'");
        const CorrespondenceStore store = readCorrespondences(in);
        const ErrorReport error = errorMetric(file.map, store, traj);
        record.emplace_back("error.e_m", formatNumber(error.e, 9));
        record.emplace_back("error.final_segments", std::to_string(error.K));
        record.emplace_back("error.originals", std::to_string(error.originals));
        record.emplace_back("distance.value", formatNumber(distanceMetric(file.map, store, traj,
                                                                          config.distanceWeight,
                                                                          config.angleWeight), 9));
    } else {
        std::cerr << "notice: the error metric needs --correspondences; reporting quality only\n";
    }
    for (auto& kv : describeConfig(config))
        record.emplace_back("config." + kv.first, kv.second);

    std::ostringstream text;
    for (const auto& [key, value] : record)
        text << key << '=' << value << '\n';
    std::cout << text.str();
    if (!args.record.empty()) {
        auto out = openOutput(args.record);
        out << text.str();
    }
    return 0;
}

// ---------------------------------------------------------------- render

struct RenderArgs {
    std::string map;
    std::string log;
    std::string traj;
    std::string out;
    double pixelsPerMeter = 20.0;
};

int runRender(const RenderArgs& args)
{
    if (!args.traj.empty() && args.log.empty())
        throw UsageError("--traj needs --log");
    const SegmentMapFile file = readSegmentMap(args.map);
    std::vector<Point> points;
    if (!args.log.empty()) {
        const std::vector<LaserScan> scans = readCarmenLog(args.log);
        const Trajectory traj = args.traj.empty() ? trajectoryFromLog(scans) : readTrajectory(args.traj);
        points = registerScans(scans, traj);
    }
    SvgOptions options;
    options.pixelsPerMeter = args.pixelsPerMeter;
    auto out = openOutput(args.out);
    exportSvg(out, file.map, points, options);
    if (!out)
        throw DataError("write failed for '" + args.out + "'");
    return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string world;
    std::string preset;
    std::string outLog;
    std::string outTraj;
    std::string outOdometry;
    SynthParams params;
};

int runSynth(const SynthArgs& args)
{
    World world;
    if (!args.world.empty() && !args.preset.empty())
        throw UsageError("give either --world or --preset");
    if (!args.preset.empty()) {
        const auto preset = worldPreset(args.preset);
        if (!preset)
            throw UsageError("unknown preset '" + args.preset + "' (square-room, loop-corridor)");
        world = *preset;
    } else if (!args.world.empty()) {
        world = readWorld(args.world);
    } else {
        throw UsageError("one of --world or --preset is required");
    }

    SynthResult result;
    try {
        result = synthesize(world, args.params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    {
        auto out = openOutput(args.outLog);
        writeCarmenLog(out, result.scans);
    }
    if (!args.outTraj.empty()) {
        auto out = openOutput(args.outTraj);
        writeTrajectory(out, result.truth);
    }
    if (!args.outOdometry.empty()) {
        auto out = openOutput(args.outOdometry);
        writeTrajectory(out, result.odometry);
    }
    std::cout << "scans=" << result.scans.size() << '\n';
    return 0;
}

// ---------------------------------------------------------------- stats

int runStats(const std::string& mapPath, std::optional<int> minUpdates)
{
    SegmentMapFile file = readSegmentMap(mapPath);
    if (minUpdates)
        file.map = filterByWeight(file.map, *minUpdates);
    const MapStatistics stats = mapStatistics(file.map);
    long totalWeight = 0;
    for (const auto& [index, s] : file.map.segments)
        totalWeight += s.weight();
    std::cout << "segments=" << stats.count << '\n';
    if (stats.minLength) {
        std::cout << "min_length_m=" << formatNumber(*stats.minLength) << '\n';
        std::cout << "max_length_m=" << formatNumber(*stats.maxLength) << '\n';
        std::cout << "mean_length_m=" << formatNumber(*stats.meanLength) << '\n';
    }
    std::cout << "total_weight=" << totalWeight << '\n';
    std::cout << "last_index=" << file.map.lastIndex << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Line segment map building and evaluation"};
    app.require_subcommand(1);

    MergeArgs merge;
    auto* mergeCmd = app.add_subcommand("merge", "build a segment map from a laser log");
    mergeCmd->add_option("--log", merge.log, "CARMEN log")->required();
    mergeCmd->add_option("--traj", merge.traj, "pose per scan (defaults to the log's laser poses)");
    mergeCmd->add_option("--optimized", merge.optimized, "re-optimized trajectory");
    mergeCmd->add_option("--adjust-at", merge.adjustAt, "scan index where the optimized poses take over");
    mergeCmd->add_option("--merger", merge.merger, "cae, oto or o2to")->capture_default_str();
    mergeCmd->add_option("--out", merge.out, "output map file")->required();
    mergeCmd->add_option("--correspondences", merge.correspondences, "output correspondence file");
    mergeCmd->add_flag("--check-invariants", merge.checkInvariants, "verify bookkeeping after every frame");
    merge.config.attach(mergeCmd);

    EvaluateArgs evaluate;
    auto* evalCmd = app.add_subcommand("evaluate", "score a map against registered scans");
    evalCmd->add_option("--map", evaluate.map)->required();
    evalCmd->add_option("--log", evaluate.log)->required();
    evalCmd->add_option("--traj", evaluate.traj);
    evalCmd->add_option("--correspondences", evaluate.correspondences);
    evalCmd->add_option("--record", evaluate.record, "also write the key=value record here");
    evalCmd->add_option("--pgm", evaluate.pgm, "export the lookup table as PGM");
    evaluate.config.attach(evalCmd);

    RenderArgs render;
    auto* renderCmd = app.add_subcommand("render", "draw a map as SVG");
    renderCmd->add_option("--map", render.map)->required();
    renderCmd->add_option("--log", render.log);
    renderCmd->add_option("--traj", render.traj);
    renderCmd->add_option("--out", render.out)->required();
    renderCmd->add_option("--pixels-per-meter", render.pixelsPerMeter)->capture_default_str();

    SynthArgs synth;
    auto* synthCmd = app.add_subcommand("synth", "ray-cast a synthetic log");
    synthCmd->add_option("--world", synth.world, "world file");
    synthCmd->add_option("--preset", synth.preset, "square-room or loop-corridor");
    synthCmd->add_option("--out-log", synth.outLog)->required();
    synthCmd->add_option("--out-traj", synth.outTraj, "true poses");
    synthCmd->add_option("--out-odometry", synth.outOdometry, "drifted poses");
    synthCmd->add_option("--seed", synth.params.seed)->capture_default_str();
    synthCmd->add_option("--noise", synth.params.rangeNoise, "range sigma in meters")->capture_default_str();
    synthCmd->add_option("--step", synth.params.step, "meters between scans")->capture_default_str();
    synthCmd->add_option("--beams", synth.params.beams)->capture_default_str();
    synthCmd->add_option("--range", synth.params.sensorRange, "sensor range in meters")->capture_default_str();
    synthCmd->add_option("--drift", synth.params.driftPerMeter)->capture_default_str();
    synthCmd->add_option("--heading-drift", synth.params.headingDriftPerMeter)->capture_default_str();
    synthCmd->add_option("--turn-drift", synth.params.headingDriftPerRadian)->capture_default_str();

    std::string statsMap;
    std::optional<int> statsMinUpdates;
    auto* statsCmd = app.add_subcommand("stats", "segment count and length statistics");
    statsCmd->add_option("--map", statsMap)->required();
    statsCmd->add_option("--min-updates", statsMinUpdates, "keep segments with weight above this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*mergeCmd)
            return runMerge(merge);
        if (*evalCmd)
            return runEvaluate(evaluate);
        if (*renderCmd)
            return runRender(render);
        if (*synthCmd)
            return runSynth(synth);
        if (*statsCmd)
            return runStats(statsMap, statsMinUpdates);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsage;
}

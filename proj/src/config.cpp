#include "linemap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "linemap/errors.hpp"

namespace linemap {

namespace {

double toDouble(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw DataError("config: '" + key + "' expects a number, got '" + text + "'");
    return v;
}

long toInteger(const std::string& key, const std::string& text)
{
    long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw DataError("config: '" + key + "' expects an integer, got '" + text + "'");
    return v;
}

std::string format(double v)
{
    std::ostringstream out;
    out << std::setprecision(12) << v;
    return out.str();
}

struct Entry {
    std::string key;
    std::function<void(Config&, const std::string&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

Entry real(std::string key, double Config::*group, double scale = 1.0)
{
    return {key,
            [group, scale](Config& c, const std::string& k, const std::string& v) {
                c.*group = toDouble(k, v) * scale;
            },
            [group, scale](const Config& c) { return format(c.*group / scale); }};
}

template <typename Group>
Entry real(std::string key, Group Config::*group, double Group::*field, double scale = 1.0)
{
    return {key,
            [group, field, scale](Config& c, const std::string& k, const std::string& v) {
                (c.*group).*field = toDouble(k, v) * scale;
            },
            [group, field, scale](const Config& c) { return format((c.*group).*field / scale); }};
}

const std::vector<Entry>& entries()
{
    constexpr double kDeg = std::numbers::pi / 180.0;
    constexpr double kMm = 1e-3;
    static const std::vector<Entry> table = {
        real("extraction.min_length_m", &Config::extraction, &ExtractionParams::minLength),
        {"extraction.min_points",
         [](Config& c, const std::string& k, const std::string& v) {
             c.extraction.minPoints = static_cast<int>(toInteger(k, v));
         },
         [](const Config& c) { return std::to_string(c.extraction.minPoints); }},
        real("extraction.split_threshold_m", &Config::extraction, &ExtractionParams::splitThreshold),
        real("extraction.max_point_gap_m", &Config::extraction, &ExtractionParams::maxPointGap),
        real("fusion.theta_max_deg", &Config::fusion, &Thresholds::thetaMax, kDeg),
        real("fusion.d_max_mm", &Config::fusion, &Thresholds::dMax, kMm),
        real("fusion.p_min_mm", &Config::fusion, &Thresholds::pMin, kMm),
        {"mapper.min_updates",
         [](Config& c, const std::string& k, const std::string& v) {
             c.minUpdates = static_cast<int>(toInteger(k, v));
         },
         [](const Config& c) { return std::to_string(c.minUpdates); }},
        {"mapper.adjust_workers",
         [](Config& c, const std::string& k, const std::string& v) {
             const long n = toInteger(k, v);
             if (n < 0)
                 throw DataError("config: '" + k + "' must not be negative");
             c.adjustWorkers = static_cast<unsigned>(n);
         },
         [](const Config& c) { return std::to_string(c.adjustWorkers); }},
        real("keyframe.min_translation_m", &Config::keyframe, &KeyframeParams::minTranslation),
        real("keyframe.min_rotation_deg", &Config::keyframe, &KeyframeParams::minRotation, kDeg),
        real("scan.max_range_m", &Config::maxRange),
        real("eval.resolution_m", &Config::eval, &EvalParams::resolution),
        real("eval.sigma_m", &Config::eval, &EvalParams::sigma),
        real("eval.angle_bin_deg", &Config::eval, &EvalParams::angleBinDeg),
        real("eval.lambda", &Config::eval, &EvalParams::lambda),
        real("eval.superposition_fraction", &Config::eval, &EvalParams::superpositionFraction),
        real("eval.distance_weight", &Config::distanceWeight),
        real("eval.angle_weight", &Config::angleWeight),
    };
    return table;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

void Config::validate() const
{
    try {
        extraction.validate();
        fusion.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("config: ") + e.what());
    }
    if (minUpdates < 0)
        throw DataError("config: mapper.min_updates must not be negative");
    if (!(keyframe.minTranslation >= 0.0) || !(keyframe.minRotation >= 0.0))
        throw DataError("config: keyframe thresholds must not be negative");
    if (!(maxRange > 0.0))
        throw DataError("config: scan.max_range_m must be positive");
    if (!(eval.resolution > 0.0) || !(eval.sigma > 0.0))
        throw DataError("config: eval.resolution_m and eval.sigma_m must be positive");
    const double bins = 360.0 / eval.angleBinDeg;
    if (!(eval.angleBinDeg > 0.0) || std::abs(bins - std::round(bins)) > 1e-9)
        throw DataError("config: eval.angle_bin_deg must divide 360");
    if (!(eval.lambda >= 0.0))
        throw DataError("config: eval.lambda must not be negative");
    if (!(eval.superpositionFraction > 0.0 && eval.superpositionFraction <= 1.0))
        throw DataError("config: eval.superposition_fraction must lie in (0, 1]");
}

const std::vector<std::string>& configKeys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& e : entries())
            out.push_back(e.key);
        return out;
    }();
    return keys;
}

void applySetting(Config& config, const std::string& key, const std::string& value)
{
    for (const auto& e : entries()) {
        if (e.key == key) {
            e.set(config, key, trim(value));
            return;
        }
    }
    throw DataError("config: unknown key '" + key + "'");
}

Config parseConfig(std::istream& in, Config base)
{
    std::string raw;
    std::size_t lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError("config: expected key=value", lineNo);
        try {
            applySetting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const DataError& e) {
            throw DataError(e.what(), lineNo);
        }
    }
    return base;
}

Config readConfig(const std::string& path, Config base)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open config file '" + path + "'");
    try {
        return parseConfig(in, std::move(base));
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::vector<std::pair<std::string, std::string>> describeConfig(const Config& config)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : entries())
        out.emplace_back(e.key, e.get(config));
    return out;
}

} // namespace linemap

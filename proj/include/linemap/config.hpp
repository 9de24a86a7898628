// Flat key=value configuration shared by the command-line tools. Values are
// written in the units named by the key suffix and converted on parse.

#ifndef LINEMAP_CONFIG_HPP
#define LINEMAP_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "linemap/evaluation.hpp"
#include "linemap/extraction.hpp"
#include "linemap/mapper.hpp"
#include "linemap/scan_io.hpp"

namespace linemap {

struct Config {
    ExtractionParams extraction;
    Thresholds fusion = Thresholds::dense();
    int minUpdates = 5;
    unsigned adjustWorkers = 0;
    EvalParams eval;
    KeyframeParams keyframe;
    double maxRange = kDefaultMaxRange;
    double distanceWeight = 1.0;  // per meter
    double angleWeight = 1.0;     // per radian

    void validate() const;
};

/// Known keys, in the order they are echoed.
const std::vector<std::string>& configKeys();

/// Throws DataError for unknown keys or unparsable values.
void applySetting(Config& config, const std::string& key, const std::string& value);

/// "key=value" lines; blank lines and '#' comments are skipped. Errors carry
/// the line number.
Config parseConfig(std::istream& in, Config base = {});
Config readConfig(const std::string& path, Config base = {});

/// Effective values in file units, suitable for echoing into output headers.
std::vector<std::pair<std::string, std::string>> describeConfig(const Config& config);

} // namespace linemap

#endif // LINEMAP_CONFIG_HPP

#ifndef LINEMAP_ERRORS_HPP
#define LINEMAP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linemap {

/// Malformed or inconsistent input data (files, trajectories, map states).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
    DataError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    /// 1-based source line, 0 when not tied to a line.
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

} // namespace linemap

#endif // LINEMAP_ERRORS_HPP

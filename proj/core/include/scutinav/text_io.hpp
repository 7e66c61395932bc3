#pragma once
// scutinav/text_io.hpp - small helpers shared by the delimited-text formats

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scutinav {

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char delim);

/// Parses a full field as a double; throws ParseError naming `line`.
double parse_double(std::string_view field, std::size_t line);
long long parse_integer(std::string_view field, std::size_t line);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace text
} // namespace scutinav

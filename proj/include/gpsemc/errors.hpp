#pragma once

#include <stdexcept>
#include <string>

namespace gpsemc {

// Tone frequency falls outside the harmonic span of a computed code spectrum.
struct OutOfSpanError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Band too narrow for the mesoband treatment; caller should model a CWI instead.
struct MesobandRangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed capture file or curve file; line is 1-based within the source.
struct ParseError : std::runtime_error {
  ParseError(const std::string& source, int line_no, const std::string& what_arg)
      : std::runtime_error(source + ":" + std::to_string(line_no) + ": " + what_arg),
        line(line_no) {}
  int line;
};

// Inconsistent receiver / limit configuration (e.g. unreachable threshold).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gpsemc

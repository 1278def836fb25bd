#pragma once

#include <stdexcept>
#include <string>

namespace solartrack {

/// Bad caller input: malformed config, out-of-range argument, degenerate box.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed file or payload. `line` is 1-based, 0 when not line-oriented.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  std::size_t line;
};

/// Network or fixture lookup failure (after retries).
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite gradient.
struct DivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace solartrack

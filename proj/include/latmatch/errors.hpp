#pragma once

#include <stdexcept>
#include <string>

namespace latmatch {

// Base class for everything this library throws on bad input or bad state.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text. `line` is 1-based, 0 when unknown.
struct ParseError : Error {
    std::size_t line = 0;
    ParseError(std::size_t line_, const std::string& msg)
        : Error(line_ ? "line " + std::to_string(line_) + ": " + msg : msg), line(line_) {}
};

// Structurally invalid data (undeclared concept, non-lattice poset, bad filter, ...).
struct ValidationError : Error {
    using Error::Error;
};

// A configured resource bound was hit (concept cap, atom cap, enumeration cap).
struct CapExceeded : Error {
    using Error::Error;
};

// Persistence problems: version mismatch, checksum failure, dangling references.
struct IoError : Error {
    using Error::Error;
};

}  // namespace latmatch

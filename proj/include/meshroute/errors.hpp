#pragma once

#include <stdexcept>
#include <string>

namespace meshroute {

// ---- error taxonomy ----
// Base for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad parameters / contract violations detected at call boundaries.
struct InvalidArgumentError : Error {
    explicit InvalidArgumentError(const std::string& what) : Error(what) {}
};

// Destination provably unreachable (exhausted search / no route).
struct NoPathError : Error {
    explicit NoPathError(const std::string& what) : Error(what) {}
};

// Malformed text content (topology files, rule dumps, configs).
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

// OS-level I/O failures (missing file, unwritable path).
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

} // namespace meshroute

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrlock {

/// Invalid argument or configuration value. CLI maps this to exit code 2.
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file. Carries the byte offset where parsing failed.
/// CLI maps this to exit code 3.
struct ParseError : std::runtime_error {
    std::size_t byte_offset;

    ParseError(const std::string& msg, std::size_t offset)
        : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
};

/// Analysis could not produce a result (window selection, undefined phase,
/// fit breakdown, unstable bootstrap, missing threshold crossing, ...).
/// CLI maps this to exit code 4.
struct AnalysisError : std::runtime_error {
    explicit AnalysisError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qrlock

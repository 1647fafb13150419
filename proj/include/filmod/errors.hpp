#pragma once

#include <stdexcept>
#include <string>

namespace filmod {

// Malformed input (scenario files, schema violations, context mismatches). CLI exit 2.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Rejection on mathematical grounds (invalid parameters for a case, violated
// preconditions of a construction). CLI exit 1.
struct reject_error : std::runtime_error {
    explicit reject_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace filmod

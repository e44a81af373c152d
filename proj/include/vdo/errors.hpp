#pragma once

#include <stdexcept>
#include <string>

namespace vdo {

// Bad user-supplied configuration (unknown shape, invalid nu, ...).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (CSV parse failures, shape mismatches, ...).
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric routine could not complete (non-convergence, resource caps, ...).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vdo

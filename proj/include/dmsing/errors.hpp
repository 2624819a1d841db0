// errors.hpp — exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace dmsing {

// A Bloch vector / affine-map output that fails density-matrix positivity.
// Raised instead of clamping so that unphysical maps stay visible.
struct NotAStateError : std::runtime_error {
    explicit NotAStateError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation at (or numerically too close to) a pole of a decay rate.
struct PoleError : std::runtime_error {
    explicit PoleError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file (tabulated / Kraus family JSON).
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine failed to converge on both its primary and fallback path.
struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dmsing

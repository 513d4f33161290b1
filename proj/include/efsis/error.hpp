#pragma once

#include <stdexcept>
#include <string>

namespace efsis {

/// Raised for every domain-level failure (bad input data, violated
/// preconditions, degenerate statistics).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace efsis

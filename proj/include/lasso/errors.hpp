#pragma once

#include <stdexcept>
#include <string>

namespace lasso {

// Input is well-formed but mathematically unusable (zero matrix, zero step, ...).
class DegenerateInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An operator was built for flags that no longer match the iterate it is applied to.
class RebuildRequired : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A quantity was requested outside the regime in which it is defined.
class NotApplicable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The high-accuracy reference solve failed its KKT / complementarity checks.
class NoReliableReference : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lasso

#pragma once

#include <stdexcept>
#include <string>

namespace agcal {

// Bad argument (mismatched index sets, out-of-range eps, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Expression leaves the decidable exp-log fragment; callers fall back to
// numeric mode where that makes sense.
class FragmentError : public std::runtime_error {
public:
    explicit FragmentError(const std::string& what) : std::runtime_error(what) {}
};

// Syntax error with position information.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          pos(position) {}
    std::size_t pos;
};

// IEEE overflow during evaluation. Distinct from other numeric failures so
// grid sweeps can truncate instead of aborting.
class OverflowSignal : public std::runtime_error {
public:
    explicit OverflowSignal(const std::string& what) : std::runtime_error(what) {}
};

// Failure while building an object (ill-conditioned moment system, ...).
class ConstructionError : public std::runtime_error {
public:
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature or other numeric routine could not reach its tolerance.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Requested capability exceeded (derivative order on a black box, ...).
class CapabilityError : public std::runtime_error {
public:
    explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace agcal

#pragma once

#include <stdexcept>
#include <string>

namespace heurreg {

// Invalid argument values: out-of-range parameters, mismatched lengths,
// malformed configuration.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// The call itself is meaningless for the requested object (e.g. asking for a
// functional a rule does not define), independent of argument values.
class usage_error : public std::logic_error {
public:
    explicit usage_error(const std::string& what) : std::logic_error(what) {}
};

// A rate query outside the regime where the rule has a known rate.  The
// message names the violated constraint.
class saturation_violated : public parameter_error {
public:
    explicit saturation_violated(const std::string& what) : parameter_error(what) {}
};

// Every candidate value was non-finite, so no minimizer exists.
class selection_failed : public std::runtime_error {
public:
    explicit selection_failed(const std::string& what) : std::runtime_error(what) {}
};

// Input is structurally valid but carries no usable signal (e.g. scaling an
// all-zero noise vector).
class degenerate_input : public std::runtime_error {
public:
    explicit degenerate_input(const std::string& what) : std::runtime_error(what) {}
};

} // namespace heurreg

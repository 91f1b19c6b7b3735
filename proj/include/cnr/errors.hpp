#pragma once

#include <stdexcept>
#include <string>

namespace cnr {

/// Malformed user input: map text, JSON documents, traces.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configured size limit (stateCap, beliefCap) was exceeded.
class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what, std::size_t lower_bound)
        : std::runtime_error(what), lower_bound_(lower_bound) {}

    /// Number of states/beliefs discovered before giving up.
    std::size_t lower_bound() const { return lower_bound_; }

private:
    std::size_t lower_bound_;
};

/// A caller broke an operation's precondition (wrong variant, bad index...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace cnr

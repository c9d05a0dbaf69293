#pragma once

#include <stdexcept>
#include <string>

namespace opn {

// Precondition or input outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A configured work budget (factorization, enumeration size) ran out.
// Never a wrong answer: the caller learns that the question was not decided.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Interval refinement hit the precision cap before a strict comparison resolved.
class UndecidableError : public std::runtime_error {
public:
    UndecidableError(const std::string& what, long cap_bits)
        : std::runtime_error(what + " (precision cap " + std::to_string(cap_bits) + " bits)"),
          cap_bits_(cap_bits) {}
    long cap_bits() const noexcept { return cap_bits_; }

private:
    long cap_bits_;
};

// A self-check that must be unreachable failed.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace opn

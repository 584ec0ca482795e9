// error.hpp
// Exception types shared by all kforr modules.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kforr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested size exceeds what the simulator or an oracle supports.
struct CapacityError : Error {
    using Error::Error;
};

// Arguments violate an operation's preconditions.
struct ValidationError : Error {
    using Error::Error;
};

// An encoded sample has a block with more than three ones.
struct MalformedSampleError : ValidationError {
    using ValidationError::ValidationError;
};

// Training pair cannot be separated by the feature map (k(x+, x-) ~ 1).
struct DegenerateTrainingSetError : Error {
    using Error::Error;
};

struct GenerationError : Error {
    using Error::Error;
};

// Broken internal invariant (norm drift, complex forrelation amplitude, ...).
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace kforr

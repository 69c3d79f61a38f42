#pragma once

#include <stdexcept>
#include <string>

namespace apes {

// Exit-code contract of the CLI: validation -> 2, blow-up -> 3, I/O -> 4.

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : ValidationError {
    explicit ShapeError(const std::string& msg) : ValidationError(msg) {}
};

struct ParityError : ValidationError {
    explicit ParityError(const std::string& msg) : ValidationError(msg) {}
};

// Zero-mean compatibility failures of the 2D Poisson solve and of the
// vertical primitive of an even field with nonzero column mean.
struct SolvabilityError : ValidationError {
    explicit SolvabilityError(const std::string& msg) : ValidationError(msg) {}
};

struct ConstraintError : ValidationError {
    explicit ConstraintError(const std::string& msg) : ValidationError(msg) {}
};

struct HypothesisError : ValidationError {
    explicit HypothesisError(const std::string& msg) : ValidationError(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BlowUpError : std::runtime_error {
    double t;
    explicit BlowUpError(double t_, const std::string& msg)
        : std::runtime_error(msg), t(t_) {}
};

} // namespace apes

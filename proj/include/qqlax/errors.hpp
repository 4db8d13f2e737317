#pragma once

#include <stdexcept>
#include <string>

namespace qqlax {

// Precondition violations inside the library. The CLI maps ConfigError to
// exit status 2 and everything else to 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

// Evaluation landed on (or numerically next to) a zero of a denominator.
struct PoleError : Error {
    using Error::Error;
};

struct DegeneratePoint : Error {
    using Error::Error;
};

struct ChamberExit : Error {
    using Error::Error;
};

// A truncated series or product did not settle within its term budget.
struct ConvergenceWarning : Error {
    using Error::Error;
};

// The q -> 0 matrix still depends on z at large |z|.
struct NotZIndependent : Error {
    using Error::Error;
};

// A diagonal entry of a spin-chain Lax window vanishes.
struct SingularWindow : Error {
    using Error::Error;
};

// A folded triple outside the domain of the row-transfer map.
struct MapNotApplicable : Error {
    using Error::Error;
};

}  // namespace qqlax

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jwkbfit {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or violated precondition.
struct DomainError : Error { using Error::Error; };
// ODE integration failure: step-size underflow, non-decaying boundary branch.
struct IntegrationError : Error { using Error::Error; };
// f vanished at the matching point; the caller retries with a shifted point.
struct MatchPointError : Error { using Error::Error; };
// Root finding / continuation failure.
struct RootError : Error { using Error::Error; };
// Square-root branch ambiguity or a principal-branch cut crossing.
struct BranchError : Error { using Error::Error; };
// Adaptive quadrature did not converge.
struct QuadratureError : Error { using Error::Error; };
// Mode fitting: rejected cut-off, ill-conditioned Gram system, grid mismatch.
struct FitError : Error { using Error::Error; };

}  // namespace jwkbfit

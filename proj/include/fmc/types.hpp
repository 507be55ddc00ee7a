#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fmc {

using Vec3 = Eigen::Vector3d;

/// Error categories raised by the library. Every thrown fmc::Error carries one.
enum class ErrorCode {
    NonConvex,
    Degenerate,
    ResolutionTooLow,
    NotInward,
    TargetOutOfRange,
    NotPolytope,
    NonInteriorPoint,
    ParamError,
    InvalidSequence,
    StepCollapse,
    MaxStepsExceeded,
    TraceTooShort,
    ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
    {
    }
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Fractional orders and integrability exponent of a computation.
struct Params {
    int n = 1;          ///< surface dimension (1 or 2)
    double alpha = 0.5; ///< curvature order in (0,1)
    double s = 0.5;     ///< Sobolev order in (0,1)
    double p = 1.0;     ///< integrability exponent >= 1

    /// Throws ParamError unless the ranges hold.
    void validate() const;
    /// Critical exponent n p / (n - s p); throws ParamError when n <= s p.
    double critical_exponent() const;
};

/// |S^n|, the measure of the unit n-sphere in R^{n+1}.
inline double sphere_measure(int n)
{
    // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

/// |B_1^n|, the volume of the unit ball in R^n.
inline double ball_volume(int n)
{
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

} // namespace fmc

#pragma once

#include "fmc/inequalities.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fmc {

/// One recorded time level of a marker polygon.
struct FlowState {
    double t = 0.0;
    std::vector<Eigen::Vector2d> markers; ///< counter-clockwise, strictly convex
    double perimeter = 0.0;
    double area = 0.0;
    double max_halpha = 0.0;
    double dt_used = 0.0;
    int rehulls = 0;            ///< markers dropped by re-hulling in the step that produced this state
    bool resampled = false;     ///< markers were redistributed after the step
    std::vector<double> halpha; ///< H_alpha at every marker of this state
};

struct FlowOptions {
    double cfl = 0.1;
    double extinct = 1e-3;     ///< stop once area < extinct * initial area
    int max_steps = 200000;
    int resample_every = 20;   ///< equal-arclength resampling period (0 disables)
    int markers = 256;         ///< marker count for balls and resampling
    int record_every = 1;      ///< keep every k-th state (the last one is always kept)
};

struct FlowTrace {
    std::vector<FlowState> states;
    double T_star_num = 0.0;
    double tail = 0.0; ///< extrapolated remaining time after the last state
    double alpha = 0.5;
    int resolution = 0;
    double cfl = 0.0;
    std::string termination_reason;
    int steps = 0;
    int rehull_total = 0;
};

/// Run failure (StepCollapse or MaxStepsExceeded) carrying the trace so far.
class FlowAborted : public Error {
public:
    FlowAborted(ErrorCode code, const std::string& what, FlowTrace partial)
        : Error(code, what)
        , trace(std::move(partial))
    {
    }
    FlowTrace trace;
};

/// Markers of a polygon or sampled circle, with every polygon edge subdivided so
/// that the count is about `markers` and spacing is roughly uniform in arclength.
std::vector<Eigen::Vector2d> initial_markers(const ConvexBody& body, int markers);

/// State with geometry and H_alpha filled in; throws NonConvex or Degenerate.
FlowState make_state(std::vector<Eigen::Vector2d> markers, double alpha, double t = 0.0);

/// H_alpha at every marker of a closed convex marker curve: the chord integral
/// written over exit points, summed with a singularity-corrected trapezoid rule.
std::vector<double> marker_halpha(std::span<const Eigen::Vector2d> markers, double alpha);

/// Turning angle at each marker over half the sum of its two edge lengths.
std::vector<double> classical_curvature(const FlowState& state);

/// One explicit Euler step of the inward normal motion with speed H_alpha.
/// Throws StepCollapse when fewer than 8 markers survive re-hulling.
FlowState fmcf_step(const FlowState& state, double alpha, double cfl);

/// Runs until extinction; throws FlowAborted. Balls are sampled to markers.
FlowTrace fmcf_run(const ConvexBody& body0, double alpha, const FlowOptions& options = {});

/// Centered difference of the perimeter against -sum H_alpha * turning angle at
/// the interior recorded states; reports the worst relative error over the
/// middle of the trace (times within window / 2 of half the final recorded time).
InequalityReport check_first_variation(const FlowTrace& trace, double rel_tolerance = 0.05, double window = 0.5);

/// Monotone decay of |boundary|^(1+alpha) and its slope; extras carry T*,
/// |boundary_0|^(1+alpha), diam_0^(1+alpha) and the two ratios.
InequalityReport check_decay_and_bounds(const FlowTrace& trace);

/// Columns t, perimeter, area, max_halpha, dt.
void write_trace_csv(const FlowTrace& trace, std::ostream& out);
/// Closed polyline of the state; the square [center - extent, center + extent]^2
/// fills the canvas.
std::string snapshot_svg(const FlowState& state, const Eigen::Vector2d& center, double extent, int pixels = 480);

} // namespace fmc

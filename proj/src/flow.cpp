#include "fmc/flow.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace fmc {

namespace {

using V2 = Eigen::Vector2d;

constexpr double kPi = std::numbers::pi;

double cross2(const V2& a, const V2& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

std::size_t next(std::size_t i, std::size_t n)
{
    return i + 1 == n ? 0 : i + 1;
}

std::size_t prev(std::size_t i, std::size_t n)
{
    return i == 0 ? n - 1 : i - 1;
}

double polygon_perimeter(std::span<const V2> m)
{
    std::vector<double> lens(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        lens[i] = (m[next(i, m.size())] - m[i]).norm();
    }
    return detail::pairwise_sum(lens);
}

double polygon_area(std::span<const V2> m)
{
    std::vector<double> terms(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        terms[i] = 0.5 * cross2(m[i], m[next(i, m.size())]);
    }
    return detail::pairwise_sum(terms);
}

double turning_angle(std::span<const V2> m, std::size_t i)
{
    const std::size_t n = m.size();
    const V2 a = m[i] - m[prev(i, n)];
    const V2 b = m[next(i, n)] - m[i];
    return std::atan2(cross2(a, b), a.dot(b));
}

// Removes reflex markers until every turn is a (weak) left turn.
int drop_reflex(std::vector<V2>& m)
{
    double scale = 0.0;
    for (const auto& p : m) {
        scale = std::max(scale, p.cwiseAbs().maxCoeff());
    }
    const double tol = 1e-13 * scale * scale;
    int dropped = 0;
    bool changed = true;
    while (changed && m.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < m.size() && m.size() >= 3; ++i) {
            const V2& a = m[prev(i, m.size())];
            const V2& b = m[next(i, m.size())];
            const double turn = cross2(m[i] - a, b - m[i]);
            if (turn < -tol || (m[i] - a).norm() <= 1e-14 * scale) {
                m.erase(m.begin() + static_cast<std::ptrdiff_t>(i));
                ++dropped;
                changed = true;
            }
        }
    }
    return dropped;
}

std::vector<V2> resample(std::span<const V2> m, int count)
{
    const std::size_t n = m.size();
    std::vector<double> cumulative(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cumulative[i + 1] = cumulative[i] + (m[next(i, n)] - m[i]).norm();
    }
    const double total = cumulative[n];
    std::vector<V2> out;
    out.reserve(count);
    std::size_t seg = 0;
    for (int k = 0; k < count; ++k) {
        const double s = total * k / count;
        while (seg + 1 < n && cumulative[seg + 1] <= s) {
            ++seg;
        }
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double f = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
        out.push_back(m[seg] + f * (m[next(seg, n)] - m[seg]));
    }
    return out;
}

double diameter_of(std::span<const V2> m)
{
    double d = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
            d = std::max(d, (m[i] - m[j]).norm());
        }
    }
    return d;
}

} // namespace

std::vector<Eigen::Vector2d> initial_markers(const ConvexBody& body, int markers)
{
    if (markers < 8) {
        throw Error(ErrorCode::ResolutionTooLow, "flow needs at least 8 markers");
    }
    if (const auto* ball = std::get_if<Ball>(&body.shape())) {
        if (ball->dim != 2) {
            throw Error(ErrorCode::ParamError, "the flow is implemented for planar curves only");
        }
        std::vector<V2> out;
        for (int k = 0; k < markers; ++k) {
            const double phi = 2.0 * kPi * k / markers;
            out.emplace_back(ball->center.x() + ball->radius * std::cos(phi), ball->center.y() + ball->radius * std::sin(phi));
        }
        return out;
    }
    if (body.surface_dim() != 1) {
        throw Error(ErrorCode::ParamError, "the flow is implemented for planar curves only");
    }
    const auto verts = body.vertices();
    const double total = perimeter(body);
    std::vector<V2> out;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const V2 a = verts[i].head<2>();
        const V2 b = verts[next(i, verts.size())].head<2>();
        const int pieces = std::max(1, static_cast<int>(std::lround(markers * (b - a).norm() / total)));
        for (int k = 0; k < pieces; ++k) {
            out.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
        }
    }
    return out;
}

std::vector<double> marker_halpha(std::span<const Eigen::Vector2d> markers, double alpha)
{
    const std::size_t n = markers.size();
    // Bisector normals (inside the normal cone even at corners, so every term
    // below is non-negative) with dual edge lengths as the trapezoid weights, and
    // the curvature of the circle through three consecutive markers.
    std::vector<V2> normal(n);
    std::vector<double> speed(n);
    std::vector<double> kappa(n);
    for (std::size_t j = 0; j < n; ++j) {
        const V2 a = markers[j] - markers[prev(j, n)];
        const V2 b = markers[next(j, n)] - markers[j];
        const V2 t = a.normalized() + b.normalized();
        normal[j] = V2(t.y(), -t.x()).normalized();
        speed[j] = 0.5 * (a.norm() + b.norm());
        kappa[j] = 2.0 * cross2(a, b) / (a.norm() * b.norm() * (a + b).norm());
    }
    const double zeta = std::riemann_zeta(alpha);
    return detail::parallel_map(n, [&](std::size_t i) {
        // Chord integral in the exit-point parametrization: d(theta) =
        // (y - x).nu / |y - x|^2 ds, summed by the trapezoid rule over the markers
        // with the zeta correction for the |u|^(-alpha) singularity.
        std::vector<double> terms(n);
        const V2& x = markers[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                continue;
            }
            const V2 d = markers[j] - x;
            terms[j] = d.dot(normal[j]) * std::pow(d.squaredNorm(), -0.5 * (2.0 + alpha)) * speed[j];
        }
        const double g0 = 0.5 * kappa[i] * std::pow(speed[i], 1.0 - alpha);
        return detail::pairwise_sum(terms) - 2.0 * zeta * g0;
    });
}

FlowState make_state(std::vector<Eigen::Vector2d> markers, double alpha, double t)
{
    // Validates convexity and non-degeneracy of the marker polygon.
    polygon_from_points(markers);
    FlowState s;
    s.t = t;
    s.markers = std::move(markers);
    if (polygon_area(s.markers) < 0.0) {
        std::reverse(s.markers.begin(), s.markers.end());
    }
    s.perimeter = polygon_perimeter(s.markers);
    s.area = polygon_area(s.markers);
    s.halpha = marker_halpha(s.markers, alpha);
    s.max_halpha = *std::max_element(s.halpha.begin(), s.halpha.end());
    return s;
}

std::vector<double> classical_curvature(const FlowState& state)
{
    const auto& m = state.markers;
    const std::size_t n = m.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dual = 0.5 * ((m[i] - m[prev(i, n)]).norm() + (m[next(i, n)] - m[i]).norm());
        out[i] = turning_angle(m, i) / dual;
    }
    return out;
}

FlowState fmcf_step(const FlowState& state, double alpha, double cfl)
{
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        throw Error(ErrorCode::ParamError, "cfl must lie in (0, 1]");
    }
    const auto& m = state.markers;
    const std::size_t n = m.size();
    double min_edge = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        min_edge = std::min(min_edge, (m[next(i, n)] - m[i]).norm());
    }
    const double dt = cfl * min_edge / state.max_halpha;
    std::vector<V2> moved(n);
    for (std::size_t i = 0; i < n; ++i) {
        const V2 t1 = (m[i] - m[prev(i, n)]).normalized();
        const V2 t2 = (m[next(i, n)] - m[i]).normalized();
        // Counter-clockwise orientation: the left normal points inward. Moving
        // by 1/cos(turn/2) along the bisector advances both incident edge lines
        // by exactly dt * H, so corners are not overtaken by their neighbours.
        const V2 sum = V2(-t1.y(), t1.x()) + V2(-t2.y(), t2.x());
        const double half_turn_cos = 0.5 * sum.norm();
        moved[i] = m[i] + dt * state.halpha[i] / half_turn_cos * sum.normalized();
    }
    const int dropped = drop_reflex(moved);
    if (moved.size() < 8) {
        throw Error(ErrorCode::StepCollapse, "fewer than 8 markers survive re-hulling");
    }
    FlowState out = make_state(std::move(moved), alpha, state.t + dt);
    out.dt_used = dt;
    out.rehulls = dropped;
    return out;
}

namespace {

double tail_estimate(const std::vector<FlowState>& states, double alpha)
{
    const std::size_t count = std::min<std::size_t>(10, states.size());
    if (count < 3) {
        return 0.0;
    }
    double st = 0.0;
    double sq = 0.0;
    double stt = 0.0;
    double stq = 0.0;
    for (std::size_t k = states.size() - count; k < states.size(); ++k) {
        const double t = states[k].t;
        const double q = std::pow(states[k].perimeter, 1.0 + alpha);
        st += t;
        sq += q;
        stt += t * t;
        stq += t * q;
    }
    const double slope = (count * stq - st * sq) / (count * stt - st * st);
    if (!(slope < 0.0)) {
        return 0.0;
    }
    return std::pow(states.back().perimeter, 1.0 + alpha) / -slope;
}

} // namespace

FlowTrace fmcf_run(const ConvexBody& body0, double alpha, const FlowOptions& options)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::ParamError, "alpha must lie in (0, 1)");
    }
    if (!(options.extinct > 0.0 && options.extinct < 1.0) || options.record_every < 1) {
        throw Error(ErrorCode::ParamError, "invalid flow options");
    }
    FlowTrace trace;
    trace.alpha = alpha;
    trace.resolution = options.markers;
    trace.cfl = options.cfl;
    FlowState state = make_state(initial_markers(body0, options.markers), alpha);
    const double area0 = state.area;
    trace.states.push_back(state);
    // The tail fit uses the last few steps regardless of the recording period.
    std::vector<FlowState> recent {state};
    auto finish = [&](std::string reason) {
        if (trace.states.back().t != state.t) {
            trace.states.push_back(state);
        }
        trace.termination_reason = std::move(reason);
        trace.tail = tail_estimate(recent, alpha);
        trace.T_star_num = state.t + trace.tail;
    };
    while (state.area >= options.extinct * area0) {
        if (trace.steps >= options.max_steps) {
            finish("max_steps");
            throw FlowAborted(ErrorCode::MaxStepsExceeded, "flow did not reach extinction within max_steps", trace);
        }
        try {
            state = fmcf_step(state, alpha, options.cfl);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::StepCollapse) {
                throw;
            }
            finish("collapse");
            throw FlowAborted(ErrorCode::StepCollapse, e.what(), trace);
        }
        ++trace.steps;
        trace.rehull_total += state.rehulls;
        // Re-hulling removes markers near corners; restore the count at once.
        const bool periodic = options.resample_every > 0 && trace.steps % options.resample_every == 0;
        if (periodic || state.rehulls > 0) {
            FlowState fresh = make_state(resample(state.markers, options.markers), alpha, state.t);
            fresh.dt_used = state.dt_used;
            fresh.rehulls = state.rehulls;
            fresh.resampled = true;
            state = std::move(fresh);
        }
        recent.push_back(state);
        if (recent.size() > 10) {
            recent.erase(recent.begin());
        }
        if (trace.steps % options.record_every == 0) {
            trace.states.push_back(state);
        }
    }
    finish("extinct");
    return trace;
}

InequalityReport check_first_variation(const FlowTrace& trace, double rel_tolerance, double window)
{
    const auto& st = trace.states;
    if (st.size() < 3) {
        throw Error(ErrorCode::TraceTooShort, "first variation needs at least 3 states");
    }
    const std::size_t n = st.size();
    const double t_mid = 0.5 * st.back().t;
    const double t_half = 0.5 * window * st.back().t;
    double worst = -1.0;
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
    int checked = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::abs(st[i].t - t_mid) > t_half || st[i].resampled || st[i + 1].resampled) {
            continue;
        }
        const double lhs = (st[i + 1].perimeter - st[i - 1].perimeter) / (st[i + 1].t - st[i - 1].t);
        double rhs = 0.0;
        for (std::size_t j = 0; j < st[i].markers.size(); ++j) {
            rhs -= st[i].halpha[j] * turning_angle(st[i].markers, j);
        }
        const double rel = std::abs(lhs - rhs) / std::abs(rhs);
        ++checked;
        if (rel > worst) {
            worst = rel;
            worst_lhs = lhs;
            worst_rhs = rhs;
        }
    }
    Params params;
    params.alpha = trace.alpha;
    auto r = identity_report("first_variation", params, worst_lhs, worst_rhs, rel_tolerance * std::abs(worst_rhs));
    if (checked == 0) {
        r.pass = false;
        r.note = "no interior states without resampling";
    }
    r.resolution = trace.resolution;
    r.extras = {{"max_rel_error", worst}, {"states_checked", static_cast<double>(checked)}};
    return r;
}

InequalityReport check_decay_and_bounds(const FlowTrace& trace)
{
    const auto& st = trace.states;
    if (st.size() < 2) {
        throw Error(ErrorCode::TraceTooShort, "decay check needs at least 2 states");
    }
    const double e = 1.0 + trace.alpha;
    const double q0 = std::pow(st.front().perimeter, e);
    double max_increase = -std::numeric_limits<double>::infinity();
    double delta_fit = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < st.size(); ++i) {
        const double dq = std::pow(st[i + 1].perimeter, e) - std::pow(st[i].perimeter, e);
        max_increase = std::max(max_increase, dq);
        delta_fit = std::min(delta_fit, -dq / (st[i + 1].t - st[i].t));
    }
    const double slope = (std::pow(st.back().perimeter, e) - q0) / (st.back().t - st.front().t);
    const double d0 = std::pow(diameter_of(st.front().markers), e);
    Params params;
    params.alpha = trace.alpha;
    auto r = inequality_report("perimeter_decay", params, max_increase, 0.0, 1e-6 * q0);
    r.pass = r.pass && delta_fit > 0.0;
    r.resolution = trace.resolution;
    r.extras = {{"T_star", trace.T_star_num}, {"perimeter0_pow", q0}, {"diameter0_pow", d0},
        {"ratio_perimeter", trace.T_star_num / q0}, {"ratio_diameter", trace.T_star_num / d0}, {"mean_slope", slope},
        {"delta_fit", delta_fit}, {"T_bound", q0 / delta_fit}};
    return r;
}

void write_trace_csv(const FlowTrace& trace, std::ostream& out)
{
    out << "t,perimeter,area,max_halpha,dt\n";
    char line[160];
    for (const auto& s : trace.states) {
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g\n", s.t, s.perimeter, s.area, s.max_halpha, s.dt_used);
        out << line;
    }
}

std::string snapshot_svg(const FlowState& state, const Eigen::Vector2d& center, double extent, int pixels)
{
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels << "\">\n";
    svg << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    char buf[64];
    for (std::size_t i = 0; i < state.markers.size(); ++i) {
        const Eigen::Vector2d m = state.markers[i] - center;
        const double px = 0.5 * pixels * (1.0 + m.x() / extent);
        const double py = 0.5 * pixels * (1.0 - m.y() / extent);
        std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", px, py);
        svg << buf;
    }
    svg << "\"/>\n";
    std::snprintf(buf, sizeof buf, "%.6g", state.t);
    svg << "<text x=\"8\" y=\"20\" font-size=\"14\">t = " << buf << "</text>\n</svg>\n";
    return svg.str();
}

} // namespace fmc

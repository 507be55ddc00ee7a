#include "fmc/inequalities.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <set>

namespace fmc {

namespace {

constexpr double kPi = std::numbers::pi;

double weighted_sum(const SurfaceQuadrature& quad, const std::function<double(std::size_t)>& f)
{
    std::vector<double> terms(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        terms[i] = quad.nodes[i].weight * f(i);
    }
    return detail::pairwise_sum(terms);
}

Params params_of(int n, double alpha, double s = 0.5, double p = 1.0)
{
    Params params;
    params.n = n;
    params.alpha = alpha;
    params.s = s;
    params.p = p;
    return params;
}

} // namespace

std::string_view to_string(Provenance provenance)
{
    return provenance == Provenance::PaperExplicit ? "paper-explicit" : "fitted";
}

InequalityReport inequality_report(std::string name, const Params& params, double lhs, double rhs, double tolerance)
{
    InequalityReport r;
    r.name = std::move(name);
    r.params = params;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = tolerance;
    r.pass = std::isfinite(lhs) && !std::isnan(rhs) && r.margin >= -tolerance;
    return r;
}

InequalityReport identity_report(std::string name, const Params& params, double lhs, double rhs, double tolerance)
{
    InequalityReport r;
    r.name = std::move(name);
    r.params = params;
    r.identity = true;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = std::abs(lhs - rhs);
    r.tolerance = tolerance;
    r.pass = r.margin <= tolerance;
    return r;
}

std::vector<double> node_curvatures(
    const ConvexBody& body, const SurfaceQuadrature& quad, double alpha, int half_resolution)
{
    return detail::parallel_map(quad.size(), [&](std::size_t i) {
        return halpha_chord(body, surface_point(quad, static_cast<int>(i)), alpha, half_resolution).value;
    });
}

InequalityReport check_gauss_law(const SurfaceQuadrature& quad, std::span<const SurfacePoint> points, double tolerance)
{
    const double target = 0.5 * sphere_measure(quad.n);
    double worst_value = target;
    double worst = -1.0;
    for (const auto& x : points) {
        const double v = double_layer(quad, x);
        if (std::abs(v - target) > worst) {
            worst = std::abs(v - target);
            worst_value = v;
        }
    }
    auto r = identity_report("gauss_law", params_of(quad.n, 0.5), worst_value, target, tolerance);
    r.resolution = quad.resolution;
    r.extras = {{"points", static_cast<double>(points.size())}};
    return r;
}

InequalityReport check_curvature_interpolation(
    const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E, double alpha, double halpha_x)
{
    const int n = quad.n;
    const double lhs = double_layer(quad, x, Restriction::nodes(E));
    const double rhs = std::pow(E.measure, alpha / (n + alpha)) * std::pow(halpha_x, n / (n + alpha));
    auto r = inequality_report("curvature_interpolation", params_of(n, alpha), lhs, rhs, 1e-9 + 1e-3 * rhs);
    r.resolution = quad.resolution;
    r.extras = {{"measure_E", E.measure}, {"halpha", halpha_x}};
    return r;
}

std::array<InequalityReport, 2> check_pointwise_global(
    const SurfaceQuadrature& quad, std::span<const double> halpha_nodes, double alpha, double s)
{
    const int n = quad.n;
    const double c = std::pow(2.0 / sphere_measure(n), (n + alpha) / n);
    const double per = quad.total_area;
    const double h_min = *std::min_element(halpha_nodes.begin(), halpha_nodes.end());
    const double lhs_a = std::pow(per, -alpha / n);
    const double rhs_a = c * h_min;
    auto a = inequality_report("pointwise_global", params_of(n, alpha, s), lhs_a, rhs_a, 1e-12 * rhs_a);
    a.constant = c;
    a.resolution = quad.resolution;
    a.extras = {{"min_halpha", h_min}, {"points", static_cast<double>(halpha_nodes.size())}};

    const double q = s / alpha;
    const double integral = weighted_sum(quad, [&](std::size_t i) { return std::pow(halpha_nodes[i], q); });
    const double lhs_b = std::pow(per, (n - s) / n);
    const double rhs_b = std::pow(c, q) * integral;
    auto b = inequality_report("aleksandrov_fenchel", params_of(n, alpha, s), lhs_b, rhs_b, 1e-12 * rhs_b);
    b.constant = std::pow(c, q);
    b.resolution = quad.resolution;
    return {a, b};
}

std::array<InequalityReport, 2> check_localized_identity(const ConvexBody& body, const SurfaceQuadrature& quad,
    const SurfacePoint& x, double radius, double alpha, double halpha_x, double tolerance)
{
    const int n = quad.n;
    const double half = 0.5 * sphere_measure(n);
    const double inner = double_layer(quad, x, Restriction::ball(radius));
    const double cap = sphere_cap_measure(body, x, radius) / std::pow(radius, n);
    auto id = identity_report("localized_identity", params_of(n, alpha), inner + cap, half, tolerance * half);
    id.resolution = quad.resolution;
    id.extras = {{"R", radius}, {"double_layer", inner}, {"cap_term", cap}};

    const double patch = clipped_patch_measure(quad, x.point, radius);
    const double rhs = std::pow(patch, alpha / (n + alpha)) * std::pow(halpha_x, n / (n + alpha)) + cap;
    auto bound = inequality_report("localized_bound", params_of(n, alpha), half, rhs, tolerance * half);
    bound.resolution = quad.resolution;
    bound.extras = {{"R", radius}, {"patch", patch}, {"halpha", halpha_x}};
    return {id, bound};
}

double reverse_isoperimetric_ratio(const ConvexBody& body, const SurfaceQuadrature& quad, const SurfacePoint& x, double radius)
{
    const int n = quad.n;
    const double cap = sphere_cap_measure(body, x, radius);
    const double patch = clipped_patch_measure(quad, x.point, radius);
    if (cap == 0.0) {
        return 0.0;
    }
    if (patch == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return cap * radius / std::pow(patch, (n + 1.0) / n);
}

InequalityReport check_reverse_isoperimetric(
    const ConvexBody& body, const SurfaceQuadrature& quad, const SurfacePoint& x, double radius, double fitted_c)
{
    const int n = quad.n;
    const double cap = sphere_cap_measure(body, x, radius);
    const double patch = clipped_patch_measure(quad, x.point, radius);
    const double rhs = fitted_c / radius * std::pow(patch, (n + 1.0) / n);
    auto r = inequality_report("reverse_isoperimetric", params_of(n, 0.5), cap, rhs, 1e-9 * rhs);
    r.constant = fitted_c;
    r.provenance = Provenance::Fitted;
    r.resolution = quad.resolution;
    r.extras = {{"R", radius}, {"patch", patch}};
    return r;
}

InequalityReport check_perimeter_growth(const SurfaceQuadrature& quad, const Vec3& x, double radius)
{
    const int n = quad.n;
    const double patch = clipped_patch_measure(quad, x, radius);
    const double rhs = sphere_measure(n) * std::pow(radius, n);
    auto r = inequality_report("perimeter_growth", params_of(n, 0.5), patch, rhs, 1e-6 * rhs);
    r.resolution = quad.resolution;
    r.extras = {{"R", radius}};
    return r;
}

InequalityReport check_rosenthal_szasz(const ConvexBody& body)
{
    const int n = body.surface_dim();
    const double lhs = perimeter(body);
    const double rhs = sphere_measure(n) * std::pow(diameter(body) / 2.0, n);
    auto r = inequality_report("rosenthal_szasz", params_of(n, 0.5), lhs, rhs, 1e-12 * rhs);
    r.extras = {{"ratio", lhs / rhs}};
    return r;
}

InequalityReport check_isodiametric_volume(const ConvexBody& body)
{
    const int n = body.surface_dim();
    const double lhs = area(body);
    const double rhs = ball_volume(n + 1) * std::pow(diameter(body) / 2.0, n + 1);
    auto r = inequality_report("isodiametric_volume", params_of(n, 0.5), lhs, rhs, 1e-12 * rhs);
    r.extras = {{"ratio", lhs / rhs}};
    return r;
}

InequalityReport check_abs_cosine(const SphericalRule& rule, const Vec3& tau, double tolerance)
{
    const double value = abs_cosine_integral(rule, tau);
    auto r = identity_report("abs_cosine_integral", params_of(rule.n, 0.5), value, 2.0 * ball_volume(rule.n), tolerance);
    r.resolution = static_cast<int>(rule.size());
    return r;
}

InequalityReport check_cauchy_formula(const ConvexBody& polytope, const SphericalRule& rule, double rel_tolerance)
{
    if (!polytope.is_polytope()) {
        throw Error(ErrorCode::NotPolytope, "Cauchy formula check needs a polytope");
    }
    const int n = polytope.surface_dim();
    if (rule.n != n) {
        throw Error(ErrorCode::ParamError, "sphere rule dimension does not match the body");
    }
    std::vector<double> terms(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        terms[i] = rule.weights[i] * projection_measure(polytope, rule.directions[i]);
    }
    const double rhs = detail::pairwise_sum(terms) / ball_volume(n);
    const double lhs = perimeter(polytope);
    auto r = identity_report("cauchy_formula", params_of(n, 0.5), lhs, rhs, rel_tolerance * lhs);
    r.resolution = static_cast<int>(rule.size());
    return r;
}

InequalityReport check_rearrangement(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E, double sp)
{
    const int n = quad.n;
    const double radius = matching_radius(quad, x.point, E.measure);
    const NodeSubset patch = ball_subset(quad, x.point, radius);
    const double tail_e = tail_integral(quad, x, E, sp);
    const double tail_b = tail_integral(quad, x, patch, sp);
    double tol = 0.0;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        if (!patch.contains(i)) {
            const double d = (quad.nodes[i].point - x.point).norm();
            tol = std::max(tol, quad.nodes[i].weight * std::pow(d, -(n + sp)));
        }
    }
    auto r = inequality_report("rearrangement", params_of(n, 0.5, sp, 1.0), tail_b, tail_e, tol);
    r.resolution = quad.resolution;
    r.extras = {{"R", radius}, {"measure_E", E.measure}, {"measure_patch", patch.measure}};
    r.note = "lhs: tail of the matched metric patch; tolerance is one node contribution";
    return r;
}

Dichotomy classify_dichotomy(const SurfaceQuadrature& quad, const Vec3& x, double measure_e, double c_n)
{
    const int n = quad.n;
    const double sn = sphere_measure(n);
    Dichotomy d;
    d.delta = std::min(sn, std::pow(sn / (4.0 * std::max(1.0, c_n)), n / (n + 1.0)));
    d.T = std::pow(2.0 * sn / d.delta, 1.0 / n);
    d.radius = matching_radius(quad, x, measure_e);
    d.patch_R = ball_patch_measure(quad, x, d.radius);
    d.patch_TR = ball_patch_measure(quad, x, d.T * d.radius);
    if (d.patch_R <= d.delta * std::pow(d.radius, n)) {
        d.branch = 1;
    } else if (d.patch_TR <= d.delta * std::pow(d.T * d.radius, n)) {
        d.branch = 2;
    } else {
        d.branch = 3;
    }
    return d;
}

double pointwise_subset_ratio(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E,
    const Params& params, double halpha_x)
{
    const double sp = params.s * params.p;
    const double lhs = std::pow(E.measure, -sp / quad.n);
    const double bracket = tail_integral(quad, x, E, sp) + std::pow(halpha_x, sp / params.alpha);
    return lhs / bracket;
}

InequalityReport check_pointwise_subset(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E,
    const Params& params, double halpha_x, double fitted_c, double c_n)
{
    const double sp = params.s * params.p;
    const double tail = tail_integral(quad, x, E, sp);
    const double lhs = std::pow(E.measure, -sp / quad.n);
    const double bracket = tail + std::pow(halpha_x, sp / params.alpha);
    auto r = inequality_report("pointwise_subset", params, lhs, fitted_c * bracket, 1e-9 * lhs);
    r.constant = fitted_c;
    r.provenance = Provenance::Fitted;
    r.resolution = quad.resolution;
    const Dichotomy d = classify_dichotomy(quad, x.point, E.measure, c_n);
    r.extras = {{"tail", tail}, {"halpha", halpha_x}, {"branch", static_cast<double>(d.branch)}, {"delta", d.delta},
        {"T", d.T}, {"R", d.radius}};
    return r;
}

namespace {

double set_sobolev_bracket(const SurfaceQuadrature& quad, const PairMatrix& pairs, const NodeSubset& E,
    const Params& params, std::span<const double> halpha_nodes)
{
    const double q = params.s / params.alpha;
    const double per = frac_perimeter(pairs, E);
    const double curv = weighted_sum(quad, [&](std::size_t i) { return E.contains(i) ? std::pow(halpha_nodes[i], q) : 0.0; });
    return per + curv;
}

double function_sobolev_bracket(const SurfaceQuadrature& quad, const PairMatrix& pairs, std::span<const double> u,
    const Params& params, std::span<const double> halpha_nodes)
{
    const double q = params.s * params.p / params.alpha;
    const std::vector<double> values(u.begin(), u.end());
    const double semi = 0.5 * gagliardo(pairs, values, params.p);
    const double curv = weighted_sum(quad, [&](std::size_t i) {
        return std::pow(halpha_nodes[i], q) * std::pow(std::abs(u[i]), params.p);
    });
    return semi + curv;
}

double function_sobolev_lhs(const SurfaceQuadrature& quad, std::span<const double> u, const Params& params)
{
    const double pstar = params.critical_exponent();
    const double norm = weighted_sum(quad, [&](std::size_t i) { return std::pow(std::abs(u[i]), pstar); });
    return std::pow(norm, params.p / pstar);
}

void require_sigma(const PairMatrix& pairs, double sigma)
{
    if (std::abs(pairs.sigma() - sigma) > 1e-12) {
        throw Error(ErrorCode::ParamError, "pair matrix exponent does not match s p");
    }
}

} // namespace

double set_sobolev_ratio(const SurfaceQuadrature& quad, const PairMatrix& pairs, const NodeSubset& E,
    const Params& params, std::span<const double> halpha_nodes)
{
    params.critical_exponent();
    require_sigma(pairs, params.s);
    const double lhs = std::pow(E.measure, (quad.n - params.s) / quad.n);
    if (lhs == 0.0) {
        return 0.0;
    }
    return lhs / set_sobolev_bracket(quad, pairs, E, params, halpha_nodes);
}

InequalityReport check_set_sobolev(const SurfaceQuadrature& quad, const PairMatrix& pairs, const NodeSubset& E,
    const Params& params, std::span<const double> halpha_nodes, double fitted_c)
{
    params.critical_exponent();
    require_sigma(pairs, params.s);
    const double lhs = std::pow(E.measure, (quad.n - params.s) / quad.n);
    const double bracket = set_sobolev_bracket(quad, pairs, E, params, halpha_nodes);
    auto r = inequality_report("set_sobolev", params, lhs, fitted_c * bracket, 1e-9 * lhs);
    r.constant = fitted_c;
    r.provenance = Provenance::Fitted;
    r.resolution = quad.resolution;
    r.extras = {{"measure_E", E.measure}, {"bracket", bracket}};
    return r;
}

double function_sobolev_ratio(const SurfaceQuadrature& quad, const PairMatrix& pairs, std::span<const double> u,
    const Params& params, std::span<const double> halpha_nodes)
{
    require_sigma(pairs, params.s * params.p);
    const double lhs = function_sobolev_lhs(quad, u, params);
    if (lhs == 0.0) {
        return 0.0;
    }
    return lhs / function_sobolev_bracket(quad, pairs, u, params, halpha_nodes);
}

InequalityReport check_function_sobolev(const SurfaceQuadrature& quad, const PairMatrix& pairs,
    std::span<const double> u, const Params& params, std::span<const double> halpha_nodes, double fitted_c)
{
    require_sigma(pairs, params.s * params.p);
    const double lhs = function_sobolev_lhs(quad, u, params);
    const double bracket = function_sobolev_bracket(quad, pairs, u, params, halpha_nodes);
    auto r = inequality_report("function_sobolev", params, lhs, fitted_c * bracket, 1e-9 * lhs);
    r.constant = fitted_c;
    r.provenance = Provenance::Fitted;
    r.resolution = quad.resolution;
    r.extras = {{"p_star", params.critical_exponent()}, {"bracket", bracket}};
    return r;
}

InequalityReport check_coarea(const PairMatrix& pairs, std::span<const double> u, int thresholds, double rel_tolerance)
{
    if (thresholds < 1) {
        throw Error(ErrorCode::ParamError, "need at least one threshold");
    }
    const std::vector<double> values(u.begin(), u.end());
    const double lhs = 0.5 * gagliardo(pairs, values, 1.0);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double step = (*hi_it - lo) / thresholds;
    std::vector<double> layers(thresholds, 0.0);
    if (step > 0.0) {
        for (int k = 0; k < thresholds; ++k) {
            const double t = lo + (k + 0.5) * step;
            std::vector<char> mask(values.size());
            for (std::size_t i = 0; i < values.size(); ++i) {
                mask[i] = values[i] > t ? 1 : 0;
            }
            NodeSubset level;
            level.mask = std::move(mask);
            layers[k] = frac_perimeter(pairs, level) * step;
        }
    }
    const double rhs = detail::pairwise_sum(layers);
    Params params;
    params.s = pairs.sigma();
    auto r = identity_report("coarea", params, lhs, rhs, 1e-10 * lhs + rel_tolerance * lhs);
    r.resolution = static_cast<int>(pairs.size());
    r.extras = {{"thresholds", static_cast<double>(thresholds)}};
    return r;
}

LevelSetSides level_set_sides(const SurfaceQuadrature& quad, const PairMatrix& pairs, std::span<const double> u,
    const Params& params, std::span<const double> halpha_nodes)
{
    params.critical_exponent();
    require_sigma(pairs, params.s * params.p);
    LevelSetSides sides;
    sides.bracket = function_sobolev_bracket(quad, pairs, u, params, halpha_nodes);

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double v : u) {
        if (v < 0.0) {
            throw Error(ErrorCode::ParamError, "level-set series needs a non-negative field");
        }
        if (v > 0.0) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == 0.0) {
        return sides;
    }
    const auto level = [&](long i) {
        const double t = std::ldexp(1.0, static_cast<int>(i));
        return weighted_sum(quad, [&](std::size_t k) { return u[k] > t ? 1.0 : 0.0; });
    };
    // a_i is constant below `first` and vanishes from `cutoff` on.
    const long first = static_cast<long>(std::floor(std::log2(lo))) - 1;
    const long cutoff = static_cast<long>(std::floor(std::log2(hi))) + 1;
    const double p = params.p;
    const double e_neg = -params.s * params.p / params.n;
    const double head = level(first - 1);
    std::vector<double> terms {std::pow(head, 1.0 + e_neg) * std::pow(2.0, p * (first - 1)) / (1.0 - std::pow(2.0, -p))};
    double a_prev = head;
    for (long i = first; i <= cutoff; ++i) {
        const double a = level(i);
        if (a_prev != 0.0) {
            terms.push_back(std::pow(2.0, p * i) * std::pow(a_prev, e_neg) * a);
        }
        a_prev = a;
    }
    sides.series = detail::pairwise_sum(terms);
    return sides;
}

InequalityReport check_level_set_series(const SurfaceQuadrature& quad, const PairMatrix& pairs,
    std::span<const double> u, const Params& params, std::span<const double> halpha_nodes, double fitted_c)
{
    const auto sides = level_set_sides(quad, pairs, u, params, halpha_nodes);
    auto r = inequality_report("level_set_series", params, sides.series, fitted_c * sides.bracket, 1e-9 * sides.series);
    r.constant = fitted_c;
    r.provenance = Provenance::Fitted;
    r.resolution = quad.resolution;
    r.extras = {{"series", sides.series}, {"bracket", sides.bracket}};
    return r;
}

double SlicingSequence::operator[](long i) const
{
    if (i < first) {
        return head;
    }
    if (i < cutoff()) {
        return window[static_cast<std::size_t>(i - first)];
    }
    return 0.0;
}

void SlicingSequence::validate() const
{
    double prev = head;
    if (!std::isfinite(head) || head < 0.0) {
        throw Error(ErrorCode::InvalidSequence, "head value must be finite and non-negative");
    }
    for (std::size_t k = 0; k < window.size(); ++k) {
        const double a = window[k];
        if (!std::isfinite(a) || a < 0.0) {
            throw Error(ErrorCode::InvalidSequence, "entry " + std::to_string(first + static_cast<long>(k)) + " is negative");
        }
        if (a > prev) {
            throw Error(ErrorCode::InvalidSequence,
                "sequence increases at index " + std::to_string(first + static_cast<long>(k)));
        }
        prev = a;
    }
}

std::array<InequalityReport, 2> check_slicing(const SlicingSequence& seq, const Params& params)
{
    params.validate();
    seq.validate();
    const double n = params.n;
    const double p = params.p;
    const double sp = params.s * params.p;
    const double pstar = params.critical_exponent();
    const double e_pos = (n - sp) / n;
    const double e_neg = -sp / n;

    // Closed form of sum_{i <= last} 2^(p i) for the constant head region.
    const long last = seq.first - 3;
    const double geometric = std::pow(2.0, p * last) / (1.0 - std::pow(2.0, -p));
    const double h = seq.head;
    const bool live = h > 0.0;

    std::vector<double> s1l;
    std::vector<double> s1r;
    std::vector<double> s2l;
    std::vector<double> s2r;
    if (live) {
        s1l.push_back(std::pow(h, e_pos) * geometric);
        s1r.push_back(std::pow(h, 1.0 + e_neg) * geometric);
        s2l.push_back(std::pow(h, 1.0 + e_neg) * geometric);
        s2r.push_back(0.5 * std::pow(h, 1.0 + e_neg) * geometric);
        for (long i = last + 1; i <= seq.cutoff() + 1; ++i) {
            const double w = std::pow(2.0, p * i);
            const double a_prev = seq[i - 1];
            const double a = seq[i];
            const double a_next = seq[i + 1];
            if (a != 0.0) {
                s1l.push_back(w * std::pow(a, e_pos));
                s1r.push_back(w * std::pow(a, e_neg) * a_next);
            }
            if (a_prev != 0.0) {
                s2l.push_back(w * std::pow(a_prev, e_neg) * a_next);
                s2r.push_back(0.5 * w * std::pow(a_prev, e_neg) * a);
            }
        }
    }
    const double lhs1 = detail::pairwise_sum(s1l);
    const double rhs1 = std::pow(2.0, pstar) * detail::pairwise_sum(s1r);
    const double lhs2 = detail::pairwise_sum(s2l);
    const double rhs2 = detail::pairwise_sum(s2r);
    auto first = inequality_report("slicing_sum", params, lhs1, rhs1, 1e-12 * std::max(lhs1, rhs1));
    first.constant = std::pow(2.0, pstar);
    auto second = inequality_report("slicing_series", params, lhs2, rhs2, 1e-12 * std::max(lhs2, rhs2));
    second.constant = 0.5;
    for (auto* r : {&first, &second}) {
        r->extras = {{"cutoff", static_cast<double>(seq.cutoff())}, {"head", seq.head}};
    }
    return {first, second};
}

double FlatSet::measure() const
{
    std::set<std::array<int, 2>> unique;
    for (const auto& c : cells) {
        unique.insert(n == 1 ? std::array<int, 2> {c[0], 0} : c);
    }
    return static_cast<double>(unique.size()) * std::pow(h, n);
}

namespace {

// 16-point Gauss-Legendre on [-1, 1] (positive half; symmetric).
constexpr std::array<double, 8> kGx {0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGw {0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss16(double a, double b, const F& f)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double total = 0.0;
    for (int k = 0; k < 8; ++k) {
        total += kGw[k] * (f(mid - half * kGx[k]) + f(mid + half * kGx[k]));
    }
    return half * total;
}

// Integral of |y|^(-2-alpha) over the rectangle [u0,u1] x [v0,v1] avoiding the origin.
double rect_power(double u0, double u1, double v0, double v1, double alpha, int depth = 0)
{
    const double du = u1 - u0;
    const double dv = v1 - v0;
    const double cu = std::clamp(0.0, u0, u1);
    const double cv = std::clamp(0.0, v0, v1);
    const double dist = std::hypot(cu, cv);
    if (depth < 20 && std::max(du, dv) > 0.5 * dist) {
        const double mu = 0.5 * (u0 + u1);
        const double mv = 0.5 * (v0 + v1);
        return rect_power(u0, mu, v0, mv, alpha, depth + 1) + rect_power(mu, u1, v0, mv, alpha, depth + 1)
            + rect_power(u0, mu, mv, v1, alpha, depth + 1) + rect_power(mu, u1, mv, v1, alpha, depth + 1);
    }
    return gauss16(u0, u1, [&](double u) {
        return gauss16(v0, v1, [&](double v) { return std::pow(u * u + v * v, -0.5 * (2.0 + alpha)); });
    });
}

// Integral over the plane outside the rectangle [a0,b0] x [a1,b1] containing the
// origin: polar coordinates give (1/alpha) times the integral of rho(phi)^(-alpha).
double outside_rect(double a0, double b0, double a1, double b1, double alpha)
{
    const std::array<Vec3, 4> corners {Vec3(b0, b1, 0), Vec3(a0, b1, 0), Vec3(a0, a1, 0), Vec3(b0, a1, 0)};
    double total = 0.0;
    // Sides: right (x = b0), top (y = b1), left (x = a0), bottom (y = a1).
    for (int side = 0; side < 4; ++side) {
        const Vec3& p = corners[(side + 3) % 4];
        const Vec3& q = corners[side];
        double phi0 = std::atan2(p.y(), p.x());
        double phi1 = std::atan2(q.y(), q.x());
        while (phi1 < phi0) {
            phi1 += 2.0 * kPi;
        }
        const double dist = side == 0 ? b0 : side == 1 ? b1 : side == 2 ? -a0 : -a1;
        const double normal = side * 0.5 * kPi;
        total += gauss16(phi0, phi1, [&](double phi) { return std::pow(std::cos(phi - normal) / dist, alpha); });
    }
    return total / alpha;
}

} // namespace

InequalityReport check_savin_valdinoci_flat(const FlatSet& E, const Vec3& x, double alpha, double rel_tolerance)
{
    if (E.cells.empty() || !(E.h > 0.0) || (E.n != 1 && E.n != 2)) {
        throw Error(ErrorCode::ParamError, "flat set needs n in {1,2}, h > 0 and at least one cell");
    }
    const int n = E.n;
    const double h = E.h;
    std::set<std::array<int, 2>> cells;
    for (const auto& c : E.cells) {
        cells.insert(n == 1 ? std::array<int, 2> {c[0], 0} : c);
    }
    const double measure = static_cast<double>(cells.size()) * std::pow(h, n);
    const double c = std::pow(ball_volume(n), -alpha / n) * alpha / sphere_measure(n - 1);
    const double lhs = std::pow(measure, -alpha / n);

    const std::array<int, 2> own {static_cast<int>(std::floor(x.x() / h)), n == 1 ? 0 : static_cast<int>(std::floor(x.y() / h))};
    double integral = std::numeric_limits<double>::infinity();
    if (cells.contains(own)) {
        int lo0 = own[0];
        int hi0 = own[0];
        int lo1 = own[1];
        int hi1 = own[1];
        for (const auto& cell : cells) {
            lo0 = std::min(lo0, cell[0]);
            hi0 = std::max(hi0, cell[0]);
            lo1 = std::min(lo1, cell[1]);
            hi1 = std::max(hi1, cell[1]);
        }
        --lo0;
        ++hi0;
        --lo1;
        ++hi1;
        std::vector<double> terms;
        if (n == 1) {
            auto piece = [&](double a, double b) {
                const double da = std::abs(a - x.x());
                const double db = std::abs(b - x.x());
                return std::abs(std::pow(std::min(da, db), -alpha) - std::pow(std::max(da, db), -alpha)) / alpha;
            };
            for (int i = lo0; i <= hi0; ++i) {
                if (!cells.contains({i, 0})) {
                    terms.push_back(piece(i * h, (i + 1) * h));
                }
            }
            terms.push_back(std::pow(x.x() - lo0 * h, -alpha) / alpha + std::pow((hi0 + 1) * h - x.x(), -alpha) / alpha);
        } else {
            for (int i = lo0; i <= hi0; ++i) {
                for (int j = lo1; j <= hi1; ++j) {
                    if (!cells.contains({i, j})) {
                        terms.push_back(rect_power(i * h - x.x(), (i + 1) * h - x.x(), j * h - x.y(), (j + 1) * h - x.y(), alpha));
                    }
                }
            }
            terms.push_back(outside_rect(lo0 * h - x.x(), (hi0 + 1) * h - x.x(), lo1 * h - x.y(), (hi1 + 1) * h - x.y(), alpha));
        }
        integral = detail::pairwise_sum(terms);
    }
    auto r = inequality_report("savin_valdinoci_flat", params_of(n, alpha), lhs, c * integral, rel_tolerance * lhs);
    r.constant = c;
    r.extras = {{"measure_E", measure}, {"complement_integral", integral}};
    return r;
}

} // namespace fmc

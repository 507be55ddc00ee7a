#include "fmc/nonlocal.hpp"

#include "integrate.hpp"
#include "parallel.hpp"

namespace fmc {

namespace {

using detail::Refine;

Refine point_refine(int n)
{
    return n == 1 ? Refine {0.1, 40} : Refine {0.15, 24};
}

Refine pair_refine(int n)
{
    return n == 1 ? Refine {0.25, 40} : Refine {0.5, 8};
}

Refine self_refine(int n)
{
    return n == 1 ? Refine {0.25, 12} : Refine {0.5, 3};
}

void require_interior(const SurfacePoint& x, bool polytope)
{
    if (polytope && x.edge_distance <= 1e-12) {
        throw Error(ErrorCode::NonInteriorPoint, "evaluation point lies on a facet boundary");
    }
}

bool near_edge(const SurfacePoint& x, bool polytope)
{
    return polytope && x.edge_distance < 1e-9;
}

// Node whose cell contains x, or -1.
int owning_node(const SurfaceQuadrature& quad, const SurfacePoint& x)
{
    if (x.node >= 0 && static_cast<std::size_t>(x.node) < quad.size()
        && quad.nodes[x.node].point == x.point) {
        return x.node;
    }
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const auto& node = quad.nodes[i];
        if (quad.polytope && node.facet != x.facet) {
            continue;
        }
        if (cell_contains(node.cell, x.point)) {
            const double d = (node.point - x.point).norm();
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(i);
            }
        }
    }
    return best;
}

CurvatureValue overflow_value(const SurfacePoint& x, CurvatureMethod method)
{
    return {x.point, std::numeric_limits<double>::infinity(), true, method, 0.0};
}

double pair_integral(const SurfaceQuadrature& quad, std::size_t i, std::size_t j, double sigma)
{
    const double expo = quad.n + sigma;
    auto kernel = [expo](const Vec3& a, const Vec3&, const Vec3& b, const Vec3&) {
        return std::pow((a - b).norm(), -expo);
    };
    return detail::integrate_pair(quad.nodes[i].cell, quad.nodes[j].cell, false, kernel, pair_refine(quad.n));
}

// Sum over i < j of term(i, j), rows in parallel, fixed reduction order.
template <class Term>
double upper_pair_sum(std::size_t count, const Term& term)
{
    const auto rows = detail::parallel_map(count, [&](std::size_t i) {
        std::vector<double> row;
        row.reserve(count - i);
        for (std::size_t j = i + 1; j < count; ++j) {
            row.push_back(term(i, j));
        }
        return detail::pairwise_sum(row);
    });
    return detail::pairwise_sum(rows);
}

} // namespace

ScalarField make_field(const SurfaceQuadrature& quad, std::vector<double> values)
{
    if (values.size() != quad.size()) {
        throw Error(ErrorCode::ParamError, "field has " + std::to_string(values.size()) + " values for "
                + std::to_string(quad.size()) + " nodes");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ParamError, "field values must be finite");
        }
    }
    return {&quad, std::move(values), {}};
}

ScalarField sample_field(const SurfaceQuadrature& quad, std::function<double(const Vec3&)> fn)
{
    std::vector<double> values;
    values.reserve(quad.size());
    for (const auto& node : quad.nodes) {
        values.push_back(fn(node.point));
    }
    ScalarField field = make_field(quad, std::move(values));
    field.sampler = std::move(fn);
    return field;
}

ScalarField indicator_field(const SurfaceQuadrature& quad, const NodeSubset& subset)
{
    std::vector<double> values(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        values[i] = subset.contains(i) ? 1.0 : 0.0;
    }
    return make_field(quad, std::move(values));
}

CurvatureValue halpha_chord(const ConvexBody& body, const SurfacePoint& x, double alpha, const GradedHalfRule& rule)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::ParamError, "alpha must lie in (0,1)");
    }
    if (rule.n != body.surface_dim() || (rule.nu - x.normal).norm() > 1e-9 || rule.alpha != alpha) {
        throw Error(ErrorCode::ParamError, "half rule does not match the point normal or alpha");
    }
    require_interior(x, body.is_polytope());
    if (near_edge(x, body.is_polytope())) {
        return overflow_value(x, CurvatureMethod::Chord);
    }
    auto integrate = [&](const std::vector<Vec3>& dirs, const std::vector<double>& weights) {
        std::vector<double> terms(dirs.size());
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            terms[k] = weights[k] * std::pow(chord_length(body, x, dirs[k]), -alpha);
        }
        return detail::pairwise_sum(terms);
    };
    const double value = integrate(rule.directions, rule.weights);
    const double rough = integrate(rule.coarse_directions, rule.coarse_weights);
    return {x.point, value, false, CurvatureMethod::Chord, std::abs(value - rough) / 3.0};
}

CurvatureValue halpha_chord(const ConvexBody& body, const SurfacePoint& x, double alpha, int resolution)
{
    require_interior(x, body.is_polytope());
    return halpha_chord(body, x, alpha, graded_half_rule(body.surface_dim(), x.normal, alpha, resolution));
}

CurvatureValue halpha_boundary(const ConvexBody& body, const SurfacePoint& x, double alpha, const SurfaceQuadrature& quad)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::ParamError, "alpha must lie in (0,1)");
    }
    if (quad.n != body.surface_dim() || quad.polytope != body.is_polytope()) {
        throw Error(ErrorCode::ParamError, "quadrature does not belong to the body");
    }
    require_interior(x, quad.polytope);
    if (near_edge(x, quad.polytope)) {
        return overflow_value(x, CurvatureMethod::Boundary);
    }
    const int n = quad.n;
    const double expo = n + 1 + alpha;
    const Vec3 p = x.point;
    auto kernel = [&](const Vec3& y, const Vec3& nu) {
        const Vec3 d = y - p;
        return d.dot(nu) * std::pow(d.squaredNorm(), -0.5 * expo);
    };
    // On a curved surface x may sit on the shared boundary of several cells;
    // each of them carries the singularity.
    std::vector<char> singular(quad.size(), 0);
    if (!quad.polytope) {
        const int own = owning_node(quad, x);
        for (std::size_t i = 0; i < quad.size(); ++i) {
            singular[i] = static_cast<int>(i) == own || cell_contains(quad.nodes[i].cell, p);
        }
    }
    auto evaluate = [&](const Refine& opt) {
        const auto terms = detail::parallel_map(quad.size(), [&](std::size_t i) {
            const auto& node = quad.nodes[i];
            if (quad.polytope && node.facet == x.facet) {
                return 0.0;
            }
            if (singular[i]) {
                return detail::integrate_singular(node.cell, p, kernel, n - 1 + alpha, opt);
            }
            return detail::integrate_point(node.cell, p, kernel, opt);
        });
        return detail::pairwise_sum(terms);
    };
    const Refine opt = point_refine(n);
    const double value = evaluate(opt);
    const double rough = evaluate(Refine {2.0 * opt.eta, opt.max_depth});
    return {p, value, false, CurvatureMethod::Boundary, std::abs(value - rough)};
}

double frac_perimeter(const SurfaceQuadrature& quad, const NodeSubset& E, double s)
{
    if (!(s > 0.0 && s < 1.0)) {
        throw Error(ErrorCode::ParamError, "s must lie in (0,1)");
    }
    return upper_pair_sum(quad.size(), [&](std::size_t i, std::size_t j) {
        return E.contains(i) != E.contains(j) ? pair_integral(quad, i, j, s) : 0.0;
    });
}

double gagliardo(const ScalarField& field, double s, double p)
{
    if (!(s > 0.0 && s < 1.0) || !(p >= 1.0)) {
        throw Error(ErrorCode::ParamError, "need 0 < s < 1 and p >= 1");
    }
    const SurfaceQuadrature& quad = *field.quad;
    const auto& u = field.values;
    if (!field.sampler) {
        const double half = upper_pair_sum(quad.size(), [&](std::size_t i, std::size_t j) {
            const double jump = std::abs(u[i] - u[j]);
            return jump > 0.0 ? std::pow(jump, p) * pair_integral(quad, i, j, s * p) : 0.0;
        });
        return 2.0 * half;
    }
    const double expo = quad.n + s * p;
    const auto& fn = field.sampler;
    auto kernel = [&](const Vec3& a, const Vec3&, const Vec3& b, const Vec3&) {
        return std::pow(std::abs(fn(a) - fn(b)), p) * std::pow((a - b).norm(), -expo);
    };
    const Refine opt = pair_refine(quad.n);
    const double off = upper_pair_sum(quad.size(), [&](std::size_t i, std::size_t j) {
        return detail::integrate_pair(quad.nodes[i].cell, quad.nodes[j].cell, false, kernel, opt);
    });
    const auto diag = detail::parallel_map(quad.size(), [&](std::size_t i) {
        return detail::integrate_pair(quad.nodes[i].cell, quad.nodes[i].cell, true, kernel, self_refine(quad.n));
    });
    return 2.0 * off + detail::pairwise_sum(diag);
}

PairMatrix::PairMatrix(const SurfaceQuadrature& quad, double sigma)
    : n_(quad.size())
    , sigma_(sigma)
    , data_(n_ * n_, 0.0)
{
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw Error(ErrorCode::ParamError, "pair exponent must lie in (0,1)");
    }
    detail::parallel_map(n_, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            data_[i * n_ + j] = pair_integral(quad, i, j, sigma);
        }
        return 0.0;
    });
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            data_[i * n_ + j] = data_[j * n_ + i];
        }
    }
}

double frac_perimeter(const PairMatrix& pairs, const NodeSubset& E)
{
    return upper_pair_sum(pairs.size(), [&](std::size_t i, std::size_t j) {
        return E.contains(i) != E.contains(j) ? pairs(i, j) : 0.0;
    });
}

double gagliardo(const PairMatrix& pairs, const std::vector<double>& values, double p)
{
    const double half = upper_pair_sum(pairs.size(), [&](std::size_t i, std::size_t j) {
        const double jump = std::abs(values[i] - values[j]);
        return jump > 0.0 ? std::pow(jump, p) * pairs(i, j) : 0.0;
    });
    return 2.0 * half;
}

double double_layer(const SurfaceQuadrature& quad, const SurfacePoint& x, const Restriction& restrict)
{
    require_interior(x, quad.polytope);
    if (restrict.kind == Restriction::Kind::Subset && restrict.subset->mask.size() != quad.size()) {
        throw Error(ErrorCode::ParamError, "subset does not match the quadrature");
    }
    const int n = quad.n;
    const Vec3 p = x.point;
    auto kernel = [&](const Vec3& y, const Vec3& nu) {
        const Vec3 d = y - p;
        return d.dot(nu) * std::pow(d.squaredNorm(), -0.5 * (n + 1));
    };
    auto selected = [&](std::size_t i) {
        switch (restrict.kind) {
        case Restriction::Kind::All: return true;
        case Restriction::Kind::Subset: return restrict.subset->contains(i);
        case Restriction::Kind::Ball: return (quad.nodes[i].point - p).norm() < restrict.radius + quad.nodes[i].spacing;
        }
        return false;
    };
    const int own = quad.polytope ? -1 : owning_node(quad, x);
    const Refine opt = point_refine(n);
    const auto terms = detail::parallel_map(quad.size(), [&](std::size_t i) {
        const auto& node = quad.nodes[i];
        if (!selected(i) || (quad.polytope && node.facet == x.facet)) {
            return 0.0;
        }
        if (static_cast<int>(i) == own) {
            return detail::integrate_singular(node.cell, p, kernel, n - 1.0, opt);
        }
        if (restrict.kind == Restriction::Kind::Ball) {
            return detail::integrate_clipped(node.cell, p, restrict.radius, kernel, opt);
        }
        return detail::integrate_point(node.cell, p, kernel, opt);
    });
    return detail::pairwise_sum(terms);
}

double tail_integral(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E, double sp)
{
    if (E.mask.size() != quad.size()) {
        throw Error(ErrorCode::ParamError, "subset does not match the quadrature");
    }
    const int own = owning_node(quad, x);
    if (own < 0 || !E.contains(static_cast<std::size_t>(own))) {
        throw Error(ErrorCode::ParamError, "tail integral needs x in E");
    }
    const double expo = quad.n + sp;
    const Vec3 p = x.point;
    auto kernel = [&](const Vec3& y, const Vec3&) { return std::pow((y - p).norm(), -expo); };
    const Refine opt = point_refine(quad.n);
    const auto terms = detail::parallel_map(quad.size(), [&](std::size_t i) {
        return E.contains(i) ? 0.0 : detail::integrate_point(quad.nodes[i].cell, p, kernel, opt);
    });
    return detail::pairwise_sum(terms);
}

} // namespace fmc

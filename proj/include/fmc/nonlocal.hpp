#pragma once

#include "fmc/geometry.hpp"
#include "fmc/quadrature.hpp"

#include <functional>
#include <vector>

namespace fmc {

/// A function on the boundary: one value per quadrature node, plus an optional
/// sampler for evaluating it between nodes. Without a sampler the field is
/// piecewise constant on the node cells.
struct ScalarField {
    const SurfaceQuadrature* quad = nullptr;
    std::vector<double> values;
    std::function<double(const Vec3&)> sampler;
};

/// Throws ParamError on a size mismatch or non-finite values.
ScalarField make_field(const SurfaceQuadrature& quad, std::vector<double> values);
ScalarField sample_field(const SurfaceQuadrature& quad, std::function<double(const Vec3&)> fn);
ScalarField indicator_field(const SurfaceQuadrature& quad, const NodeSubset& subset);

enum class CurvatureMethod { Chord, Boundary };

struct CurvatureValue {
    Vec3 x = Vec3::Zero();
    double value = 0.0;
    bool overflow = false; ///< x lies within 1e-9 of a facet boundary; value is +inf
    CurvatureMethod method = CurvatureMethod::Chord;
    double estimated_error = 0.0;
};

/// H_alpha(x) as the integral of chord^(-alpha) over the inward half-sphere.
/// The rule must be built for (surface_dim, x.normal, alpha).
CurvatureValue halpha_chord(const ConvexBody& body, const SurfacePoint& x, double alpha, const GradedHalfRule& rule);
CurvatureValue halpha_chord(const ConvexBody& body, const SurfacePoint& x, double alpha, int resolution = 0);

/// H_alpha(x) as the boundary integral of (y - x).nu(y) / |y - x|^(n+1+alpha).
CurvatureValue halpha_boundary(
    const ConvexBody& body, const SurfacePoint& x, double alpha, const SurfaceQuadrature& quad);

/// Fractional perimeter of the node set E relative to the boundary.
double frac_perimeter(const SurfaceQuadrature& quad, const NodeSubset& E, double s);

/// p-th power of the W^{s,p} Gagliardo semi-norm (the full double integral).
double gagliardo(const ScalarField& field, double s, double p);

/// Integrals of |y1 - y2|^-(n + sigma) over all ordered pairs of distinct node
/// cells, for repeated perimeter evaluations on the same mesh.
class PairMatrix {
public:
    PairMatrix(const SurfaceQuadrature& quad, double sigma);
    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double sigma() const { return sigma_; }

private:
    std::size_t n_;
    double sigma_;
    std::vector<double> data_;
};

double frac_perimeter(const PairMatrix& pairs, const NodeSubset& E);
/// Semi-norm of a piecewise-constant field; pairs.sigma() must equal s * p.
double gagliardo(const PairMatrix& pairs, const std::vector<double>& values, double p);

/// Node selection for double_layer.
struct Restriction {
    enum class Kind { All, Subset, Ball } kind = Kind::All;
    const NodeSubset* subset = nullptr;
    double radius = 0.0;

    static Restriction all() { return {}; }
    static Restriction nodes(const NodeSubset& s) { return {Kind::Subset, &s, 0.0}; }
    static Restriction ball(double r) { return {Kind::Ball, nullptr, r}; }
};

/// Principal-value double-layer integral of (y - x).nu(y) / |y - x|^(n+1).
double double_layer(const SurfaceQuadrature& quad, const SurfacePoint& x, const Restriction& restrict = {});

/// Integral over the complement of E of |x - y|^-(n + sp); x must lie in E.
double tail_integral(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E, double sp);

} // namespace fmc

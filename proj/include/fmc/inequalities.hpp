#pragma once

#include "fmc/nonlocal.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fmc {

/// Where the constant of a check comes from.
enum class Provenance { PaperExplicit, Fitted };
std::string_view to_string(Provenance provenance);

/// Outcome of one verified statement. Inequalities read lhs <= rhs and pass when
/// margin = rhs - lhs >= -tolerance; identities pass when margin = |lhs - rhs|
/// <= tolerance.
struct InequalityReport {
    std::string name;
    std::string body;
    Params params;
    bool identity = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 1.0;
    Provenance provenance = Provenance::PaperExplicit;
    double margin = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    int resolution = 0;
    double estimated_error = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> extras;
    std::string note;
};

InequalityReport inequality_report(std::string name, const Params& params, double lhs, double rhs, double tolerance);
InequalityReport identity_report(std::string name, const Params& params, double lhs, double rhs, double tolerance);

/// H_alpha at every quadrature node by the chord formula.
std::vector<double> node_curvatures(
    const ConvexBody& body, const SurfaceQuadrature& quad, double alpha, int half_resolution = 0);

// --- double layer and curvature bounds -------------------------------------

/// Worst deviation of double_layer(x, all) from |S^n|/2 over the points.
InequalityReport check_gauss_law(
    const SurfaceQuadrature& quad, std::span<const SurfacePoint> points, double tolerance = 0.02 * std::numbers::pi);

/// double_layer(x, E) <= |E|^(a/(n+a)) H_a(x)^(n/(n+a)).
InequalityReport check_curvature_interpolation(
    const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E, double alpha, double halpha_x);

/// (a) |boundary|^(-a/n) <= C H_a(x) at every node (worst node reported) and
/// (b) |boundary|^((n-s)/n) <= C^(s/a) sum_x w H_a(x)^(s/a), C = (2/|S^n|)^((n+a)/n).
std::array<InequalityReport, 2> check_pointwise_global(
    const SurfaceQuadrature& quad, std::span<const double> halpha_nodes, double alpha, double s);

/// Identity |S^n|/2 = double_layer(x, B_R) + |Omega cap dB_R(x)| / R^n and the bound
/// |S^n|/2 <= |dOmega cap B_R|^(a/(n+a)) H_a(x)^(n/(n+a)) + |Omega cap dB_R(x)| / R^n.
std::array<InequalityReport, 2> check_localized_identity(const ConvexBody& body, const SurfaceQuadrature& quad,
    const SurfacePoint& x, double radius, double alpha, double halpha_x, double tolerance = 0.02);

/// cap * R / patch^((n+1)/n); infinity when the patch is empty.
double reverse_isoperimetric_ratio(const ConvexBody& body, const SurfaceQuadrature& quad, const SurfacePoint& x, double radius);
/// |Omega cap dB_R(x)| <= (C/R) |dOmega cap B_R(x)|^((n+1)/n) with a fitted C.
InequalityReport check_reverse_isoperimetric(
    const ConvexBody& body, const SurfaceQuadrature& quad, const SurfacePoint& x, double radius, double fitted_c);

/// |dOmega cap B_R(x)| <= |S^n| R^n.
InequalityReport check_perimeter_growth(const SurfaceQuadrature& quad, const Vec3& x, double radius);
/// |dOmega| <= |S^n| diam^n / 2^n (equality for balls).
InequalityReport check_rosenthal_szasz(const ConvexBody& body);
/// |Omega| <= |B^(n+1)| diam^(n+1) / 2^(n+1).
InequalityReport check_isodiametric_volume(const ConvexBody& body);
/// Integral of |<sigma,tau>| over S^n equals 2 |B^n|.
InequalityReport check_abs_cosine(const SphericalRule& rule, const Vec3& tau, double tolerance);
/// |dK| = (1/|B^n|) integral of |K_sigma| over S^n for polytopes.
InequalityReport check_cauchy_formula(const ConvexBody& polytope, const SphericalRule& rule, double rel_tolerance = 0.01);

// --- subsets ------------------------------------------------------------------

/// tail(x, E) >= tail(x, metric patch of the same measure).
InequalityReport check_rearrangement(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E, double sp);

/// Case split of the pointwise subset inequality. delta and T follow the
/// explicit formulas of its proof with the reverse-isoperimetric constant c_n.
struct Dichotomy {
    double delta = 0.0;
    double T = 0.0;
    double radius = 0.0;  ///< R with |dOmega cap B_R(x)| = |E|
    double patch_R = 0.0;
    double patch_TR = 0.0;
    int branch = 0; ///< 1: low density at R; 2: low density at TR; 3: high density at both
};
Dichotomy classify_dichotomy(const SurfaceQuadrature& quad, const Vec3& x, double measure_e, double c_n);

/// |E|^(-sp/n) / (tail(x, E) + H_a(x)^(sp/a)).
double pointwise_subset_ratio(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E,
    const Params& params, double halpha_x);
/// |E|^(-sp/n) <= C (tail(x, E) + H_a(x)^(sp/a)) with a fitted C; records the branch.
InequalityReport check_pointwise_subset(const SurfaceQuadrature& quad, const SurfacePoint& x, const NodeSubset& E,
    const Params& params, double halpha_x, double fitted_c, double c_n);

/// |E|^((n-s)/n) / (Per_s(E) + sum_E w H^(s/a)); `pairs` must use sigma = s.
double set_sobolev_ratio(const SurfaceQuadrature& quad, const PairMatrix& pairs, const NodeSubset& E,
    const Params& params, std::span<const double> halpha_nodes);
InequalityReport check_set_sobolev(const SurfaceQuadrature& quad, const PairMatrix& pairs, const NodeSubset& E,
    const Params& params, std::span<const double> halpha_nodes, double fitted_c);

/// ||u||_{p*}^p / (gagliardo/2 + sum w H^(sp/a) |u|^p); `pairs` must use sigma = s p.
double function_sobolev_ratio(const SurfaceQuadrature& quad, const PairMatrix& pairs, std::span<const double> u,
    const Params& params, std::span<const double> halpha_nodes);
InequalityReport check_function_sobolev(const SurfaceQuadrature& quad, const PairMatrix& pairs,
    std::span<const double> u, const Params& params, std::span<const double> halpha_nodes, double fitted_c);

/// gagliardo(u, s, 1) / 2 against the layer-cake integral of Per_s({u > t}),
/// scanned at `thresholds` interval midpoints over the range of u.
InequalityReport check_coarea(const PairMatrix& pairs, std::span<const double> u, int thresholds = 64,
    double rel_tolerance = 0.02);

/// Both sides of the level-set estimate for a non-negative field: bracket =
/// gagliardo/2 + sum w H^(sp/a) u^p and series = sum over a_(i-1) != 0 of
/// 2^(pi) a_(i-1)^(-sp/n) a_i, with a_i = |{u > 2^i}|; `pairs` must use sigma = s p.
struct LevelSetSides {
    double bracket = 0.0;
    double series = 0.0;
};
LevelSetSides level_set_sides(const SurfaceQuadrature& quad, const PairMatrix& pairs, std::span<const double> u,
    const Params& params, std::span<const double> halpha_nodes);
/// series <= C bracket with a fitted C.
InequalityReport check_level_set_series(const SurfaceQuadrature& quad, const PairMatrix& pairs,
    std::span<const double> u, const Params& params, std::span<const double> halpha_nodes, double fitted_c);

// --- sequences and flat sets --------------------------------------------------

/// a_i = head for i < first, a_i = window[i - first] on the window, a_i = 0 from
/// first + window.size() on.
struct SlicingSequence {
    double head = 1.0;
    int first = 0;
    std::vector<double> window;

    int cutoff() const { return first + static_cast<int>(window.size()); }
    double operator[](long i) const;
    /// Throws InvalidSequence unless non-negative, finite and non-increasing.
    void validate() const;
};

/// (1) sum 2^(pi) a_i^((n-sp)/n) <= 2^(p*) sum_{a_i != 0} 2^(pi) a_i^(-sp/n) a_(i+1);
/// (2) sum_{a_(i-1) != 0} 2^(pi) a_(i-1)^(-sp/n) a_(i+1) <= 1/2 sum_{a_(i-1) != 0} 2^(pi) a_(i-1)^(-sp/n) a_i.
std::array<InequalityReport, 2> check_slicing(const SlicingSequence& seq, const Params& params);

/// Union of lattice cells of side h in R^n: cell (i, j) is [ih, (i+1)h] x [jh, (j+1)h]
/// (the second index is ignored for n = 1).
struct FlatSet {
    int n = 2;
    double h = 1.0;
    std::vector<std::array<int, 2>> cells;

    double measure() const;
};

/// |E|^(-a/n) <= C integral over R^n \ E of |x - y|^(-n-a), C = |B^n|^(-a/n) a / |S^(n-1)|.
InequalityReport check_savin_valdinoci_flat(const FlatSet& E, const Vec3& x, double alpha, double rel_tolerance = 0.01);

} // namespace fmc

#include "fmc/quadrature.hpp"

#include "fmc/geometry.hpp"
#include "parallel.hpp"

#include <map>
#include <mutex>

namespace fmc {

namespace {

constexpr double kPi = std::numbers::pi;

// Node angles and cell bounds of the graded rule on (0, pi/2). Each node is the
// mean-value point of theta^(-alpha) over its cell, so the model singularity is
// integrated exactly even in the first cell.
void graded_cells(double alpha, int cells, std::vector<double>& nodes, std::vector<double>& lo,
    std::vector<double>& hi)
{
    const double exponent = 1.0 / (1.0 - alpha);
    for (int k = 0; k < cells; ++k) {
        const double t0 = 0.5 * kPi * std::pow(static_cast<double>(k) / cells, exponent);
        const double t1 = 0.5 * kPi * std::pow(static_cast<double>(k + 1) / cells, exponent);
        const double mean = (std::pow(t1, 1.0 - alpha) - std::pow(t0, 1.0 - alpha)) / ((1.0 - alpha) * (t1 - t0));
        nodes.push_back(std::pow(mean, -1.0 / alpha));
        lo.push_back(t0);
        hi.push_back(t1);
    }
}

GradedHalfRule graded_circle_nodes(const Vec3& nu, double alpha, int resolution)
{
    GradedHalfRule rule;
    rule.n = 1;
    rule.nu = nu;
    rule.alpha = alpha;
    rule.exponent = 1.0 / (1.0 - alpha);
    const int half = 2 * ((resolution + 3) / 4);
    rule.resolution = 2 * half;
    std::vector<double> nodes;
    std::vector<double> lo;
    std::vector<double> hi;
    graded_cells(alpha, half, nodes, lo, hi);
    const Vec3 tangent(-nu.y(), nu.x(), 0.0);
    for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < half; ++k) {
            const double theta = side == 0 ? nodes[k] : kPi - nodes[k];
            rule.directions.push_back(std::cos(theta) * tangent - std::sin(theta) * nu);
            rule.weights.push_back(hi[k] - lo[k]);
        }
    }
    return rule;
}

GradedHalfRule graded_hemisphere_nodes(double alpha, int resolution)
{
    GradedHalfRule rule;
    rule.n = 2;
    rule.nu = Vec3::UnitZ();
    rule.alpha = alpha;
    rule.exponent = 1.0 / (1.0 - alpha);
    const int m_theta = 2 * ((resolution + 1) / 2);
    const int m_psi = 2 * m_theta;
    rule.resolution = m_theta;
    std::vector<double> nodes;
    std::vector<double> lo;
    std::vector<double> hi;
    graded_cells(alpha, m_theta, nodes, lo, hi);
    const double dpsi = 2.0 * kPi / m_psi;
    for (int j = 0; j < m_psi; ++j) {
        const double psi = (j + 0.5) * dpsi;
        const Vec3 horizontal(std::cos(psi), std::sin(psi), 0.0);
        for (int k = 0; k < m_theta; ++k) {
            const double theta = nodes[k];
            rule.directions.push_back(std::cos(theta) * horizontal - std::sin(theta) * Vec3::UnitZ());
            rule.weights.push_back((std::sin(hi[k]) - std::sin(lo[k])) * dpsi);
        }
    }
    return rule;
}

GradedHalfRule graded_circle(const Vec3& nu, double alpha, int resolution)
{
    GradedHalfRule rule = graded_circle_nodes(nu, alpha, resolution);
    const GradedHalfRule coarse = graded_circle_nodes(nu, alpha, rule.resolution / 2);
    rule.coarse_directions = coarse.directions;
    rule.coarse_weights = coarse.weights;
    return rule;
}

GradedHalfRule graded_hemisphere_at_pole(double alpha, int resolution)
{
    GradedHalfRule rule = graded_hemisphere_nodes(alpha, resolution);
    const GradedHalfRule coarse = graded_hemisphere_nodes(alpha, std::max(2, rule.resolution / 2));
    rule.coarse_directions = coarse.directions;
    rule.coarse_weights = coarse.weights;
    return rule;
}

const GradedHalfRule& cached_pole_rule(double alpha, int resolution)
{
    static std::mutex mutex;
    static std::map<std::pair<double, int>, GradedHalfRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find({alpha, resolution});
    if (it == cache.end()) {
        it = cache.emplace(std::pair{alpha, resolution}, graded_hemisphere_at_pole(alpha, resolution)).first;
    }
    return it->second;
}

} // namespace

SphericalRule sphere_rule(int n, int resolution)
{
    SphericalRule rule;
    rule.n = n;
    if (n == 1) {
        if (resolution < 8) {
            throw Error(ErrorCode::ResolutionTooLow, "circle rule needs at least 8 directions");
        }
        for (int k = 0; k < resolution; ++k) {
            const double t = 2.0 * kPi * k / resolution;
            rule.directions.emplace_back(std::cos(t), std::sin(t), 0.0);
            rule.weights.push_back(2.0 * kPi / resolution);
        }
        return rule;
    }
    if (n != 2) {
        throw Error(ErrorCode::ParamError, "sphere rules exist for n = 1 and n = 2");
    }
    if (resolution < 1) {
        throw Error(ErrorCode::ResolutionTooLow, "sphere rule needs at least 1 subdivision");
    }
    const auto quad = surface_quadrature(sphere_ball(1.0), resolution);
    for (const auto& node : quad.nodes) {
        rule.directions.push_back(node.normal);
        rule.weights.push_back(node.weight);
    }
    return rule;
}

double abs_cosine_integral(const SphericalRule& rule, const Vec3& tau)
{
    std::vector<double> terms(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        terms[i] = rule.weights[i] * std::abs(rule.directions[i].dot(tau));
    }
    return detail::pairwise_sum(terms);
}

GradedHalfRule graded_half_rule(int n, const Vec3& nu, double alpha, int resolution)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::ParamError, "alpha must lie in (0,1)");
    }
    if (std::abs(nu.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::ParamError, "normal must be a unit vector");
    }
    if (n == 1) {
        if (std::abs(nu.z()) > 1e-12) {
            throw Error(ErrorCode::ParamError, "circle rules need a normal in the xy-plane");
        }
        return graded_circle(nu, alpha, resolution > 0 ? resolution : kDefaultHalfResolution1);
    }
    if (n != 2) {
        throw Error(ErrorCode::ParamError, "half rules exist for n = 1 and n = 2");
    }
    const GradedHalfRule& base = cached_pole_rule(alpha, resolution > 0 ? resolution : kDefaultHalfResolution2);
    Eigen::Matrix3d rot;
    if (nu.z() < -1.0 + 1e-12) {
        rot = Eigen::AngleAxisd(kPi, Vec3::UnitX()).toRotationMatrix();
    } else {
        rot = Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), nu).toRotationMatrix();
    }
    GradedHalfRule rule = base;
    rule.nu = nu;
    for (auto& d : rule.directions) {
        d = rot * d;
    }
    for (auto& d : rule.coarse_directions) {
        d = rot * d;
    }
    return rule;
}

} // namespace fmc

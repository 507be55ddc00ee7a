#include "fmc/flow.hpp"
#include "fmc/io.hpp"
#include "fmc/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace fmc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Clock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Unit-disk H_alpha from the Beta-function reduction 2^(-a) B((1-a)/2, 1/2).
double disk_halpha(double alpha)
{
    return std::pow(2.0, -alpha) * std::beta(0.5 * (1.0 - alpha), 0.5);
}

std::vector<int> spread(std::size_t size, int count)
{
    std::vector<int> out;
    const int n = static_cast<int>(size);
    for (int k = 0; k < std::min(count, n); ++k) {
        out.push_back(static_cast<int>((k * static_cast<long>(n)) / std::min(count, n)));
    }
    return out;
}

std::vector<const InequalityReport*> select(const SuiteResult& result, std::initializer_list<std::string_view> names)
{
    std::vector<const InequalityReport*> out;
    for (const auto& r : result.reports) {
        if (std::find(names.begin(), names.end(), r.name) != names.end()) {
            out.push_back(&r);
        }
    }
    return out;
}

int count_failed(const std::vector<const InequalityReport*>& reports)
{
    return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](auto* r) { return !r->pass; }));
}

double extra(const InequalityReport& r, std::string_view key)
{
    for (const auto& [k, v] : r.extras) {
        if (k == key) {
            return v;
        }
    }
    return std::nan("");
}

Outcome gauss_law()
{
    Outcome out;
    const Clock clock;
    const ConvexBody gon = regular_polygon(512, 1.0);
    const auto quad = surface_quadrature(gon, suite_resolution(gon));
    std::vector<SurfacePoint> points;
    for (int node : spread(quad.size(), 16)) {
        points.push_back(surface_point(quad, node));
    }
    const auto disk_report = check_gauss_law(quad, points, 1e-3);

    const ConvexBody ico = icosahedron();
    const auto iquad = surface_quadrature(ico, suite_resolution(ico));
    std::vector<SurfacePoint> ipoints;
    for (int node : spread(iquad.size(), 16)) {
        ipoints.push_back(surface_point(iquad, node));
    }
    const auto ico_report = check_gauss_law(iquad, ipoints, 0.02 * 2.0 * kPi);
    const double elapsed = clock.seconds();

    out.pass = disk_report.pass && ico_report.pass && elapsed < 5.0;
    out.detail = fmt("512-gon worst |value - pi| %.2e (16 points); icosahedron worst rel %.2e; %.2f s",
        std::abs(disk_report.lhs - disk_report.rhs), std::abs(ico_report.lhs - ico_report.rhs) / (2.0 * kPi), elapsed);
    return out;
}

Outcome abs_cosine()
{
    Outcome out;
    const auto circle = sphere_rule(1, 720);
    const auto sphere = sphere_rule(2, 5);
    Rng rng(derive_seed(0, 2));
    double worst1 = 0.0;
    double worst2 = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const auto r1 = check_abs_cosine(circle, Vec3(std::cos(phi), std::sin(phi), 0.0), 1e-3);
        const double z = rng.uniform(-1.0, 1.0);
        const double rho = std::sqrt(1.0 - z * z);
        const auto r2 = check_abs_cosine(sphere, Vec3(rho * std::cos(phi), rho * std::sin(phi), z), 0.01 * 2.0 * kPi);
        out.pass = out.pass && r1.pass && r2.pass;
        worst1 = std::max(worst1, std::abs(r1.lhs - 4.0));
        worst2 = std::max(worst2, std::abs(r2.lhs - 2.0 * kPi) / (2.0 * kPi));
    }
    out.detail = fmt("n=1 worst |I - 4| %.2e; n=2 worst |I - 2pi|/2pi %.2e (8 directions each)", worst1, worst2);
    return out;
}

Outcome cross_validation()
{
    Outcome out;
    double worst_dev = 0.0;
    std::string worst_body;
    for (const auto& name : fixture_names()) {
        const ConvexBody body = named_fixture(name);
        const int n = body.surface_dim();
        const auto quad = surface_quadrature(body, suite_resolution(body, n == 1 ? 3 : 2));
        const auto probe = surface_quadrature(body, suite_resolution(body));
        for (double alpha : {0.25, 0.5, 0.75}) {
            for (int node : spread(probe.size(), 4)) {
                const SurfacePoint x = surface_point(probe, node);
                const double chord = halpha_chord(body, x, alpha).value;
                const double boundary = halpha_boundary(body, x, alpha, quad).value;
                const double dev = std::abs(chord - boundary) / std::abs(chord);
                if (dev > worst_dev) {
                    worst_dev = dev;
                    worst_body = name;
                }
            }
        }
    }

    const ConvexBody unit = disk(1.0);
    const auto dq = surface_quadrature(unit, suite_resolution(unit));
    const double oracle = disk_halpha(0.5);
    const double value = halpha_chord(unit, surface_point(dq, 0), 0.5).value;
    const double disk_err = std::abs(value - oracle) / oracle;

    double worst_scale = 0.0;
    for (const auto& name : fixture_names()) {
        const ConvexBody body = named_fixture(name);
        const auto probe = surface_quadrature(body, suite_resolution(body));
        const SurfacePoint x = surface_point(probe, spread(probe.size(), 3)[1]);
        const double base = halpha_chord(body, x, 0.5).value;
        for (double lambda : {0.5, 2.0}) {
            const ConvexBody big = scaled(body, lambda);
            const double value_scaled = halpha_chord(big, locate(big, lambda * x.point), 0.5).value;
            worst_scale = std::max(worst_scale, std::abs(value_scaled / (std::pow(lambda, -0.5) * base) - 1.0));
        }
    }

    out.pass = worst_dev < 0.01 && disk_err < 0.005 && worst_scale < 0.005;
    out.detail = fmt("chord vs boundary worst %.2e (%s); disk %.6f vs oracle %.6f (rel %.1e); homogeneity worst %.1e",
        worst_dev, worst_body.c_str(), value, oracle, disk_err, worst_scale);
    return out;
}

Outcome pointwise(const SuiteResult& section2, double seconds)
{
    Outcome out;
    const auto global = select(section2, {"pointwise_global"});
    const auto af = select(section2, {"aleksandrov_fenchel"});
    std::set<std::string> bodies;
    std::set<double> alphas;
    double min_margin = std::numeric_limits<double>::infinity();
    for (auto* r : global) {
        bodies.insert(r->body);
        alphas.insert(r->params.alpha);
        min_margin = std::min(min_margin, r->margin);
    }
    const int failed = count_failed(global) + count_failed(af);
    out.pass = failed == 0 && min_margin > 0.0 && bodies.size() >= 100 && alphas.size() == 3 && !af.empty()
        && seconds < 120.0;
    out.detail = fmt("%zu bodies x %zu alphas, %zu pointwise + %zu integrated records, %d failed, min margin %.3e; "
                     "section run %.1f s",
        bodies.size(), alphas.size(), global.size(), af.size(), failed, min_margin, seconds);
    return out;
}

Outcome appendix(const SuiteResult& result)
{
    Outcome out;
    const auto cauchy = select(result, {"cauchy_formula"});
    const auto rs = select(result, {"rosenthal_szasz"});
    const auto iso = select(result, {"isodiametric_volume"});

    std::vector<InequalityReport> named = {check_cauchy_formula(rectangle(1.0, 1.0), sphere_rule(1, 720)),
        check_cauchy_formula(box(1.0, 1.0, 1.0), sphere_rule(2, 3))};
    const bool named_ok = std::all_of(named.begin(), named.end(), [](const auto& r) { return r.pass; });

    int balls = 0;
    bool ball_equality = true;
    for (auto* r : rs) {
        if (r->body.rfind("ball", 0) == 0 || r->body.rfind("disk", 0) == 0) {
            ++balls;
            ball_equality = ball_equality && std::abs(r->margin) <= r->tolerance;
        }
    }
    const int failed = count_failed(cauchy) + count_failed(rs) + count_failed(iso);
    out.pass = named_ok && failed == 0 && balls > 0 && ball_equality && !cauchy.empty() && !iso.empty();
    out.detail = fmt("cauchy %zu corpus + square + cube (%s); rosenthal-szasz %zu, equality on %d balls; "
                     "isodiametric %zu; %d failed",
        cauchy.size(), named_ok ? "ok" : "FAILED", rs.size(), balls, iso.size(), failed);
    return out;
}

Outcome slicing(const SuiteResult& section4)
{
    Outcome out;
    const auto reports = select(section4, {"slicing_sum", "slicing_series"});
    std::set<std::uint64_t> seeds;
    std::set<std::tuple<int, double, double>> combos;
    const InequalityReport* worked = nullptr;
    for (auto* r : reports) {
        if (r->body == "worked-example") {
            if (r->name == "slicing_sum") {
                worked = r;
            }
            continue;
        }
        seeds.insert(r->seed);
        combos.insert({r->params.n, r->params.s, r->params.p});
    }
    const double expect = std::pow(2.0, 4.0 / 3.0);
    const bool worked_ok = worked && worked->lhs == 2.0 && std::abs(worked->rhs - expect) <= 1e-14 * expect;
    const int failed = count_failed(reports);
    int admissible = 0;
    for (int n : {1, 2}) {
        for (double s : {0.25, 0.5, 0.75}) {
            for (double p : {1.0, 1.5, 2.0}) {
                admissible += n > s * p ? 1 : 0;
            }
        }
    }
    out.pass = failed == 0 && seeds.size() == 1000 && static_cast<int>(combos.size()) == admissible && worked_ok;
    out.detail = fmt("%zu sequences over %zu of %d admissible (n, s, p), %d violations; worked example %.15g vs %.15g",
        seeds.size(), combos.size(), admissible, failed, worked ? worked->lhs : std::nan(""), worked ? worked->rhs : std::nan(""));
    return out;
}

Outcome coarea(const SuiteResult& section4)
{
    Outcome out;
    const auto reports = select(section4, {"coarea"});
    std::map<std::string, int> smooth;
    int indicators = 0;
    double worst_smooth = 0.0;
    double worst_indicator = 0.0;
    for (auto* r : reports) {
        const double rel = std::abs(r->lhs - r->rhs) / std::max(std::abs(r->rhs), 1e-300);
        if (r->note == "indicator field") {
            ++indicators;
            worst_indicator = std::max(worst_indicator, std::abs(r->lhs - r->rhs));
            out.pass = out.pass && r->pass && std::abs(r->lhs - r->rhs) <= 1e-10 * std::max(1.0, std::abs(r->rhs));
        } else {
            ++smooth[r->body.substr(0, r->body.find('-'))];
            worst_smooth = std::max(worst_smooth, rel);
            out.pass = out.pass && r->pass && rel <= 0.02;
        }
    }
    const bool counts = smooth.size() == 2
        && std::all_of(smooth.begin(), smooth.end(), [](const auto& kv) { return kv.second >= 10; });
    out.pass = out.pass && counts && indicators > 0;
    out.detail = fmt("%d smooth fields on %zu meshes, worst rel %.2e; %d indicator fields, worst abs %.1e",
        static_cast<int>(reports.size()) - indicators, smooth.size(), worst_smooth, indicators, worst_indicator);
    return out;
}

Outcome sobolev(const SuiteResult& section3, const SuiteResult& section4)
{
    Outcome out;
    const auto s4 = select(section4, {"set_sobolev", "function_sobolev", "fitted_constant_drift"});
    const auto s3 = select(section3, {"pointwise_subset", "fitted_constant_drift"});
    const auto rearr = select(section3, {"rearrangement"});
    double worst_drift = 0.0;
    int groups = 0;
    for (const auto& list : {s3, s4}) {
        for (auto* r : list) {
            if (r->name == "fitted_constant_drift"
                && (r->body.rfind("set_sobolev", 0) == 0 || r->body.rfind("function_sobolev", 0) == 0
                    || r->body.rfind("pointwise_subset", 0) == 0)) {
                ++groups;
                worst_drift = std::max(worst_drift, std::abs(r->lhs - r->rhs) / r->rhs);
            }
        }
    }
    const int failed = count_failed(s3) + count_failed(s4) + count_failed(rearr);
    out.pass = failed == 0 && groups > 0 && worst_drift < 0.05 && rearr.size() == 200;
    out.detail = fmt("%zu records, %d fitted groups, worst drift %.2f%%; rearrangement %zu subsets; %d failed",
        s3.size() + s4.size(), groups, 100.0 * worst_drift, rearr.size(), failed);
    return out;
}

Outcome flow()
{
    Outcome out;
    const double alpha = 0.5;
    double slowest = 0.0;
    bool decay_all = true;
    auto run = [&](const ConvexBody& body) {
        const Clock clock;
        FlowTrace trace = fmcf_run(body, alpha);
        slowest = std::max(slowest, clock.seconds());
        const auto decay = check_decay_and_bounds(trace);
        decay_all = decay_all && decay.pass;
        return std::make_pair(std::move(trace), decay);
    };

    const double oracle = 1.0 / ((1.0 + alpha) * disk_halpha(alpha));
    const auto [circle, circle_decay] = run(disk(1.0));
    const double circle_err = std::abs(circle.T_star_num - oracle) / oracle;
    const auto circle_fv = check_first_variation(circle);

    // Least-squares slope of log T* against log lambda.
    double worst_exponent = 0.0;
    for (const ConvexBody& base : {disk(1.0), rectangle(1.0, 1.0)}) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (double lambda : {0.5, 1.0, 2.0}) {
            const double t = run(scaled(base, lambda)).first.T_star_num;
            const double lx = std::log(lambda), ly = std::log(t);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
        worst_exponent = std::max(worst_exponent, std::abs(slope - (1.0 + alpha)));
    }

    const auto [square, square_decay] = run(named_fixture("square"));
    const auto square_fv = check_first_variation(square);
    const auto [thin, thin_decay] = run(named_fixture("thinrect"));
    const double spread_perimeter
        = std::abs(std::log(extra(thin_decay, "ratio_perimeter") / extra(square_decay, "ratio_perimeter")));
    const double spread_diameter
        = std::abs(std::log(extra(thin_decay, "ratio_diameter") / extra(square_decay, "ratio_diameter")));

    const double fv_worst = std::max(extra(circle_fv, "max_rel_error"), extra(square_fv, "max_rel_error"));
    out.pass = circle_err < 0.02 && worst_exponent <= 0.05 && circle_fv.pass && square_fv.pass && fv_worst <= 0.05
        && decay_all && spread_perimeter < spread_diameter && slowest < 180.0;
    out.detail = fmt("circle T* %.5f vs %.5f (rel %.1e); exponent error %.3f; first variation worst %.2e; "
                     "decay on all runs %s; |log ratio| thin/square perimeter %.2f vs diameter %.2f; slowest run %.1f s",
        circle.T_star_num, oracle, circle_err, worst_exponent, fv_worst, decay_all ? "yes" : "no", spread_perimeter,
        spread_diameter, slowest);
    return out;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome verify_all(const std::string& cli)
{
    Outcome out;
    const auto dir = std::filesystem::temp_directory_path() / "fmc_acceptance";
    std::filesystem::create_directories(dir);
    std::vector<std::string> runs;
    std::vector<int> codes;
    for (int k = 0; k < 2; ++k) {
        const auto path = dir / ("verify_" + std::to_string(k) + ".jsonl");
        const std::string cmd = "\"" + cli + "\" verify --suite all --seed 0 --out \"" + path.string() + "\" > /dev/null";
        const int status = std::system(cmd.c_str());
        codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
        runs.push_back(slurp(path));
    }
    const bool identical = runs[0] == runs[1] && !runs[0].empty();
    const auto summary = runs[0].rfind("# suite");
    out.pass = codes[0] == 0 && codes[1] == 0 && identical;
    out.detail = fmt("exit codes %d, %d; outputs %s (%zu bytes); %s", codes[0], codes[1],
        identical ? "byte-identical" : "DIFFER", runs[0].size(),
        summary == std::string::npos ? "no summary" : runs[0].substr(summary + 2, runs[0].size() - summary - 3).c_str());
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : FMC_CLI_PATH;
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;

    SuiteResult section2, section3, section4, appx;
    double section2_seconds = 0.0;
    auto suites = [&] {
        if (section2.suite.empty()) {
            const Clock clock;
            section2 = run_suite("section2");
            section2_seconds = clock.seconds();
            section3 = run_suite("section3");
            section4 = run_suite("section4");
            appx = run_suite("appendix");
        }
    };

    criteria.emplace_back("gauss law", gauss_law);
    criteria.emplace_back("spherical |cos| integral", abs_cosine);
    criteria.emplace_back("H_alpha cross-validation", cross_validation);
    criteria.emplace_back("pointwise and integrated bounds", [&] { suites(); return pointwise(section2, section2_seconds); });
    criteria.emplace_back("appendix suite", [&] { suites(); return appendix(appx); });
    criteria.emplace_back("slicing sums", [&] { suites(); return slicing(section4); });
    criteria.emplace_back("coarea", [&] { suites(); return coarea(section4); });
    criteria.emplace_back("sobolev and subset bounds", [&] { suites(); return sobolev(section3, section4); });
    criteria.emplace_back("flow", flow);
    criteria.emplace_back("verify --suite all", [&] { return verify_all(cli); });

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        failed += outcome.pass ? 0 : 1;
        std::cout << (outcome.pass ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << outcome.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

#include "fmc/flow.hpp"
#include "fmc/io.hpp"
#include "fmc/suite.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using fmc::ConvexBody;
using nlohmann::ordered_json;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
    std::string body_path;
    std::string fixture;
    double alpha = 0.5;
    double s = 0.5;
    double p = 1.0;
    int resolution = 0;
    std::uint64_t seed = 0;
    std::string suite = "all";
    double cfl = 0.1;
    std::string out;
};

struct LoadedBody {
    std::string name;
    ConvexBody body;
};

LoadedBody load(const RunConfig& cfg)
{
    if (!cfg.body_path.empty() && !cfg.fixture.empty()) {
        throw fmc::Error(fmc::ErrorCode::ParamError, "give either --body or --fixture, not both");
    }
    if (!cfg.body_path.empty()) {
        return {std::filesystem::path(cfg.body_path).stem().string(), fmc::load_body(cfg.body_path)};
    }
    if (!cfg.fixture.empty()) {
        return {cfg.fixture, fmc::named_fixture(cfg.fixture)};
    }
    throw fmc::Error(fmc::ErrorCode::ParamError, "a body is required (--body FILE or --fixture NAME)");
}

/// stdout, or the file named by --out.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw fmc::Error(fmc::ErrorCode::ParamError, "cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

ordered_json vec_json(const fmc::Vec3& v, int dim)
{
    ordered_json out = ordered_json::array();
    for (int k = 0; k < dim; ++k) {
        out.push_back(v[k]);
    }
    return out;
}

ordered_json params_json(const RunConfig& cfg, int n)
{
    return {{"n", n}, {"alpha", cfg.alpha}, {"s", cfg.s}, {"p", cfg.p}};
}

std::vector<int> spread_nodes(std::size_t size, int count, std::uint64_t seed)
{
    fmc::Rng rng(seed);
    const int n = static_cast<int>(size);
    const int offset = rng.integer(0, n - 1);
    std::vector<int> out;
    for (int k = 0; k < std::min(count, n); ++k) {
        out.push_back((offset + k * n / std::min(count, n)) % n);
    }
    return out;
}

int cmd_halpha(const RunConfig& cfg)
{
    const auto [name, body] = load(cfg);
    const int n = body.surface_dim();
    const int resolution = cfg.resolution > 0 ? cfg.resolution : fmc::suite_resolution(body, n == 1 ? 3 : 2);
    const auto quad = fmc::surface_quadrature(body, resolution);
    const auto probe = fmc::surface_quadrature(body, fmc::suite_resolution(body));
    const double tolerance = 0.01;
    Output out(cfg.out);
    int failed = 0;
    int count = 0;
    double worst = 0.0;
    for (int node : spread_nodes(probe.size(), 8, cfg.seed)) {
        const fmc::SurfacePoint x = fmc::surface_point(probe, node);
        const auto chord = fmc::halpha_chord(body, x, cfg.alpha);
        const auto boundary = fmc::halpha_boundary(body, x, cfg.alpha, quad);
        const double deviation = std::abs(chord.value - boundary.value) / chord.value;
        const bool pass = deviation <= tolerance;
        failed += pass ? 0 : 1;
        ++count;
        worst = std::max(worst, deviation);
        ordered_json rec;
        rec["command"] = "halpha";
        rec["body"] = name;
        rec["point"] = vec_json(x.point, n + 1);
        rec["normal"] = vec_json(x.normal, n + 1);
        rec["params"] = params_json(cfg, n);
        rec["chord"] = chord.value;
        rec["chord_error"] = chord.estimated_error;
        rec["boundary"] = boundary.value;
        rec["boundary_error"] = boundary.estimated_error;
        rec["deviation"] = deviation;
        rec["tolerance"] = tolerance;
        rec["resolution"] = resolution;
        rec["seed"] = cfg.seed;
        rec["pass"] = pass;
        out.stream() << rec.dump() << '\n';
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "# halpha %s alpha %g: %d points, max deviation %.3e, %d failed\n", name.c_str(),
        cfg.alpha, count, worst, failed);
    out.stream() << buf;
    return failed ? kExitCheckFailed : 0;
}

int cmd_seminorm(const RunConfig& cfg)
{
    const auto [name, body] = load(cfg);
    fmc::Params params;
    params.n = body.surface_dim();
    params.alpha = cfg.alpha;
    params.s = cfg.s;
    params.p = cfg.p;
    params.validate();
    const int n = params.n;
    const int resolution = cfg.resolution > 0 ? cfg.resolution : fmc::suite_resolution(body, n == 1 ? 1 : 0);
    const auto quad = fmc::surface_quadrature(body, resolution);
    const fmc::Vec3 c = body.centroid();

    // Half of the boundary cut by the plane through the centroid normal to e1.
    std::vector<char> mask(quad.size());
    std::vector<double> chi(quad.size());
    std::vector<double> linear(quad.size());
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const double t = quad.nodes[i].point.x() - c.x();
        mask[i] = t > 0.0 ? 1 : 0;
        chi[i] = mask[i];
        linear[i] = t;
    }
    const auto half = fmc::make_subset(quad, std::move(mask));
    const fmc::PairMatrix pairs_s(quad, params.s);
    const fmc::PairMatrix pairs_sp(quad, params.s * params.p);
    const double per = fmc::frac_perimeter(pairs_s, half);
    const double chi_norm = fmc::gagliardo(pairs_s, chi, 1.0);
    const double lin_norm = fmc::gagliardo(pairs_sp, linear, params.p);

    Output out(cfg.out);
    auto record = [&](const char* quantity, const char* field, double value) {
        ordered_json rec;
        rec["command"] = "seminorm";
        rec["body"] = name;
        rec["quantity"] = quantity;
        rec["field"] = field;
        rec["params"] = {{"n", n}, {"s", params.s}, {"p", quantity == std::string("gagliardo_p") ? params.p : 1.0}};
        rec["value"] = value;
        rec["resolution"] = resolution;
        rec["nodes"] = quad.size();
        rec["seed"] = cfg.seed;
        return rec;
    };
    out.stream() << record("frac_perimeter", "half", per).dump() << '\n';
    out.stream() << record("gagliardo_1", "indicator_half", chi_norm).dump() << '\n';
    out.stream() << record("gagliardo_p", "linear_x", lin_norm).dump() << '\n';
    const double deviation = std::abs(chi_norm - 2.0 * per) / std::max(chi_norm, 1e-300);
    auto identity = record("indicator_identity", "indicator_half", deviation);
    identity["tolerance"] = 1e-10;
    identity["pass"] = deviation <= 1e-10;
    out.stream() << identity.dump() << '\n';
    char buf[160];
    std::snprintf(buf, sizeof buf, "# seminorm %s s %g p %g: Per_s %.10g, [u]^p %.10g\n", name.c_str(), params.s, params.p,
        per, lin_norm);
    out.stream() << buf;
    return deviation <= 1e-10 ? 0 : kExitCheckFailed;
}

int cmd_verify(const RunConfig& cfg)
{
    fmc::SuiteOptions options;
    options.seed = cfg.seed;
    const auto result = fmc::run_suite(cfg.suite, options);
    Output out(cfg.out);
    fmc::write_suite_report(result, out.stream());
    if (!cfg.out.empty()) {
        std::cout << "suite " << result.suite << " seed " << result.seed << ": " << result.reports.size() << " checks, "
                  << result.passed() << " passed, " << result.failed() << " failed\n";
    }
    return result.failed() ? kExitCheckFailed : 0;
}

void save_flow(const fmc::FlowTrace& trace, const std::filesystem::path& dir, const std::vector<ordered_json>& records)
{
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir / "trace.csv");
    fmc::write_trace_csv(trace, csv);
    if (trace.states.empty()) {
        return;
    }
    // Common frame: the bounding square of the initial curve.
    Eigen::Vector2d lo = trace.states.front().markers.front();
    Eigen::Vector2d hi = lo;
    for (const auto& m : trace.states.front().markers) {
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
    }
    const Eigen::Vector2d center = 0.5 * (lo + hi);
    const double extent = 0.55 * (hi - lo).maxCoeff();
    const std::size_t last = trace.states.size() - 1;
    for (int k = 0; k <= 4; ++k) {
        const std::size_t idx = last * static_cast<std::size_t>(k) / 4;
        char file[32];
        std::snprintf(file, sizeof file, "snapshot_%d.svg", k);
        std::ofstream svg(dir / file);
        svg << fmc::snapshot_svg(trace.states[idx], center, extent);
    }
    std::ofstream rep(dir / "report.jsonl");
    for (const auto& r : records) {
        rep << r.dump() << '\n';
    }
}

int cmd_flow(const RunConfig& cfg)
{
    const auto [name, body] = load(cfg);
    if (body.surface_dim() != 1) {
        throw fmc::Error(fmc::ErrorCode::ParamError, "the flow is simulated for planar curves only (n = 1)");
    }
    fmc::FlowOptions options;
    options.cfl = cfg.cfl;
    if (cfg.resolution > 0) {
        options.markers = cfg.resolution;
    }
    const std::filesystem::path dir = cfg.out.empty() ? std::filesystem::path("flow_" + name) : std::filesystem::path(cfg.out);
    fmc::FlowTrace trace;
    try {
        trace = fmc::fmcf_run(body, cfg.alpha, options);
    } catch (const fmc::FlowAborted& e) {
        ordered_json rec {{"command", "flow"}, {"body", name}, {"error", e.what()}, {"steps", e.trace.steps},
            {"t", e.trace.states.empty() ? 0.0 : e.trace.states.back().t}};
        save_flow(e.trace, dir, {rec});
        std::cerr << "fmc flow: " << e.what() << "; partial trace written to " << dir.string() << '\n';
        return kExitCheckFailed;
    }
    std::vector<ordered_json> records;
    auto decay = fmc::check_decay_and_bounds(trace);
    auto variation = fmc::check_first_variation(trace);
    for (auto* r : {&decay, &variation}) {
        r->body = name;
        r->seed = cfg.seed;
        records.push_back(fmc::report_to_json(*r));
    }
    ordered_json summary;
    summary["command"] = "flow";
    summary["body"] = name;
    summary["params"] = {{"n", 1}, {"alpha", cfg.alpha}};
    summary["markers"] = options.markers;
    summary["cfl"] = trace.cfl;
    summary["steps"] = trace.steps;
    summary["rehulls"] = trace.rehull_total;
    summary["t_final"] = trace.states.back().t;
    summary["T_star_num"] = trace.T_star_num;
    summary["termination"] = trace.termination_reason;
    summary["seed"] = cfg.seed;
    records.push_back(summary);
    save_flow(trace, dir, records);

    Output out("");
    for (const auto& r : records) {
        out.stream() << r.dump() << '\n';
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "# flow %s alpha %g: T* = %.6g after %d steps; decay %s, first variation %s; files in %s\n",
        name.c_str(), cfg.alpha, trace.T_star_num, trace.steps, decay.pass ? "pass" : "FAIL",
        variation.pass ? "pass" : "FAIL", dir.string().c_str());
    out.stream() << buf;
    return decay.pass && variation.pass ? 0 : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app {"Fractional mean curvature toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_body = [&](CLI::App* sub) {
        sub->add_option("--body", cfg.body_path, "Body description file (JSON)");
        sub->add_option("--fixture", cfg.fixture, "Named fixture: ball2d, ball3d, square, cube, icosa, thinrect");
        sub->add_option("--resolution", cfg.resolution, "Quadrature resolution (markers for flow)");
        sub->add_option("--seed", cfg.seed, "Seed for point selection and corpora");
        sub->add_option("--out", cfg.out, "Output file (directory for flow)");
    };
    auto* halpha = app.add_subcommand("halpha", "H_alpha at boundary points by the chord and boundary formulas");
    add_body(halpha);
    halpha->add_option("--alpha", cfg.alpha, "Curvature order in (0,1)");

    auto* seminorm = app.add_subcommand("seminorm", "Fractional perimeter and Gagliardo semi-norms on a body");
    add_body(seminorm);
    seminorm->add_option("--alpha", cfg.alpha, "Curvature order in (0,1)");
    seminorm->add_option("--s", cfg.s, "Sobolev order in (0,1)");
    seminorm->add_option("--p", cfg.p, "Integrability exponent >= 1");

    auto* verify = app.add_subcommand("verify", "Run an inequality suite over the seeded corpus");
    verify->add_option("--suite", cfg.suite, "all, section2, section3, section4 or appendix");
    verify->add_option("--seed", cfg.seed, "Corpus seed");
    verify->add_option("--out", cfg.out, "Report file (default: stdout)");

    auto* flow = app.add_subcommand("flow", "Fractional mean curvature flow of a convex curve");
    add_body(flow);
    flow->add_option("--alpha", cfg.alpha, "Curvature order in (0,1)");
    flow->add_option("--cfl", cfg.cfl, "Time step factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*halpha) {
            return cmd_halpha(cfg);
        }
        if (*seminorm) {
            return cmd_seminorm(cfg);
        }
        if (*verify) {
            return cmd_verify(cfg);
        }
        return cmd_flow(cfg);
    } catch (const fmc::Error& e) {
        std::cerr << "fmc: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "fmc: " << e.what() << '\n';
        return kExitUsage;
    }
}

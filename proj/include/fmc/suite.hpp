#pragma once

#include "fmc/inequalities.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fmc {

/// Deterministic generator: the same seed gives the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) { }
    std::uint64_t next();
    /// Uniform in [lo, hi).
    double uniform(double lo = 0.0, double hi = 1.0);
    /// Uniform integer in [lo, hi].
    int integer(int lo, int hi);

private:
    std::uint64_t state_;
};

/// Independent stream seed for item `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct CorpusBody {
    std::string name;
    std::string family;
    std::uint64_t seed = 0;
    ConvexBody body;
};

/// Seeded bodies with surface dimension n, cycling through the families
/// n = 1: regular k-gon, random hull on an ellipse, rectangle (aspect <= 100), disk;
/// n = 2: random hull on an ellipsoid, box (aspect <= 100), icosahedron, ball.
std::vector<CorpusBody> make_corpus(int n, int count, std::uint64_t seed);

/// Quadrature resolution used by the suites for a body; each level halves the
/// mesh size of the previous one (level 0: 8 segments per polygon edge, 64 disk
/// arcs, hull frequency 2, two icosahedral subdivisions of the sphere).
int suite_resolution(const ConvexBody& body, int level = 0);

struct SuiteOptions {
    std::uint64_t seed = 0;
    int bodies_1d = 50; ///< corpus size for the cheap n = 1 checks
    int bodies_2d = 50; ///< corpus size for the cheap n = 2 checks
    int sequences = 1000;
};

struct SuiteResult {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<InequalityReport> reports; ///< sorted by name, then seed

    int passed() const;
    int failed() const;
};

std::vector<std::string> suite_names();

/// all | section2 | section3 | section4 | appendix. Throws ParamError otherwise.
SuiteResult run_suite(std::string_view name, const SuiteOptions& options = {});

/// One JSON record per line, then a summary line.
void write_suite_report(const SuiteResult& result, std::ostream& out);

/// Reports of a fitted-constant check rescaled to the constant c.
InequalityReport with_constant(InequalityReport report, double c);

} // namespace fmc

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "degenlab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace degenlab;
using doctest::Approx;

namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[problem]
gamma = 1
p = 2
)";

std::vector<std::string> violations(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("degenlab_test_config_" + name);
    fs::remove_all(dir);
    return dir;
}

// bitwise-equal or both NaN
bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

Config with_output(const std::string& text, const fs::path& dir) {
    Config c = parse_config(text);
    c.output_directory = dir.string();
    return c;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
    const Config c = parse_config(kMinimal);
    CHECK(c.problem.dimension == 3);
    CHECK(c.problem.radius == 1.0);
    CHECK(c.problem.coefficient.gamma == 1.0);
    CHECK(c.problem.coefficient.alpha == 1.0);
    CHECK(c.problem.lower.kind == LowerOrderKind::Power);
    CHECK(c.problem.lower.exponent == 2.0);
    CHECK(c.problem.datum.family == DatumFamily::Constant);
    CHECK(c.problem.datum.amplitude == 1.0);
    CHECK(c.problem.datum.m == 1.0);
    CHECK(c.mesh.cells == 256);
    CHECK_FALSE(c.mesh.grading);
    CHECK(c.solver.picard_tol == 1e-8);
    CHECK(c.solver.face_scheme == FaceScheme::Upwind);
    CHECK(c.checks.tolerance == 1e-4);
    CHECK(c.checks.lambdas == std::vector<double>{1.25, 2.0, 4.0});
    CHECK(c.checks.k_level_count == 8);
    CHECK_FALSE(c.checks.enabled);
    CHECK(c.axes.product_size() == 1);
    CHECK(c.output_directory == "degenlab_out");
}

TEST_CASE("dimension below three is rejected with the requirement quoted") {
    const auto v = violations("[problem]\ndimension = 2\np = 1\n");
    CHECK(mentions(v, "dimension must be ≥ 3"));
}

TEST_CASE("p and sigma together are rejected") {
    const auto v = violations("[problem]\np = 1\nsigma = 1\n");
    CHECK(mentions(v, "lower-order term must be exactly one kind"));
}

TEST_CASE("all violations are reported") {
    const auto v = violations(R"(
[problem]
dimension = 2
gamma = -1
p = abc
colour = blue
[mesh]
cells = 4
[solver]
face_scheme = sideways
[checks]
enabled = lemma, nope
lambdas = 0.5
[nowhere]
x = 1
)");
    CHECK(v.size() >= 7);
    CHECK(mentions(v, "dimension must be ≥ 3"));
    CHECK(mentions(v, "gamma must be nonnegative"));
    CHECK(mentions(v, "p: expected a number"));
    CHECK(mentions(v, "unknown key 'colour'"));
    CHECK(mentions(v, "cells must be ≥ 8"));
    CHECK(mentions(v, "face_scheme"));
    CHECK(mentions(v, "unknown check 'nope'"));
    CHECK(mentions(v, "lambdas must exceed 1"));
    CHECK(mentions(v, "unknown section [nowhere]"));
}

TEST_CASE("type mismatches") {
    CHECK(mentions(violations("[mesh]\ncells = 12.5\n"), "expected an integer"));
    CHECK(mentions(violations("[solver]\nwarm_start = maybe\n"), "expected true or false"));
    CHECK(mentions(violations("[problem]\np = 1\np = 2\n"), "duplicate key"));
    CHECK(mentions(violations("gamma = 1\n"), "outside any section"));
}

TEST_CASE("model constraints are mirrored at parse time") {
    CHECK(mentions(violations("[problem]\np = 1\ndatum = radial_power\ndelta = 3\n"), "not in L^m"));
    CHECK(mentions(violations("[problem]\nsigma = 1\namplitude = -1\n"), "nonnegative datum"));
    CHECK(mentions(violations("[problem]\np = 1\n[checks]\nenabled = linfty\n"), "does not apply"));
    CHECK(mentions(violations("[problem]\np = 1\n[mesh]\ngrading = 9\n"), "grading"));
    CHECK(mentions(violations("[problem]\np = 1\nm = 2\n[sweep]\ndelta = 1, 2\n"), "point 1"));
}

TEST_CASE("full config") {
    const Config c = parse_config(R"(
# comment
[problem]
dimension = 4
radius = 2
alpha = 0.5
beta = 2
gamma = 0.5
coefficient_form = scaled
spatial_amplitude = 1
sigma = 1.5         # singular absorption
datum = bump
amplitude = 3
center = 0.5
width = 0.25
[mesh]
cells = 64
grading = 2
[solver]
face_scheme = arithmetic
n_max = 1024
warm_start = false
[checks]
enabled = linfty, singular_energy
tolerance = 1e-6
[sweep]
gamma = 0, 0.5, 1
threads = 2
[mms]
profile = zero
cells = 16, 32
[output]
directory = somewhere
)");
    CHECK(c.problem.dimension == 4);
    CHECK(c.problem.coefficient.form == CoefficientForm::Scaled);
    CHECK(c.problem.lower.kind == LowerOrderKind::Singular);
    CHECK(c.problem.lower.sigma == 1.5);
    CHECK(c.problem.datum.family == DatumFamily::Bump);
    CHECK(*c.mesh.grading == 2.0);
    CHECK(c.solver.face_scheme == FaceScheme::Arithmetic);
    CHECK_FALSE(c.solver.warm_start);
    CHECK(c.checks.enabled->size() == 2);
    CHECK(c.axes.gamma.size() == 3);
    CHECK(c.sweep().threads == 2);
    CHECK(c.mms.profile == "zero");
    CHECK(c.output_directory == "somewhere");
}

TEST_CASE("load_config reports unreadable files") {
    CHECK_THROWS_AS(load_config("/nonexistent/degenlab.ini"), std::runtime_error);
}

TEST_CASE("verify on the canonical spec exits 0") {
    const fs::path dir = scratch("verify");
    std::ostringstream log;
    CHECK(dispatch("verify", with_output(kMinimal, dir), {}, log) == kExitOk);
    CHECK(fs::exists(dir / "records.csv"));
    fs::remove_all(dir);
}

TEST_CASE("solve with a zero datum writes u = 0") {
    const fs::path dir = scratch("zero");
    std::ostringstream log;
    const Config c = with_output("[problem]\ngamma = 1\np = 2\namplitude = 0\n[mesh]\ncells = 16\n", dir);
    REQUIRE(dispatch("solve", c, {}, log) == kExitOk);
    const GridFunction u = read_grid_function((dir / "solution.dat").string());
    CHECK(u.values.size() == 16);
    CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("solve, then verify the written file: identical checker results") {
    const fs::path dir = scratch("roundtrip");
    const Config c = with_output("[problem]\ngamma = 1\np = 1\ndatum = radial_power\ndelta = 2\n[mesh]\ncells = 128\n", dir);
    std::ostringstream log;
    REQUIRE(dispatch("solve", c, {}, log) == kExitOk);

    const RunRecord in_process = run_single(c.problem, c.mesh, c.solver, CheckSettings{});
    const RunRecord from_file = verify_solution(c, read_grid_function((dir / "solution.dat").string()));
    const RunRecord direct = verify_solution(c, *in_process.solution);
    REQUIRE(from_file.reports.size() == direct.reports.size());
    for (size_t i = 0; i < direct.reports.size(); ++i) {
        CHECK(from_file.reports[i].name == direct.reports[i].name);
        CHECK(from_file.reports[i].parameters == direct.reports[i].parameters);
        CHECK(same(from_file.reports[i].lhs, direct.reports[i].lhs));
        CHECK(same(from_file.reports[i].rhs, direct.reports[i].rhs));
        CHECK(from_file.reports[i].passed == direct.reports[i].passed);
    }
    // the analysis reports coincide with the in-process run_single as well
    for (size_t i = 0; i < in_process.reports.size(); ++i) CHECK(same(direct.reports[i + 1].lhs, in_process.reports[i].lhs));

    DispatchOptions opts;
    opts.solution = (dir / "solution.dat").string();
    CHECK(dispatch("verify", c, opts, log) == kExitOk);
    fs::remove_all(dir);
}

TEST_CASE("verify fails on a corrupted solution file") {
    const fs::path dir = scratch("corrupt");
    const Config c = with_output(kMinimal, dir);
    std::ostringstream log;
    REQUIRE(dispatch("solve", c, {}, log) == kExitOk);
    GridFunction u = read_grid_function((dir / "solution.dat").string());
    u.values(u.values.size() / 2) += 0.05;
    write_grid_function((dir / "bad.dat").string(), u);
    DispatchOptions opts;
    opts.solution = (dir / "bad.dat").string();
    CHECK(dispatch("verify", c, opts, log) == kExitCheckFailed);
    opts.solution = (dir / "missing.dat").string();
    CHECK(dispatch("verify", c, opts, log) == kExitIo);
    fs::remove_all(dir);
}

TEST_CASE("non-convergence exits 2") {
    const fs::path dir = scratch("diverge");
    const Config c = with_output("[problem]\ngamma = 2\np = 0.5\namplitude = 50\n[solver]\npicard_max = 1\nnewton_max = 1\nn_max = 1\n", dir);
    std::ostringstream log;
    CHECK(dispatch("solve", c, {}, log) == kExitNotConverged);
    CHECK(dispatch("verify", c, {}, log) == kExitNotConverged);
    fs::remove_all(dir);
}

TEST_CASE("sweep, report and mms") {
    const fs::path dir = scratch("sweep");
    const Config c = with_output("[problem]\ngamma = 1\np = 1\n[mesh]\ncells = 32\n[sweep]\np = 0.5, 4\nm = 1, 1.5\n"
                                 "[mms]\ncells = 16, 32\n",
                                 dir);
    std::ostringstream log;
    REQUIRE(dispatch("sweep", c, {}, log) == kExitOk);
    const std::string summary_before = [&] {
        std::ifstream in(dir / "summary.md");
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }();
    fs::remove(dir / "summary.md");
    CHECK(dispatch("report", c, {}, log) == kExitOk);
    std::ifstream in(dir / "summary.md");
    std::stringstream after;
    after << in.rdbuf();
    CHECK(after.str() == summary_before);

    CHECK(dispatch("mms", c, {}, log) == kExitOk);
    CHECK(fs::exists(dir / "mms.csv"));

    fs::remove(dir / "records.csv");
    CHECK(dispatch("report", c, {}, log) == kExitIo);
    CHECK(dispatch("dance", c, {}, log) == kExitConfig);
    fs::remove_all(dir);
}

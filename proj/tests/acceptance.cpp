// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "degenlab/analysis.hpp"
#include "degenlab/experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace degenlab;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

ProblemSpec power_spec(double gamma, double p, double m, DatumFamily family, double delta = 0.0) {
    ProblemSpec s;
    s.dimension = 3;
    s.coefficient.gamma = gamma;
    s.lower = LowerOrderTerm::power(p);
    s.datum.family = family;
    s.datum.amplitude = 1.0;
    s.datum.delta = delta;
    s.datum.m = m;
    return s;
}

// 12 specs over gamma {0, .5, 1}, p {.5, 1, 2, 4}, m {1, 1.5, 2}; radial
// power data keep delta m < N so that f stays in L^m.
std::vector<ProblemSpec> spec_matrix() {
    using F = DatumFamily;
    return {
        power_spec(0.0, 0.5, 1.0, F::Constant),      power_spec(0.0, 2.0, 1.5, F::RadialPower, 1.5),
        power_spec(0.0, 4.0, 2.0, F::Constant),      power_spec(0.0, 1.0, 1.0, F::RadialPower, 2.5),
        power_spec(0.5, 1.0, 1.5, F::Constant),      power_spec(0.5, 0.5, 1.0, F::RadialPower, 2.0),
        power_spec(0.5, 4.0, 1.0, F::Constant),      power_spec(0.5, 2.0, 2.0, F::RadialPower, 1.0),
        power_spec(1.0, 2.0, 1.0, F::Constant),      power_spec(1.0, 4.0, 1.5, F::RadialPower, 1.5),
        power_spec(1.0, 0.5, 2.0, F::Constant),      power_spec(1.0, 1.0, 1.0, F::RadialPower, 2.8),
    };
}

struct MatrixRun {
    std::vector<RunRecord> records;
    double seconds = 0.0;
};

const MatrixRun& matrix_runs() {
    static const MatrixRun runs = [] {
        MatrixRun out;
        const auto t0 = std::chrono::steady_clock::now();
        CheckSettings checks;
        checks.enabled = std::vector<Check>{Check::Lemma, Check::Bg, Check::WeightedEnergy, Check::TruncationEnergy};
        int id = 0;
        for (const ProblemSpec& spec : spec_matrix())
            out.records.push_back(run_single(spec, MeshSpec{256, std::nullopt}, SolverConfig{}, checks, id++));
        out.seconds = seconds_since(t0);
        return out;
    }();
    return runs;
}

// Counts reports with the given name; all of them must pass.
Outcome matrix_reports(const std::string& name, const std::function<bool(const RunRecord&)>& include,
                       size_t per_run) {
    size_t total = 0, failed = 0, runs = 0, not_converged = 0;
    double worst = 1e300;
    for (const RunRecord& rec : matrix_runs().records) {
        if (!include(rec)) continue;
        ++runs;
        if (!rec.solve.flags.converged) {
            ++not_converged;
            continue;
        }
        size_t here = 0;
        for (const EstimateReport& r : rec.reports) {
            if (r.name != name) continue;
            ++here;
            failed += r.passed ? 0 : 1;
            worst = std::min(worst, r.relative_slack);
        }
        total += here;
        if (here != per_run) ++failed;
    }
    std::ostringstream detail;
    detail << runs << " runs, " << total << " checks, " << failed << " failed, " << not_converged
           << " not converged, min slack " << fmt("%.3g", worst);
    return {runs > 0 && failed == 0 && not_converged == 0, detail.str()};
}

Outcome analytic_baseline() {
    const auto t0 = std::chrono::steady_clock::now();
    ProblemSpec spec;
    spec.dimension = 3;
    spec.coefficient.gamma = 0.0;
    spec.lower = LowerOrderTerm::none();
    spec.datum.family = DatumFamily::Constant;
    spec.datum.amplitude = 1.0;
    std::vector<double> errors;
    for (int cells : {64, 128, 256}) {
        const RadialGrid grid = build_radial_grid(3, 1.0, cells);
        const SolveResult res = truncation_continuation(grid, spec, SolverConfig{});
        if (!res.flags.converged) return {false, "solver did not converge at M=" + std::to_string(cells)};
        const Eigen::VectorXd exact = grid.nodes().unaryExpr([](double r) { return (1.0 - r * r) / 6.0; });
        errors.push_back((res.u - exact).cwiseAbs().maxCoeff());
    }
    const double order = std::log(errors[1] / errors[2]) / std::log(2.0);
    const double order_coarse = std::log(errors[0] / errors[1]) / std::log(2.0);
    const double t = seconds_since(t0);
    return {errors[2] <= 5e-4 && std::min(order, order_coarse) >= 1.9 && t < 1.0,
            fmt("error(M=256) %.3e, orders %.3f", errors[2], order_coarse, order) + fmt(", %.3f s", t)};
}

Outcome singular_absorption() {
    int failed = 0;
    std::ostringstream detail;
    for (double gamma : {0.5, 1.0}) {
        ProblemSpec spec;
        spec.dimension = 3;
        spec.coefficient.gamma = gamma;
        spec.lower = LowerOrderTerm::singular(1.0);
        spec.datum.family = DatumFamily::Constant;
        spec.datum.amplitude = 3.0;
        CheckSettings checks;
        checks.enabled = std::vector<Check>{Check::Linfty, Check::SingularEnergy};
        const RunRecord rec = run_single(spec, MeshSpec{256, std::nullopt}, SolverConfig{}, checks);
        if (!rec.solve.flags.converged) {
            ++failed;
            detail << "gamma=" << gamma << " not converged; ";
            continue;
        }
        const Eigen::VectorXd& u = rec.solution->values;
        const bool bounds = u.minCoeff() >= 0.0 && u.maxCoeff() <= 0.75 + 1e-8;
        failed += bounds ? 0 : 1;
        for (const EstimateReport& r : rec.reports) failed += r.passed ? 0 : 1;
        detail << fmt("gamma=%.1f: max u %.9f, energy %.4g", gamma, u.maxCoeff(), rec.reports.back().lhs)
               << fmt(" <= %.4g; ", rec.reports.back().rhs);
    }
    return {failed == 0, detail.str()};
}

Outcome marcinkiewicz_oracle() {
    const RadialGrid grid = build_radial_grid(3, 1.0, 512);
    const Eigen::VectorXd u = grid.nodes().unaryExpr([](double r) { return 1.0 / (r * r); });
    const MarcinkiewiczLemmaReport rep = verify_marcinkiewicz_lemma(grid, u, 0.15);
    const double rel = std::abs(rep.measured - rep.predicted) / rep.predicted;
    return {rep.applicable && rel <= 0.15 && std::abs(rep.s - 1.5) <= 0.15 * 1.5,
            fmt("s %.4f (analytic 1.5), predicted %.4f, measured %.4f", rep.s, rep.predicted, rep.measured) +
                fmt(", relative gap %.3f", rel)};
}

const RunRecord& probe_run() {
    static const RunRecord rec = [] {
        ProblemSpec spec = power_spec(1.0, 1.0, 1.0, DatumFamily::RadialPower, 2.8);
        CheckSettings checks;
        checks.enabled = std::vector<Check>{Check::Entropy};
        return run_single(spec, MeshSpec{512, std::nullopt}, SolverConfig{}, checks);
    }();
    return rec;
}

Outcome regime_probe() {
    const auto t0 = std::chrono::steady_clock::now();
    const RunRecord& rec = probe_run();
    const double t = seconds_since(t0);
    const double target = 0.85 * 2.0 / 3.0;
    if (!rec.solve.flags.converged) return {false, "solver did not converge: " + rec.solve.message};
    if (!rec.tail_grad.sufficient) return {false, "gradient tail insufficient: " + rec.tail_grad.note};
    return {rec.tail_grad.exponent >= target && t < 10.0,
            fmt("gradient tail %.4f >= %.4f, %.2f s", rec.tail_grad.exponent, target, t)};
}

Outcome entropy_on_probe() {
    const RunRecord& rec = probe_run();
    if (!rec.solve.flags.converged) return {false, "probe run did not converge"};
    size_t failed = 0;
    for (const EstimateReport& r : rec.reports) failed += r.passed ? 0 : 1;
    return {!rec.reports.empty() && failed == 0,
            std::to_string(rec.reports.size()) + " (phi, k) pairs, " + std::to_string(failed) + " failed"};
}

Outcome embedding_chain() {
    std::mt19937_64 rng(20261016);
    std::uniform_int_distribution<int> cells(8, 400);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int failed = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const RadialGrid grid = build_radial_grid(3 + trial % 3, 0.5 + 2.0 * unit(rng), cells(rng));
        Eigen::VectorXd u(grid.size());
        const double scale = std::pow(10.0, 4.0 * unit(rng) - 2.0);
        for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = scale * (2.0 * unit(rng) - 1.0) / (0.05 + unit(rng));
        const double s = 0.5 + 3.5 * unit(rng);
        const Eigen::VectorXd w = quadrature_weights(grid);
        const DistributionFunction df = distribution_function(u, w, default_levels(u.cwiseAbs().maxCoeff()));
        if (!(marcinkiewicz_constant(df, s) <= std::pow(lebesgue_norm(u, s, w), s))) ++failed;
    }
    return {failed == 0, "100 random grid functions, " + std::to_string(failed) + " violations"};
}

Outcome determinism() {
    auto body = [] {
        std::ostringstream out;
        write_records_csv(out, flatten(run_sweep(canonical_sweep())));
        return out.str();
    };
    const std::string first = body();
    SweepSpec threaded = canonical_sweep();
    threaded.threads = 4;
    std::ostringstream third;
    write_records_csv(third, flatten(run_sweep(threaded)));
    const std::string second = body();
    return {first == second && first == third.str() && !first.empty(),
            std::to_string(first.size()) + " bytes, repeated and 4-thread bodies " +
                (first == second && first == third.str() ? "identical" : "differ")};
}

}  // namespace

int main() {
    const auto is_power = [](const RunRecord& r) { return r.spec.lower.kind == LowerOrderKind::Power; };
    const auto every = [](const RunRecord&) { return true; };
    const auto l1 = [](const RunRecord& r) { return r.spec.datum.m == 1.0; };

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 analytic baseline u = (1 - r^2)/6", analytic_baseline},
        {"2 lemma estimate on the 12-spec matrix",
         [&] {
             Outcome o = matrix_reports("lemma", every, 1);
             o.passed = o.passed && matrix_runs().seconds < 30.0;
             o.detail += fmt(", %.2f s", matrix_runs().seconds);
             return o;
         }},
        {"3 tail estimate for t in {0, 1/4, 1/2, 3/4} max|u|", [&] { return matrix_reports("bg", is_power, 4); }},
        {"4 truncation energy at 8 log-spaced k", [&] { return matrix_reports("truncation_energy", every, 8); }},
        {"5 weighted energy for lambda in {1.25, 2, 4} (m = 1)",
         [&] { return matrix_reports("weighted_energy", l1, 3); }},
        {"6 singular absorption bounds and energy", singular_absorption},
        {"7 Marcinkiewicz gradient lemma on u = r^-2", marcinkiewicz_oracle},
        {"8 regime probe, delta = 2.8", regime_probe},
        {"9 entropy inequality on the probe run", entropy_on_probe},
        {"10 Chebyshev embedding on random grid functions", embedding_chain},
        {"11 deterministic canonical sweep", determinism},
    };

    int failures = 0;
    for (const auto& [label, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", o.passed ? "PASS" : "FAIL", label.c_str(), o.detail.c_str());
        failures += o.passed ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

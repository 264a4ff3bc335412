#ifndef DEGENLAB_EXPERIMENTS_HPP
#define DEGENLAB_EXPERIMENTS_HPP

#include "degenlab/analysis.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/problem_model.hpp"
#include "degenlab/solver.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace degenlab {

struct MeshSpec {
    int cells = 256;
    std::optional<double> grading;
};

enum class Check { Lemma, Bg, WeightedEnergy, TruncationEnergy, Linfty, SingularEnergy, Entropy, Marcinkiewicz };

const char* to_string(Check c);
std::optional<Check> check_from_string(const std::string& name);

/// Checks that make sense for a lower-order term of this kind.
std::vector<Check> applicable_checks(LowerOrderKind kind);

struct CheckSettings {
    std::optional<std::vector<Check>> enabled;  // unset: every applicable check
    double tolerance = 1e-4;
    std::vector<double> lambdas{1.25, 2.0, 4.0};
    int k_level_count = 8;
    std::vector<double> t_fractions{0.0, 0.25, 0.5, 0.75};
    double tail_tolerance = 0.15;

    std::vector<Check> resolve(LowerOrderKind kind) const;
};

/// k levels for the truncation and entropy checks: `count` log-spaced values
/// on [1e-3 max|u|, max|u|] (on [1e-3, 1] when u vanishes).
std::vector<double> truncation_levels(double max_abs, int count);

struct SolveSummary {
    double n_final = 0.0;
    int picard_iters = 0;
    int newton_iters = 0;
    double residual_inf = 0.0;
    SolveFlags flags;
    std::string message;
};

struct RunRecord {
    int run_id = 0;
    ProblemSpec spec;
    MeshSpec mesh;
    SolveSummary solve;
    std::optional<RegimePrediction> prediction;
    std::vector<EstimateReport> reports;
    TailFit tail_u;
    TailFit tail_grad;
    std::optional<GridFunction> solution;
    DistributionFunction u_distribution;
    DistributionFunction grad_distribution;
    double duration_ms = 0.0;
};

/// Prediction attached to a run: Power absorption with gamma <= 1 only.
std::optional<RegimePrediction> predict(const ProblemSpec& spec);

/// Runs every enabled checker on a given nodal solution and fills the
/// report and tail fields of `record`.
void analyze_solution(const RadialGrid& grid, const ProblemSpec& spec, const Eigen::VectorXd& u,
                      const CheckSettings& checks, RunRecord& record);

/// truncation_continuation followed by analyze_solution. Solver failures are
/// recorded in the flags and the checkers are skipped.
RunRecord run_single(const ProblemSpec& spec, const MeshSpec& mesh, const SolverConfig& cfg,
                     const CheckSettings& checks, int run_id = 0);

struct SweepAxes {
    std::vector<double> gamma;
    std::vector<double> p;
    std::vector<double> m;
    std::vector<double> dimension;
    std::vector<double> delta;
    std::vector<double> cells;

    size_t product_size() const;
};

struct SweepSpec {
    ProblemSpec base;
    MeshSpec mesh;
    SolverConfig solver;
    CheckSettings checks;
    SweepAxes axes;
    size_t max_points = 4096;
    int threads = 1;
};

struct SweepPoint {
    ProblemSpec spec;
    MeshSpec mesh;
};

/// Cartesian product in axis order gamma, p, m, dimension, delta, cells with
/// the last axis varying fastest. A delta axis turns a constant datum into a
/// radial power of the same amplitude.
std::vector<SweepPoint> expand_sweep(const SweepSpec& sweep);

/// One record per point, ordered like expand_sweep regardless of threads.
std::vector<RunRecord> run_sweep(const SweepSpec& sweep);

/// gamma = 1, p in {0.5, 1, 2, 3, 4}, m in {1, 1.5}, f = 1, N = 3, M = 128:
/// hits both L^1 cases and all three L^m cases.
SweepSpec canonical_sweep();

/// Exact profile u*(r) and its radial derivative.
struct ManufacturedSolution {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    static ManufacturedSolution quadratic(double amplitude, double radius);
    static ManufacturedSolution zero();
};

/// Continuum datum -r^{1-N} (r^{N-1} a(r, u*) u*')' + g(u*) at the given radii.
Eigen::VectorXd manufactured_datum(const ProblemSpec& spec, const ManufacturedSolution& exact,
                                   const Eigen::Ref<const Eigen::VectorXd>& radii);

struct RefinementRow {
    int cells = 0;
    double error = 0.0;
    double order = std::nan("");  // log2(e_prev / e) against the previous row
    bool converged = false;
};

std::vector<RefinementRow> mesh_refinement_study(const ProblemSpec& spec, const ManufacturedSolution& exact,
                                                 const std::vector<int>& cells, const SolverConfig& cfg,
                                                 std::optional<double> grading = std::nullopt);

struct ProbeRow {
    double delta = 0.0;
    bool converged = false;
    TailFit u_fit;
    TailFit grad_fit;
    std::optional<RegimePrediction> prediction;
    std::optional<RegimePrediction> neighbor;  // set on a regime boundary
    double lebesgue_integral = 0.0;            // sum w |u|^{pm} at M
    double lebesgue_integral_refined = 0.0;    // same at 2M
    bool stable = false;
    bool consistent = false;
    std::string note;
};

struct ProbeResult {
    std::vector<ProbeRow> rows;
    bool consistent = false;  // over rows with a resolved gradient tail
};

/// Sweeps a radial power datum over `deltas` at a fixed regime and compares
/// the measured tails with the predictions. A row is consistent when the
/// Lebesgue integral changes by at most 10% under refinement and the
/// gradient tail is at least `threshold` times the predicted exponent.
ProbeResult exponent_probe(const ProblemSpec& base, const std::vector<double>& deltas, const MeshSpec& mesh,
                           const SolverConfig& cfg, double threshold = 0.85);

/// One flattened records.csv row.
struct RecordRow {
    int run_id = 0;
    double gamma = 0.0;
    std::optional<double> p;
    double m = 1.0;
    int dimension = 3;
    double delta = 0.0;
    int cells = 0;
    double n_final = 0.0;
    bool converged = false;
    std::string check_name;
    double lhs = std::nan("");
    double rhs = std::nan("");
    double slack = std::nan("");
    bool passed = false;
    double tail_u = std::nan("");
    double tail_grad = std::nan("");
    double predicted_grad = std::nan("");
};

std::vector<RecordRow> flatten(const std::vector<RunRecord>& records);

extern const char* const kRecordsHeader;

/// The CSV body (header line plus rows) without the timestamp comment.
void write_records_csv(std::ostream& out, const std::vector<RecordRow>& rows);
std::vector<RecordRow> read_records_csv(std::istream& in);

/// Regime table grouped like the existence theorems, plus check totals.
void write_summary(std::ostream& out, const std::vector<RecordRow>& rows);

/// records.csv, summary.md and plotdata/run_<id>_{u,grad}.dat under `directory`.
void emit_outputs(const std::vector<RunRecord>& records, const std::string& directory);

}  // namespace degenlab

#endif  // DEGENLAB_EXPERIMENTS_HPP

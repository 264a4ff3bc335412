#include "degenlab/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace degenlab {

namespace {

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Fn>
auto io(Fn&& fn) {
    try {
        return fn();
    } catch (const std::ios_base::failure& e) {
        throw IoFailure(e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw IoFailure(e.what());
    } catch (const std::runtime_error& e) {
        throw IoFailure(e.what());
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_solve(std::ostream& log, const RunRecord& rec) {
    log << "run " << rec.run_id << ": N=" << rec.spec.dimension << " gamma=" << fmt(rec.spec.coefficient.gamma)
        << " lower=" << to_string(rec.spec.lower.kind) << " datum=" << to_string(rec.spec.datum.family)
        << " M=" << rec.mesh.cells;
    if (rec.solve.flags.converged) {
        log << " converged (n=" << fmt(rec.solve.n_final) << ", picard " << rec.solve.picard_iters << ", residual "
            << fmt(rec.solve.residual_inf) << ")\n";
    } else {
        log << " NOT converged: " << rec.solve.message << '\n';
    }
    if (rec.prediction)
        log << "  predicted: " << to_string(rec.prediction->regime) << ", grad in "
            << to_string(rec.prediction->gradient_space) << " with exponent " << fmt(rec.prediction->gradient_exponent)
            << '\n';
}

int print_reports(std::ostream& log, const RunRecord& rec) {
    int failed = 0;
    for (const EstimateReport& r : rec.reports) {
        log << "  " << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.parameters.empty()) log << " [" << r.parameters << "]";
        log << "  lhs=" << fmt(r.lhs) << " rhs=" << fmt(r.rhs) << '\n';
        failed += r.passed ? 0 : 1;
    }
    return failed;
}

std::string path_in(const Config& config, const char* name) {
    return (std::filesystem::path(config.output_directory) / name).string();
}

int cmd_solve(const Config& config, const DispatchOptions& options, std::ostream& log) {
    const RunRecord rec = run_single(config.problem, config.mesh, config.solver, config.checks);
    print_solve(log, rec);
    print_reports(log, rec);
    const std::string solution = options.solution.value_or(path_in(config, "solution.dat"));
    io([&] {
        std::filesystem::create_directories(config.output_directory);
        if (!options.solution || std::filesystem::path(*options.solution).has_parent_path())
            std::filesystem::create_directories(std::filesystem::path(solution).parent_path());
        write_grid_function(solution, *rec.solution);
        emit_outputs({rec}, config.output_directory);
        return 0;
    });
    log << "solution written to " << solution << '\n';
    return rec.solve.flags.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Config& config, std::ostream& log) {
    const std::vector<RunRecord> records = run_sweep(config.sweep());
    int not_converged = 0;
    for (const RunRecord& rec : records) {
        print_solve(log, rec);
        not_converged += rec.solve.flags.converged ? 0 : 1;
    }
    io([&] {
        emit_outputs(records, config.output_directory);
        return 0;
    });
    log << records.size() << " runs, " << not_converged << " not converged; outputs in " << config.output_directory
        << '\n';
    // failed points are data, not errors
    return kExitOk;
}

int cmd_verify(const Config& config, const DispatchOptions& options, std::ostream& log) {
    GridFunction u{build_radial_grid(config.problem.dimension, config.problem.radius, 2), Eigen::VectorXd()};
    if (options.solution) {
        u = io([&] { return read_grid_function(*options.solution); });
    } else {
        CheckSettings none;
        none.enabled = std::vector<Check>{};
        const RunRecord solved = run_single(config.problem, config.mesh, config.solver, none);
        if (!solved.solve.flags.converged) {
            print_solve(log, solved);
            return kExitNotConverged;
        }
        u = *solved.solution;
    }
    RunRecord rec = verify_solution(config, u);
    print_solve(log, rec);
    const int failed = print_reports(log, rec);
    io([&] {
        emit_outputs({rec}, config.output_directory);
        return 0;
    });
    log << (failed ? std::to_string(failed) + " check(s) failed\n" : std::string("all checks passed\n"));
    return failed ? kExitCheckFailed : kExitOk;
}

int cmd_mms(const Config& config, std::ostream& log) {
    const ManufacturedSolution exact = config.mms.profile == "zero"
                                           ? ManufacturedSolution::zero()
                                           : ManufacturedSolution::quadratic(config.mms.amplitude, config.problem.radius);
    const std::vector<RefinementRow> rows =
        mesh_refinement_study(config.problem, exact, config.mms.cells, config.solver, config.mesh.grading);
    std::ostringstream table;
    table << "cells,error,order,converged\n";
    bool all_converged = true;
    for (const RefinementRow& r : rows) {
        char line[128];
        std::snprintf(line, sizeof line, "%d,%.17g,%s,%s\n", r.cells, r.error,
                      std::isnan(r.order) ? "" : fmt(r.order).c_str(), r.converged ? "true" : "false");
        table << line;
        all_converged = all_converged && r.converged;
    }
    log << "manufactured solution '" << exact.name << "' (" << to_string(config.solver.face_scheme) << " faces)\n"
        << table.str();
    io([&] {
        std::filesystem::create_directories(config.output_directory);
        std::ofstream out(path_in(config, "mms.csv"));
        if (!out) throw std::runtime_error("cannot open '" + path_in(config, "mms.csv") + "' for writing");
        out << table.str();
        return 0;
    });
    return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_report(const Config& config, std::ostream& log) {
    const std::string records = path_in(config, "records.csv");
    const std::string summary = path_in(config, "summary.md");
    const std::vector<RecordRow> rows = io([&] {
        std::ifstream in(records);
        if (!in) throw std::runtime_error("cannot read '" + records + "'");
        try {
            return read_records_csv(in);
        } catch (const std::exception& e) {
            throw std::runtime_error(records + ": " + e.what());
        }
    });
    std::ostringstream text;
    write_summary(text, rows);
    io([&] {
        std::ofstream out(summary);
        if (!out) throw std::runtime_error("cannot open '" + summary + "' for writing");
        out << text.str();
        return 0;
    });
    log << text.str();
    return kExitOk;
}

}  // namespace

RunRecord verify_solution(const Config& config, const GridFunction& u) {
    const RadialGrid& grid = u.grid;
    if (grid.dimension() != config.problem.dimension ||
        std::abs(grid.radius() - config.problem.radius) > 1e-12 * config.problem.radius)
        throw std::invalid_argument("solution grid does not match the configured dimension and radius");

    RunRecord rec;
    rec.spec = config.problem;
    rec.mesh = {static_cast<int>(grid.size()), grid.grading() == 1.0 ? std::nullopt : std::optional(grid.grading())};
    rec.prediction = predict(config.problem);
    rec.solution = u;
    rec.solve.flags.converged = true;

    const DiscreteProblem problem = discretize(grid, config.problem);
    const double n = std::numeric_limits<double>::infinity();
    rec.solve.n_final = n;
    rec.solve.residual_inf = residual_norm(problem, u.values, n, config.solver.face_scheme);
    const double f_max = problem.datum.size() ? problem.datum.cwiseAbs().maxCoeff() : 0.0;
    rec.reports.push_back(make_report("residual", "", rec.solve.residual_inf,
                                      10.0 * config.solver.newton_tol * (1.0 + f_max), 0.0));

    CheckSettings all = config.checks;
    all.enabled.reset();
    analyze_solution(grid, config.problem, u.values, all, rec);
    return rec;
}

int dispatch(const std::string& command, const Config& config, const DispatchOptions& options, std::ostream& log) {
    try {
        if (command == "solve") return cmd_solve(config, options, log);
        if (command == "sweep") return cmd_sweep(config, log);
        if (command == "verify") return cmd_verify(config, options, log);
        if (command == "mms") return cmd_mms(config, log);
        if (command == "report") return cmd_report(config, log);
        log << "unknown command '" << command << "'\n";
        return kExitConfig;
    } catch (const IoFailure& e) {
        log << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        log << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "solver failure: " << e.what() << '\n';
        return kExitNotConverged;
    }
}

}  // namespace degenlab

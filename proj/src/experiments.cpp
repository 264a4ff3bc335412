#include "degenlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace degenlab {

const char* to_string(Check c) {
    switch (c) {
    case Check::Lemma: return "lemma";
    case Check::Bg: return "bg";
    case Check::WeightedEnergy: return "weighted_energy";
    case Check::TruncationEnergy: return "truncation_energy";
    case Check::Linfty: return "linfty";
    case Check::SingularEnergy: return "singular_energy";
    case Check::Entropy: return "entropy";
    case Check::Marcinkiewicz: return "marcinkiewicz";
    }
    return "?";
}

std::optional<Check> check_from_string(const std::string& name) {
    for (Check c : {Check::Lemma, Check::Bg, Check::WeightedEnergy, Check::TruncationEnergy, Check::Linfty,
                    Check::SingularEnergy, Check::Entropy, Check::Marcinkiewicz})
        if (name == to_string(c)) return c;
    return std::nullopt;
}

std::vector<Check> applicable_checks(LowerOrderKind kind) {
    switch (kind) {
    case LowerOrderKind::Power:
        return {Check::Lemma, Check::Bg, Check::WeightedEnergy, Check::TruncationEnergy, Check::Entropy,
                Check::Marcinkiewicz};
    case LowerOrderKind::Singular:
        return {Check::TruncationEnergy, Check::Linfty, Check::SingularEnergy, Check::Entropy, Check::Marcinkiewicz};
    case LowerOrderKind::None:
        return {Check::WeightedEnergy, Check::TruncationEnergy, Check::Entropy, Check::Marcinkiewicz};
    }
    return {};
}

std::vector<Check> CheckSettings::resolve(LowerOrderKind kind) const {
    const std::vector<Check> allowed = applicable_checks(kind);
    if (!enabled) return allowed;
    for (Check c : *enabled)
        if (std::find(allowed.begin(), allowed.end(), c) == allowed.end())
            throw std::invalid_argument(std::string("check '") + to_string(c) +
                                        "' does not apply to lower-order term '" + to_string(kind) + "'");
    return *enabled;
}

std::vector<double> truncation_levels(double max_abs, int count) {
    if (count < 1) throw std::invalid_argument("need at least one k level");
    const double top = max_abs > 0.0 ? max_abs : 1.0;
    if (count == 1) return {top};
    std::vector<double> ks(count);
    for (int j = 0; j < count; ++j) ks[j] = top * std::pow(10.0, -3.0 + 3.0 * j / (count - 1));
    return ks;
}

std::optional<RegimePrediction> predict(const ProblemSpec& spec) {
    if (spec.lower.kind != LowerOrderKind::Power || spec.coefficient.gamma > 1.0) return std::nullopt;
    return classify_regime(spec.coefficient.gamma, spec.lower.exponent, spec.datum.m);
}

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

EstimateReport marcinkiewicz_report(const MarcinkiewiczLemmaReport& rep, double tol) {
    EstimateReport r;
    r.name = "marcinkiewicz";
    if (!rep.applicable || !rep.gradient_fit.sufficient) {
        r.parameters = rep.note;
        r.lhs = r.rhs = r.relative_slack = std::nan("");
        r.passed = true;
        return r;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "s=%.4f rho=%.4f predicted=%.4f", rep.s, rep.rho, rep.predicted);
    r.parameters = buf;
    // measured gradient tail must reach (1 - tol) of the prediction
    r.lhs = rep.predicted * (1.0 - tol);
    r.rhs = rep.measured;
    r.relative_slack = (r.rhs - r.lhs) / r.lhs;
    r.passed = rep.passed;
    return r;
}

}  // namespace

void analyze_solution(const RadialGrid& grid, const ProblemSpec& spec, const Eigen::VectorXd& u,
                      const CheckSettings& checks, RunRecord& record) {
    const Eigen::VectorXd w = quadrature_weights(grid);
    const Eigen::VectorXd f = grid.nodes().unaryExpr([&](double r) { return datum_eval(spec.datum, r); });
    const double u_max = max_abs(u);
    const double tol = checks.tolerance;
    const std::vector<double> ks = truncation_levels(u_max, checks.k_level_count);
    const auto append = [&record](std::vector<EstimateReport> rs) {
        record.reports.insert(record.reports.end(), rs.begin(), rs.end());
    };

    for (Check c : checks.resolve(spec.lower.kind)) {
        switch (c) {
        case Check::Lemma:
            record.reports.push_back(check_lemma_estimate(u, f, spec.lower.exponent, spec.datum.m, w, tol));
            break;
        case Check::Bg: {
            std::vector<double> ts;
            for (double frac : checks.t_fractions) ts.push_back(frac * u_max);
            append(check_bg_estimate(u, f, spec.lower.exponent, ts, w, tol));
            break;
        }
        case Check::WeightedEnergy:
            for (double lambda : checks.lambdas)
                record.reports.push_back(
                    check_weighted_energy(grid, u, f, spec.coefficient.gamma, lambda, spec.coefficient.alpha, tol));
            break;
        case Check::TruncationEnergy:
            append(check_truncation_energy(grid, u, f, spec.coefficient.gamma, spec.coefficient.alpha, ks, tol));
            break;
        case Check::Linfty:
            record.reports.push_back(check_linfty_bound(u, spec.lower, f));
            break;
        case Check::SingularEnergy:
            record.reports.push_back(check_singular_energy(grid, u, f, spec.coefficient.gamma, spec.coefficient.alpha,
                                                           spec.lower.sigma, tol));
            break;
        case Check::Entropy:
            append(check_entropy_inequality(grid, u, spec, default_entropy_tests(grid, u), ks, tol));
            break;
        case Check::Marcinkiewicz:
            record.reports.push_back(
                marcinkiewicz_report(verify_marcinkiewicz_lemma(grid, u, checks.tail_tolerance), checks.tail_tolerance));
            break;
        }
    }

    record.u_distribution = distribution_function(u, w, default_levels(u_max));
    record.tail_u = tail_exponent_fit(record.u_distribution);
    record.grad_distribution = gradient_distribution(grid, u);
    record.tail_grad = tail_exponent_fit(record.grad_distribution);
}

RunRecord run_single(const ProblemSpec& spec, const MeshSpec& mesh, const SolverConfig& cfg,
                     const CheckSettings& checks, int run_id) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord record;
    record.run_id = run_id;
    record.spec = spec;
    record.mesh = mesh;
    record.prediction = predict(spec);

    const RadialGrid grid = build_radial_grid(spec.dimension, spec.radius, mesh.cells, mesh.grading);
    const SolveResult result = truncation_continuation(grid, spec, cfg);
    record.solve = {result.n_final, result.picard_iters, result.newton_iters_total, result.residual_inf, result.flags,
                    result.message};
    record.solution = GridFunction{grid, result.u};
    if (result.flags.converged) analyze_solution(grid, spec, result.u, checks, record);

    record.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return record;
}

size_t SweepAxes::product_size() const {
    size_t n = 1;
    for (const auto* axis : {&gamma, &p, &m, &dimension, &delta, &cells})
        if (!axis->empty()) n *= axis->size();
    return n;
}

std::vector<SweepPoint> expand_sweep(const SweepSpec& sweep) {
    const size_t total = sweep.axes.product_size();
    if (total > sweep.max_points)
        throw std::invalid_argument("sweep has " + std::to_string(total) + " points, cap is " +
                                    std::to_string(sweep.max_points));

    using Setter = std::function<void(SweepPoint&, double)>;
    std::vector<std::pair<const std::vector<double>*, Setter>> axes{
        {&sweep.axes.gamma, [](SweepPoint& pt, double v) { pt.spec.coefficient.gamma = v; }},
        {&sweep.axes.p,
         [](SweepPoint& pt, double v) {
             if (pt.spec.lower.kind == LowerOrderKind::Singular)
                 throw std::invalid_argument("p axis conflicts with a singular lower-order term");
             pt.spec.lower = LowerOrderTerm::power(v);
         }},
        {&sweep.axes.m, [](SweepPoint& pt, double v) { pt.spec.datum.m = v; }},
        {&sweep.axes.dimension, [](SweepPoint& pt, double v) { pt.spec.dimension = static_cast<int>(v); }},
        {&sweep.axes.delta,
         [](SweepPoint& pt, double v) {
             if (pt.spec.datum.family == DatumFamily::Constant) pt.spec.datum.family = DatumFamily::RadialPower;
             pt.spec.datum.delta = v;
         }},
        {&sweep.axes.cells, [](SweepPoint& pt, double v) { pt.mesh.cells = static_cast<int>(v); }},
    };

    std::vector<SweepPoint> points;
    points.reserve(total);
    for (size_t index = 0; index < total; ++index) {
        SweepPoint pt{sweep.base, sweep.mesh};
        size_t rest = index;
        // last axis varies fastest
        std::vector<std::pair<const std::vector<double>*, double>> chosen;
        for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
            const auto& values = *it->first;
            if (values.empty()) continue;
            chosen.emplace_back(it->first, values[rest % values.size()]);
            rest /= values.size();
        }
        for (auto& [values, setter] : axes)
            for (const auto& [which, v] : chosen)
                if (which == values) setter(pt, v);
        points.push_back(std::move(pt));
    }
    return points;
}

std::vector<RunRecord> run_sweep(const SweepSpec& sweep) {
    const std::vector<SweepPoint> points = expand_sweep(sweep);
    std::vector<RunRecord> records(points.size());

    auto run_point = [&](size_t i) {
        const int run_id = static_cast<int>(i);
        try {
            records[i] = run_single(points[i].spec, points[i].mesh, sweep.solver, sweep.checks, run_id);
        } catch (const std::exception& e) {
            RunRecord failed;
            failed.run_id = run_id;
            failed.spec = points[i].spec;
            failed.mesh = points[i].mesh;
            failed.solve.flags.aborted = true;
            failed.solve.message = e.what();
            records[i] = std::move(failed);
        }
    };

    const int threads = std::max(1, std::min<int>(sweep.threads, static_cast<int>(points.size())));
    if (threads == 1) {
        for (size_t i = 0; i < points.size(); ++i) run_point(i);
        return records;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (size_t i = next++; i < points.size(); i = next++) run_point(i);
        });
    for (auto& th : pool) th.join();
    return records;
}

SweepSpec canonical_sweep() {
    SweepSpec sweep;
    sweep.base.dimension = 3;
    sweep.base.radius = 1.0;
    sweep.base.coefficient.gamma = 1.0;
    sweep.base.lower = LowerOrderTerm::power(1.0);
    sweep.base.datum.family = DatumFamily::Constant;
    sweep.base.datum.amplitude = 1.0;
    sweep.mesh.cells = 128;
    sweep.axes.p = {0.5, 1.0, 2.0, 3.0, 4.0};
    sweep.axes.m = {1.0, 1.5};
    return sweep;
}

ManufacturedSolution ManufacturedSolution::quadratic(double amplitude, double radius) {
    const double r2 = radius * radius;
    return {"quadratic", [=](double r) { return amplitude * (1.0 - r * r / r2); },
            [=](double r) { return -2.0 * amplitude * r / r2; }};
}

ManufacturedSolution ManufacturedSolution::zero() {
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }};
}

Eigen::VectorXd manufactured_datum(const ProblemSpec& spec, const ManufacturedSolution& exact,
                                   const Eigen::Ref<const Eigen::VectorXd>& radii) {
    const int power = spec.dimension - 1;
    auto flux = [&](double r) {
        return std::pow(r, power) * coefficient_eval(spec.coefficient, r, exact.value(r)) * exact.derivative(r);
    };
    Eigen::VectorXd f(radii.size());
    for (Eigen::Index i = 0; i < radii.size(); ++i) {
        const double r = radii(i);
        const double h = std::min(1e-3 * spec.radius, r / 3.0);
        // fourth-order central difference of the flux
        const double dflux = (-flux(r + 2 * h) + 8 * flux(r + h) - 8 * flux(r - h) + flux(r - 2 * h)) / (12 * h);
        f(i) = -dflux / std::pow(r, power) + lower_order_eval(spec.lower, exact.value(r));
    }
    return f;
}

std::vector<RefinementRow> mesh_refinement_study(const ProblemSpec& spec, const ManufacturedSolution& exact,
                                                 const std::vector<int>& cells, const SolverConfig& cfg,
                                                 std::optional<double> grading) {
    std::vector<RefinementRow> rows;
    for (int m : cells) {
        const RadialGrid grid = build_radial_grid(spec.dimension, spec.radius, m, grading);
        DiscreteProblem problem{grid, spec.coefficient, spec.lower, manufactured_datum(spec, exact, grid.nodes())};
        const SolveResult result = truncation_continuation(problem, cfg);
        const Eigen::VectorXd target = grid.nodes().unaryExpr(exact.value);
        RefinementRow row;
        row.cells = m;
        row.converged = result.flags.converged;
        row.error = max_abs(result.u - target);
        if (!rows.empty() && row.error > 0.0 && rows.back().error > 0.0)
            row.order = std::log(rows.back().error / row.error) / std::log(static_cast<double>(m) / rows.back().cells);
        rows.push_back(row);
    }
    return rows;
}

namespace {

bool on_boundary(double p, double boundary) {
    return std::isfinite(boundary) && std::abs(p - boundary) <= 1e-12 * std::max(1.0, std::abs(boundary));
}

double lebesgue_integral(const RunRecord& rec, double exponent) {
    const Eigen::VectorXd w = quadrature_weights(rec.solution->grid);
    return w.dot(rec.solution->values.cwiseAbs().array().pow(exponent).matrix());
}

}  // namespace

ProbeResult exponent_probe(const ProblemSpec& base, const std::vector<double>& deltas, const MeshSpec& mesh,
                           const SolverConfig& cfg, double threshold) {
    if (base.lower.kind != LowerOrderKind::Power) throw std::invalid_argument("exponent probe needs a power absorption");
    CheckSettings none;
    none.enabled = std::vector<Check>{};

    ProbeResult out;
    bool any_resolved = false;
    bool all_consistent = true;
    for (double delta : deltas) {
        ProblemSpec spec = base;
        spec.datum.family = DatumFamily::RadialPower;
        spec.datum.delta = delta;

        ProbeRow row;
        row.delta = delta;
        row.prediction = predict(spec);
        if (row.prediction) {
            const double p = spec.lower.exponent;
            const auto [lo, hi] = regime_boundaries(spec.coefficient.gamma, spec.datum.m);
            for (double b : {lo, hi}) {
                if (!on_boundary(p, b)) continue;
                for (double nudge : {1.0 + 1e-9, 1.0 - 1e-9}) {
                    const RegimePrediction other = classify_regime(spec.coefficient.gamma, p * nudge, spec.datum.m);
                    if (other.regime != row.prediction->regime) row.neighbor = other;
                }
            }
        }

        const RunRecord coarse = run_single(spec, mesh, cfg, none, 0);
        MeshSpec fine_mesh = mesh;
        fine_mesh.cells *= 2;
        const RunRecord fine = run_single(spec, fine_mesh, cfg, none, 0);
        row.converged = coarse.solve.flags.converged && fine.solve.flags.converged;
        row.u_fit = coarse.tail_u;
        row.grad_fit = coarse.tail_grad;
        if (!row.converged) {
            row.note = "solver did not converge";
            all_consistent = false;
            out.rows.push_back(row);
            continue;
        }
        const double exponent = spec.lower.exponent * spec.datum.m;
        row.lebesgue_integral = lebesgue_integral(coarse, exponent);
        row.lebesgue_integral_refined = lebesgue_integral(fine, exponent);
        row.stable = std::abs(row.lebesgue_integral_refined - row.lebesgue_integral) <=
                     0.1 * std::max(row.lebesgue_integral, row.lebesgue_integral_refined);

        if (!row.grad_fit.sufficient) {
            row.note = "insufficient tail (bounded solution)";
            row.consistent = row.stable;
        } else if (!row.prediction) {
            row.note = "no prediction for this parameter point";
        } else {
            any_resolved = true;
            row.consistent = row.stable && row.grad_fit.exponent >= threshold * row.prediction->gradient_exponent;
            if (row.neighbor) row.note = "regime boundary: both neighbouring predictions reported";
            all_consistent = all_consistent && row.consistent;
        }
        out.rows.push_back(row);
    }
    out.consistent = any_resolved && all_consistent;
    return out;
}

const char* const kRecordsHeader =
    "run_id,gamma,p,m,N,delta,M,n_final,converged,check_name,lhs,rhs,slack,passed,tail_u,tail_grad,predicted_grad";

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_num(const std::string& s) {
    if (s.empty()) return std::nan("");
    return std::stod(s);
}

std::string check_label(const EstimateReport& r) {
    if (r.parameters.empty()) return r.name;
    std::string params = r.parameters;
    std::replace(params.begin(), params.end(), ',', ';');
    return r.name + "[" + params + "]";
}

}  // namespace

std::vector<RecordRow> flatten(const std::vector<RunRecord>& records) {
    std::vector<RecordRow> rows;
    for (const RunRecord& rec : records) {
        RecordRow base;
        base.run_id = rec.run_id;
        base.gamma = rec.spec.coefficient.gamma;
        if (rec.spec.lower.kind == LowerOrderKind::Power) base.p = rec.spec.lower.exponent;
        base.m = rec.spec.datum.m;
        base.dimension = rec.spec.dimension;
        base.delta = rec.spec.datum.family == DatumFamily::RadialPower ? rec.spec.datum.delta : 0.0;
        base.cells = rec.mesh.cells;
        base.n_final = rec.solve.n_final;
        base.converged = rec.solve.flags.converged;
        base.tail_u = rec.tail_u.sufficient ? rec.tail_u.exponent : std::nan("");
        base.tail_grad = rec.tail_grad.sufficient ? rec.tail_grad.exponent : std::nan("");
        if (rec.prediction) base.predicted_grad = rec.prediction->gradient_exponent;

        if (!rec.solve.flags.converged) {
            RecordRow row = base;
            row.check_name = "solver";
            row.passed = false;
            rows.push_back(row);
            continue;
        }
        for (const EstimateReport& r : rec.reports) {
            RecordRow row = base;
            row.check_name = check_label(r);
            row.lhs = r.lhs;
            row.rhs = r.rhs;
            row.slack = r.relative_slack;
            row.passed = r.passed;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_records_csv(std::ostream& out, const std::vector<RecordRow>& rows) {
    out << kRecordsHeader << '\n';
    for (const RecordRow& r : rows) {
        out << r.run_id << ',' << num(r.gamma) << ',' << (r.p ? num(*r.p) : "") << ',' << num(r.m) << ','
            << r.dimension << ',' << num(r.delta) << ',' << r.cells << ',' << num(r.n_final) << ','
            << (r.converged ? "true" : "false") << ',' << r.check_name << ',' << num(r.lhs) << ',' << num(r.rhs)
            << ',' << num(r.slack) << ',' << (r.passed ? "true" : "false") << ',' << num(r.tail_u) << ','
            << num(r.tail_grad) << ',' << num(r.predicted_grad) << '\n';
    }
}

std::vector<RecordRow> read_records_csv(std::istream& in) {
    std::vector<RecordRow> rows;
    std::string line;
    bool header_seen = false;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != kRecordsHeader) throw std::runtime_error("records.csv: unexpected header");
            header_seen = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 17)
            throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": expected 17 columns");
        try {
            RecordRow r;
            r.run_id = std::stoi(cells[0]);
            r.gamma = parse_num(cells[1]);
            if (!cells[2].empty()) r.p = parse_num(cells[2]);
            r.m = parse_num(cells[3]);
            r.dimension = std::stoi(cells[4]);
            r.delta = parse_num(cells[5]);
            r.cells = std::stoi(cells[6]);
            r.n_final = parse_num(cells[7]);
            r.converged = cells[8] == "true";
            r.check_name = cells[9];
            r.lhs = parse_num(cells[10]);
            r.rhs = parse_num(cells[11]);
            r.slack = parse_num(cells[12]);
            r.passed = cells[13] == "true";
            r.tail_u = parse_num(cells[14]);
            r.tail_grad = parse_num(cells[15]);
            r.predicted_grad = parse_num(cells[16]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::runtime_error("records.csv line " + std::to_string(line_no) + ": malformed number");
        }
    }
    if (!header_seen) throw std::runtime_error("records.csv: missing header");
    return rows;
}

void write_summary(std::ostream& out, const std::vector<RecordRow>& rows) {
    struct RunSummary {
        RecordRow first;
        int checks = 0;
        int passed = 0;
    };
    std::map<int, RunSummary> runs;
    for (const RecordRow& r : rows) {
        auto [it, fresh] = runs.try_emplace(r.run_id, RunSummary{r});
        if (r.check_name == "solver") continue;
        it->second.checks += 1;
        it->second.passed += r.passed ? 1 : 0;
    }

    struct Section {
        const char* title;
        std::function<bool(const RecordRow&, const RegimePrediction&)> member;
    };
    const std::vector<Section> sections{
        {"L^1 data, p > gamma + 1: distributional solution, u in W^{1,s}_0 for s < 2p/(gamma+1+p)",
         [](const RecordRow& r, const RegimePrediction& pr) {
             return r.m == 1.0 && pr.regime == RegimeCase::DistributionalSobolev;
         }},
        {"L^1 data, 0 < p <= gamma + 1: entropy solution, |grad u| in M^{2p/(gamma+1+p)}",
         [](const RecordRow& r, const RegimePrediction& pr) { return r.m == 1.0 && pr.regime == RegimeCase::Entropy; }},
        {"L^m data, p >= (gamma+1)/(m-1): finite energy solution in H^1_0 and L^{pm}",
         [](const RecordRow& r, const RegimePrediction& pr) {
             return r.m > 1.0 && pr.regime == RegimeCase::FiniteEnergy;
         }},
        {"L^m data, gamma/(m-1) < p < (gamma+1)/(m-1): distributional solution in W^{1,2pm/(gamma+1+p)}_0",
         [](const RecordRow& r, const RegimePrediction& pr) {
             return r.m > 1.0 && pr.regime == RegimeCase::DistributionalSobolev;
         }},
        {"L^m data, 0 < p <= gamma/(m-1): entropy solution, |grad u| in M^{2pm/(gamma+1+p)}",
         [](const RecordRow& r, const RegimePrediction& pr) { return r.m > 1.0 && pr.regime == RegimeCase::Entropy; }},
    };

    auto cell = [](double v) {
        if (std::isnan(v)) return std::string("-");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return std::string(buf);
    };
    auto table_header = [&out] {
        out << "| run | gamma | p | m | N | delta | M | converged | predicted grad | measured grad tail | measured u tail | "
               "checks passed |\n";
        out << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    };
    auto table_row = [&](const RunSummary& s) {
        const RecordRow& r = s.first;
        out << "| " << r.run_id << " | " << num(r.gamma) << " | " << (r.p ? num(*r.p) : "-") << " | " << num(r.m)
            << " | " << r.dimension << " | " << num(r.delta) << " | " << r.cells << " | "
            << (r.converged ? "yes" : "no") << " | " << cell(r.predicted_grad) << " | " << cell(r.tail_grad)
            << " | " << cell(r.tail_u) << " | " << s.passed << "/" << s.checks << " |\n";
    };

    int total_checks = 0, total_passed = 0;
    for (const auto& [id, s] : runs) {
        total_checks += s.checks;
        total_passed += s.passed;
    }
    out << "# Run summary\n\n";
    out << runs.size() << " runs, " << total_passed << "/" << total_checks << " checks passed.\n\n";

    std::vector<bool> placed(runs.size(), false);
    for (const Section& section : sections) {
        std::vector<const RunSummary*> members;
        size_t idx = 0;
        for (const auto& [id, s] : runs) {
            const RecordRow& r = s.first;
            if (r.p && r.gamma <= 1.0 && r.m >= 1.0 && section.member(r, classify_regime(r.gamma, *r.p, r.m))) {
                members.push_back(&s);
                placed[idx] = true;
            }
            ++idx;
        }
        out << "## " << section.title << "\n\n";
        if (members.empty()) {
            out << "(no runs)\n\n";
            continue;
        }
        table_header();
        for (const RunSummary* s : members) table_row(*s);
        out << '\n';
    }

    size_t idx = 0;
    bool other_header = false;
    for (const auto& [id, s] : runs) {
        if (!placed[idx++]) {
            if (!other_header) {
                out << "## Runs outside the predicted regimes (no power absorption, or gamma > 1)\n\n";
                table_header();
                other_header = true;
            }
            table_row(s);
        }
    }
    if (other_header) out << '\n';
}

void emit_outputs(const std::vector<RunRecord>& records, const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    std::error_code ec;
    fs::create_directories(dir / "plotdata", ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + (dir / "plotdata").string() + "': " + ec.message());

    auto open = [](const fs::path& path) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        return out;
    };

    const std::vector<RecordRow> rows = flatten(records);
    {
        std::ofstream out = open(dir / "records.csv");
        const std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "# degenlab records, generated " << stamp << '\n';
        write_records_csv(out, rows);
        if (!out) throw std::runtime_error("write failed for '" + (dir / "records.csv").string() + "'");
    }
    {
        std::ofstream out = open(dir / "summary.md");
        write_summary(out, rows);
        if (!out) throw std::runtime_error("write failed for '" + (dir / "summary.md").string() + "'");
    }
    for (const RunRecord& rec : records) {
        if (!rec.solve.flags.converged) continue;
        char name[64];
        const std::pair<const char*, const DistributionFunction*> dists[] = {{"u", &rec.u_distribution},
                                                                              {"grad", &rec.grad_distribution}};
        for (const auto& [tag, df] : dists) {
            std::snprintf(name, sizeof name, "run_%04d_%s.dat", rec.run_id, tag);
            std::ofstream out = open(dir / "plotdata" / name);
            out << "# k mu(k)\n";
            char line[80];
            for (Eigen::Index j = 0; j < df->levels.size(); ++j) {
                if (df->measures(j) <= 0.0) continue;
                std::snprintf(line, sizeof line, "%.17g %.17g\n", df->levels(j), df->measures(j));
                out << line;
            }
            if (!out) throw std::runtime_error("write failed for '" + (dir / "plotdata" / name).string() + "'");
        }
    }
}

}  // namespace degenlab

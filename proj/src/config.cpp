#include "degenlab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace degenlab {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

struct Entry {
    std::string value;
    int line;
};

class Reader {
public:
    std::vector<std::string> errors;

    void error(int line, const std::string& msg) { errors.push_back("line " + std::to_string(line) + ": " + msg); }

    template <typename T>
    bool number(const std::string& key, const Entry& e, T& out) {
        const std::string& v = e.value;
        T parsed{};
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
        if (ec != std::errc() || ptr != v.data() + v.size()) {
            error(e.line, key + ": expected " + (std::is_integral_v<T> ? "an integer" : "a number") + ", got '" + v +
                              "'");
            return false;
        }
        out = parsed;
        return true;
    }

    bool boolean(const std::string& key, const Entry& e, bool& out) {
        if (e.value == "true" || e.value == "yes" || e.value == "1") {
            out = true;
            return true;
        }
        if (e.value == "false" || e.value == "no" || e.value == "0") {
            out = false;
            return true;
        }
        error(e.line, key + ": expected true or false, got '" + e.value + "'");
        return false;
    }

    template <typename T>
    bool list(const std::string& key, const Entry& e, std::vector<T>& out) {
        std::vector<T> values;
        for (const std::string& item : split_list(e.value)) {
            T v{};
            if (!number(key, Entry{item, e.line}, v)) return false;
            values.push_back(v);
        }
        if (values.empty()) {
            error(e.line, key + ": empty list");
            return false;
        }
        out = std::move(values);
        return true;
    }
};

using Section = std::map<std::string, Entry>;

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid config:\n  " + join(violations, "\n  ")), violations_(std::move(violations)) {}

SweepSpec Config::sweep() const {
    SweepSpec s;
    s.base = problem;
    s.mesh = mesh;
    s.solver = solver;
    s.checks = checks;
    s.axes = axes;
    s.max_points = max_points;
    s.threads = threads;
    return s;
}

Config parse_config(const std::string& text) {
    static const std::map<std::string, std::set<std::string>> known{
        {"problem",
         {"dimension", "radius", "alpha", "beta", "gamma", "coefficient_form", "spatial_amplitude", "p", "sigma",
          "datum", "amplitude", "delta", "center", "width", "m"}},
        {"mesh", {"cells", "grading"}},
        {"solver",
         {"picard_tol", "picard_max", "newton_tol", "newton_max", "min_step", "n_initial", "n_max",
          "power_regularization", "singular_margin", "relaxation_after", "face_scheme", "warm_start"}},
        {"checks", {"enabled", "tolerance", "lambdas", "k_levels", "t_fractions", "tail_tolerance"}},
        {"sweep", {"gamma", "p", "m", "dimension", "delta", "cells", "threads", "max_points"}},
        {"mms", {"profile", "amplitude", "cells"}},
        {"output", {"directory"}},
    };

    Reader rd;
    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                rd.error(line_no, "malformed section header '" + line + "'");
                continue;
            }
            current = trim(line.substr(1, line.size() - 2));
            if (!known.count(current)) rd.error(line_no, "unknown section [" + current + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            rd.error(line_no, "expected 'key = value', got '" + line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (current.empty()) {
            rd.error(line_no, "key '" + key + "' outside any section");
            continue;
        }
        if (!known.count(current)) continue;
        if (!known.at(current).count(key)) {
            rd.error(line_no, "unknown key '" + key + "' in [" + current + "]");
            continue;
        }
        if (sections[current].count(key)) rd.error(line_no, "duplicate key '" + key + "' in [" + current + "]");
        sections[current][key] = Entry{value, line_no};
    }

    Config cfg;
    auto each = [&](const std::string& name, const std::function<void(const std::string&, const Entry&)>& fn) {
        for (const auto& [key, entry] : sections[name]) fn(key, entry);
    };

    // [problem]
    ProblemSpec& pb = cfg.problem;
    pb.datum.family = DatumFamily::Constant;
    pb.datum.amplitude = 1.0;
    std::optional<double> p, sigma;
    each("problem", [&](const std::string& key, const Entry& e) {
        if (key == "dimension") rd.number(key, e, pb.dimension);
        else if (key == "radius") rd.number(key, e, pb.radius);
        else if (key == "alpha") rd.number(key, e, pb.coefficient.alpha);
        else if (key == "beta") rd.number(key, e, pb.coefficient.beta);
        else if (key == "gamma") rd.number(key, e, pb.coefficient.gamma);
        else if (key == "spatial_amplitude") rd.number(key, e, pb.coefficient.spatial_amplitude);
        else if (key == "amplitude") rd.number(key, e, pb.datum.amplitude);
        else if (key == "delta") rd.number(key, e, pb.datum.delta);
        else if (key == "center") rd.number(key, e, pb.datum.center);
        else if (key == "width") rd.number(key, e, pb.datum.width);
        else if (key == "m") rd.number(key, e, pb.datum.m);
        else if (key == "p") {
            double v;
            if (rd.number(key, e, v)) p = v;
        } else if (key == "sigma") {
            double v;
            if (rd.number(key, e, v)) sigma = v;
        } else if (key == "coefficient_form") {
            if (e.value == "sharp") pb.coefficient.form = CoefficientForm::Sharp;
            else if (e.value == "scaled") pb.coefficient.form = CoefficientForm::Scaled;
            else rd.error(e.line, "coefficient_form must be sharp or scaled, got '" + e.value + "'");
        } else if (key == "datum") {
            if (e.value == "constant") pb.datum.family = DatumFamily::Constant;
            else if (e.value == "radial_power") pb.datum.family = DatumFamily::RadialPower;
            else if (e.value == "bump") pb.datum.family = DatumFamily::Bump;
            else rd.error(e.line, "datum must be constant, radial_power or bump, got '" + e.value + "'");
        }
    });
    if (p && sigma) rd.errors.push_back("lower-order term must be exactly one kind (both p and sigma given)");
    else if (p) pb.lower = LowerOrderTerm::power(*p);
    else if (sigma) pb.lower = LowerOrderTerm::singular(*sigma);

    // [mesh]
    each("mesh", [&](const std::string& key, const Entry& e) {
        if (key == "cells") rd.number(key, e, cfg.mesh.cells);
        else if (key == "grading") {
            double g;
            if (rd.number(key, e, g)) cfg.mesh.grading = g;
        }
    });

    // [solver]
    SolverConfig& sv = cfg.solver;
    each("solver", [&](const std::string& key, const Entry& e) {
        if (key == "picard_tol") rd.number(key, e, sv.picard_tol);
        else if (key == "picard_max") rd.number(key, e, sv.picard_max);
        else if (key == "newton_tol") rd.number(key, e, sv.newton_tol);
        else if (key == "newton_max") rd.number(key, e, sv.newton_max);
        else if (key == "min_step") rd.number(key, e, sv.min_step);
        else if (key == "n_initial") rd.number(key, e, sv.n_initial);
        else if (key == "n_max") rd.number(key, e, sv.n_max);
        else if (key == "power_regularization") rd.number(key, e, sv.power_regularization);
        else if (key == "singular_margin") rd.number(key, e, sv.singular_margin);
        else if (key == "relaxation_after") rd.number(key, e, sv.relaxation_after);
        else if (key == "warm_start") rd.boolean(key, e, sv.warm_start);
        else if (key == "face_scheme") {
            if (e.value == "upwind") sv.face_scheme = FaceScheme::Upwind;
            else if (e.value == "arithmetic") sv.face_scheme = FaceScheme::Arithmetic;
            else rd.error(e.line, "face_scheme must be upwind or arithmetic, got '" + e.value + "'");
        }
    });

    // [checks]
    CheckSettings& ck = cfg.checks;
    each("checks", [&](const std::string& key, const Entry& e) {
        if (key == "tolerance") rd.number(key, e, ck.tolerance);
        else if (key == "lambdas") rd.list(key, e, ck.lambdas);
        else if (key == "k_levels") rd.number(key, e, ck.k_level_count);
        else if (key == "t_fractions") rd.list(key, e, ck.t_fractions);
        else if (key == "tail_tolerance") rd.number(key, e, ck.tail_tolerance);
        else if (key == "enabled") {
            if (e.value == "all") return;
            std::vector<Check> enabled;
            for (const std::string& name : split_list(e.value)) {
                if (auto c = check_from_string(name)) enabled.push_back(*c);
                else rd.error(e.line, "unknown check '" + name + "'");
            }
            ck.enabled = enabled;
        }
    });

    // [sweep]
    each("sweep", [&](const std::string& key, const Entry& e) {
        if (key == "gamma") rd.list(key, e, cfg.axes.gamma);
        else if (key == "p") rd.list(key, e, cfg.axes.p);
        else if (key == "m") rd.list(key, e, cfg.axes.m);
        else if (key == "dimension") rd.list(key, e, cfg.axes.dimension);
        else if (key == "delta") rd.list(key, e, cfg.axes.delta);
        else if (key == "cells") rd.list(key, e, cfg.axes.cells);
        else if (key == "threads") rd.number(key, e, cfg.threads);
        else if (key == "max_points") rd.number(key, e, cfg.max_points);
    });

    // [mms]
    each("mms", [&](const std::string& key, const Entry& e) {
        if (key == "amplitude") rd.number(key, e, cfg.mms.amplitude);
        else if (key == "cells") rd.list(key, e, cfg.mms.cells);
        else if (key == "profile") {
            if (e.value == "quadratic" || e.value == "zero") cfg.mms.profile = e.value;
            else rd.error(e.line, "mms profile must be quadratic or zero, got '" + e.value + "'");
        }
    });

    each("output", [&](const std::string&, const Entry& e) {
        if (e.value.empty()) rd.error(e.line, "output directory must not be empty");
        else cfg.output_directory = e.value;
    });

    // Constraints. Each one is checked independently so all violations show up.
    auto guard = [&](const char* what, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const std::exception& ex) {
            rd.errors.push_back(std::string(what) + ": " + ex.what());
        }
    };
    if (pb.dimension < 3) rd.errors.push_back("dimension must be ≥ 3 (got " + std::to_string(pb.dimension) + ")");
    if (!(pb.radius > 0.0)) rd.errors.push_back("radius must be positive");
    guard("coefficient", [&] { pb.coefficient.validate(); });
    guard("lower-order term", [&] { pb.lower.validate(); });
    guard("datum", [&] { pb.datum.validate(); });
    if (pb.dimension >= 3 && pb.radius > 0.0) guard("problem", [&] { pb.validate(); });

    if (cfg.mesh.cells < 8) rd.errors.push_back("mesh cells must be ≥ 8");
    if (cfg.mesh.grading && !(*cfg.mesh.grading >= 1.0 && *cfg.mesh.grading <= 4.0))
        rd.errors.push_back("mesh grading must lie in [1, 4]");
    guard("solver", [&] { sv.validate(); });

    if (!(ck.tolerance >= 0.0)) rd.errors.push_back("checks tolerance must be nonnegative");
    for (double l : ck.lambdas)
        if (!(l > 1.0)) rd.errors.push_back("checks lambdas must exceed 1");
    if (ck.k_level_count < 1) rd.errors.push_back("checks k_levels must be ≥ 1");
    for (double t : ck.t_fractions)
        if (!(t >= 0.0 && t < 1.0)) rd.errors.push_back("checks t_fractions must lie in [0, 1)");
    if (!(ck.tail_tolerance > 0.0 && ck.tail_tolerance < 1.0))
        rd.errors.push_back("checks tail_tolerance must lie in (0, 1)");
    guard("checks", [&] { ck.resolve(pb.lower.kind); });

    if (cfg.threads < 1) rd.errors.push_back("sweep threads must be ≥ 1");
    for (double c : cfg.axes.cells)
        if (c < 8 || c != std::floor(c)) rd.errors.push_back("sweep cells must be integers ≥ 8");
    for (double n : cfg.axes.dimension)
        if (n < 3 || n != std::floor(n)) rd.errors.push_back("sweep dimension must be ≥ 3 (integers)");
    if (cfg.axes.product_size() > 1 && rd.errors.empty()) {
        guard("sweep", [&] {
            const auto points = expand_sweep(cfg.sweep());
            for (size_t i = 0; i < points.size(); ++i) {
                try {
                    points[i].spec.validate();
                    cfg.checks.resolve(points[i].spec.lower.kind);
                } catch (const std::exception& ex) {
                    throw std::invalid_argument("point " + std::to_string(i) + ": " + ex.what());
                }
            }
        });
    }

    for (int c : cfg.mms.cells)
        if (c < 8) rd.errors.push_back("mms cells must be ≥ 8");

    if (!rd.errors.empty()) throw ConfigError(rd.errors);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace degenlab

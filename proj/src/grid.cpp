#include "degenlab/grid.hpp"

#include "degenlab/problem_model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace degenlab {

RadialGrid::RadialGrid(int dimension, double radius, Eigen::VectorXd faces, double grading)
    : dimension_(dimension), radius_(radius), grading_(grading), faces_(std::move(faces)) {
    const Eigen::Index m = faces_.size() - 1;
    nodes_ = 0.5 * (faces_.head(m) + faces_.tail(m));
}

Eigen::VectorXd RadialGrid::widths() const {
    const Eigen::Index m = size();
    return faces_.tail(m) - faces_.head(m);
}

double RadialGrid::face_spacing(Eigen::Index f) const {
    const Eigen::Index m = size();
    if (f == 0) return nodes_(0);
    if (f == m) return radius_ - nodes_(m - 1);
    return nodes_(f) - nodes_(f - 1);
}

double RadialGrid::shell_volume(Eigen::Index i) const {
    const double n = dimension_;
    return (std::pow(faces_(i + 1), n) - std::pow(faces_(i), n)) / n;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
    return dimension_ == other.dimension_ && radius_ == other.radius_ &&
           faces_.size() == other.faces_.size() && faces_ == other.faces_;
}

namespace {

double geometric_ratio(double first, double radius, int cells) {
    auto total = [&](double q) {
        double sum = 0.0, term = first;
        for (int i = 0; i < cells; ++i, term *= q) sum += term;
        return sum;
    };
    double lo = 1.0;
    double hi = std::pow(radius / first, 1.0 / (cells - 1));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < radius ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

RadialGrid build_radial_grid(int dimension, double radius, int cells, std::optional<double> grading) {
    if (dimension < 3) throw std::invalid_argument("dimension must be >= 3");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be positive");
    if (cells < 2) throw std::invalid_argument("grid needs at least 2 cells");
    const double g = grading.value_or(1.0);
    if (!(g >= 1.0 && g <= 4.0)) throw std::invalid_argument("grading factor must lie in [1, 4]");

    Eigen::VectorXd faces(cells + 1);
    if (g == 1.0) {
        for (int i = 0; i <= cells; ++i) faces(i) = radius * i / cells;
    } else {
        const double first = radius / cells / g;
        const double q = geometric_ratio(first, radius, cells);
        faces(0) = 0.0;
        double h = first;
        for (int i = 1; i <= cells; ++i, h *= q) faces(i) = faces(i - 1) + h;
    }
    faces(cells) = radius;
    return RadialGrid(dimension, radius, std::move(faces), g);
}

Eigen::VectorXd quadrature_weights(const RadialGrid& grid) {
    const double omega = unit_sphere_measure(grid.dimension());
    Eigen::VectorXd w(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) w(i) = omega * grid.shell_volume(i);
    return w;
}

Eigen::VectorXd face_weights(const RadialGrid& grid) {
    const double omega = unit_sphere_measure(grid.dimension());
    const Eigen::Index m = grid.size();
    Eigen::VectorXd w(m + 1);
    for (Eigen::Index f = 0; f <= m; ++f)
        w(f) = omega * std::pow(grid.faces()(f), grid.dimension() - 1) * grid.face_spacing(f);
    return w;
}

double integrate(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& weights) {
    if (u.size() != weights.size()) throw std::invalid_argument("integrate: field and weights live on different grids");
    return weights.dot(u);
}

Eigen::VectorXd face_gradient(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u) {
    const Eigen::Index m = grid.size();
    if (u.size() != m) throw std::invalid_argument("face_gradient: field size does not match grid");
    Eigen::VectorXd g(m + 1);
    g(0) = 0.0;
    for (Eigen::Index f = 1; f < m; ++f) g(f) = (u(f) - u(f - 1)) / grid.face_spacing(f);
    g(m) = -u(m - 1) / grid.face_spacing(m);
    return g;
}

void write_grid_function(std::ostream& out, const GridFunction& u) {
    const RadialGrid& grid = u.grid;
    char buf[96];
    out << "# N = " << grid.dimension() << '\n';
    std::snprintf(buf, sizeof buf, "# R = %.17g\n", grid.radius());
    out << buf;
    out << "# M = " << grid.size() << '\n';
    std::snprintf(buf, sizeof buf, "# grading = %.17g\n", grid.grading());
    out << buf;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", grid.nodes()(i), u.values(i));
        out << buf;
    }
}

void write_grid_function(const std::string& path, const GridFunction& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_grid_function(out, u);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

GridFunction read_grid_function(std::istream& in) {
    std::optional<int> dimension, cells;
    std::optional<double> radius;
    double grading = 1.0;
    std::vector<double> radii, values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key, eq;
            double value = 0.0;
            if (!(meta >> key >> eq >> value) || eq != "=") continue;
            if (key == "N") dimension = static_cast<int>(value);
            else if (key == "R") radius = value;
            else if (key == "M") cells = static_cast<int>(value);
            else if (key == "grading") grading = value;
            continue;
        }
        std::istringstream row(line);
        double r = 0.0, v = 0.0;
        if (!(row >> r >> v)) throw std::runtime_error("malformed grid function line: '" + line + "'");
        radii.push_back(r);
        values.push_back(v);
    }
    if (!dimension || !radius || !cells) throw std::runtime_error("grid function header lacks N, R or M");
    RadialGrid grid = build_radial_grid(*dimension, *radius, *cells, grading);
    if (static_cast<Eigen::Index>(values.size()) != grid.size())
        throw std::runtime_error("grid function has " + std::to_string(values.size()) + " rows, header says " +
                                 std::to_string(grid.size()));
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (std::abs(radii[i] - grid.nodes()(i)) > 1e-12 * grid.radius())
            throw std::runtime_error("grid function node " + std::to_string(i) + " does not match the header mesh");
        if (!std::isfinite(values[i])) throw std::runtime_error("grid function holds a non-finite value");
    }
    return {std::move(grid), Eigen::Map<Eigen::VectorXd>(values.data(), values.size())};
}

GridFunction read_grid_function(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_grid_function(in);
}

}  // namespace degenlab

#ifndef DEGENLAB_GRID_HPP
#define DEGENLAB_GRID_HPP

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace degenlab {

/// Cell-centered mesh of [0, R] standing in for the ball of radius R in R^N.
///
/// Faces are 0 = rho_0 < rho_1 < ... < rho_M = R and nodes sit at cell
/// midpoints. With a grading factor g > 1 the widths form a geometric
/// sequence whose first cell is (R/M)/g.
class RadialGrid {
public:
    RadialGrid(int dimension, double radius, Eigen::VectorXd faces, double grading);

    int dimension() const { return dimension_; }
    double radius() const { return radius_; }
    Eigen::Index size() const { return nodes_.size(); }
    double grading() const { return grading_; }

    const Eigen::VectorXd& nodes() const { return nodes_; }
    const Eigen::VectorXd& faces() const { return faces_; }

    double width(Eigen::Index i) const { return faces_(i + 1) - faces_(i); }
    Eigen::VectorXd widths() const;

    /// Distance across face f (0..M): node spacing for interior faces,
    /// R - r_{M-1} for the boundary face and r_0 for the origin face.
    double face_spacing(Eigen::Index f) const;

    /// Measure of cell i as a subset of R^N divided by the sphere measure:
    /// (rho_{i+1}^N - rho_i^N) / N.
    double shell_volume(Eigen::Index i) const;

    bool same_as(const RadialGrid& other) const;

private:
    int dimension_;
    double radius_;
    double grading_;
    Eigen::VectorXd faces_;
    Eigen::VectorXd nodes_;
};

RadialGrid build_radial_grid(int dimension, double radius, int cells,
                             std::optional<double> grading = std::nullopt);

/// Per-node quadrature weights realizing \int_{B_R} u dx on radial
/// functions: w_i = omega_N (rho_{i+1}^N - rho_i^N) / N.
Eigen::VectorXd quadrature_weights(const RadialGrid& grid);

/// Per-face weights omega_N rho_f^{N-1} * face_spacing(f) for gradient
/// quantities. The origin face has weight 0.
Eigen::VectorXd face_weights(const RadialGrid& grid);

double integrate(const Eigen::Ref<const Eigen::VectorXd>& u,
                 const Eigen::Ref<const Eigen::VectorXd>& weights);

/// Discrete radial derivative on the M+1 faces: 0 at the origin, divided
/// differences inside, and the Dirichlet pull-down (0 - u_{M-1})/(R - r_{M-1})
/// at r = R.
Eigen::VectorXd face_gradient(const RadialGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& u);

/// Pointwise T_k(s) = max(-k, min(k, s)).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
truncate(const Eigen::MatrixBase<Derived>& u, typename Derived::Scalar k) {
    if (!(k > 0)) throw std::invalid_argument("truncation level must be positive");
    return u.cwiseMax(-k).cwiseMin(k);
}

inline double truncate(double s, double k) { return std::max(-k, std::min(k, s)); }

/// Nodal field together with the grid it lives on.
struct GridFunction {
    RadialGrid grid;
    Eigen::VectorXd values;
};

/// Two-column text: '#'-prefixed metadata header (N, R, M, grading), then
/// one "r_i value" line per node with 17 significant digits.
void write_grid_function(std::ostream& out, const GridFunction& u);
void write_grid_function(const std::string& path, const GridFunction& u);
GridFunction read_grid_function(std::istream& in);
GridFunction read_grid_function(const std::string& path);

}  // namespace degenlab

#endif  // DEGENLAB_GRID_HPP

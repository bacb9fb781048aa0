#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <memory>

namespace vkshell {

enum class BoundaryMode { Periodic, DirichletGhost };

struct Box {
    double a1 = 0.0, b1 = 1.0;
    double a2 = 0.0, b2 = 1.0;

    double width() const { return b1 - a1; }
    double height() const { return b2 - a2; }
    double area() const { return width() * height(); }
};

using SparseOp = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discrete differential operators on node values, ghost extension built in.
struct Stencils {
    SparseOp d1, d2;        // centered first derivatives
    SparseOp d11, d22;      // compact second derivatives
    SparseOp d12;           // 4-point cross stencil
    SparseOp lap;           // d11 + d22
    SparseOp bilap;         // lap * lap
};

/// Uniform tensor-product grid over a rectangle.  Node (i, j) has index j*nx + i.
///
/// Periodic grids omit the right/top edge (dx = L/nx); dirichlet-ghost grids include
/// both edges (dx = L/(nx-1)) and extend fields into ghost nodes by quadratic
/// extrapolation when a stencil reaches past the boundary.
class Grid2D {
public:
    static constexpr int kMinNodes = 8;

    Grid2D(int nx, int ny, Box domain, BoundaryMode bc);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int size() const { return nx_ * ny_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }
    const Box& domain() const { return box_; }
    BoundaryMode bc() const { return bc_; }
    bool periodic() const { return bc_ == BoundaryMode::Periodic; }

    int index(int i, int j) const { return j * nx_ + i; }
    double x1(int i) const { return box_.a1 + i * dx_; }
    double x2(int j) const { return box_.a2 + j * dy_; }
    double x1_of(int n) const { return x1(n % nx_); }
    double x2_of(int n) const { return x2(n / nx_); }

    /// Quadrature weights: rectangle rule (periodic) or trapezoid (dirichlet).
    const Eigen::VectorXd& weights() const { return *weights_; }
    const Stencils& ops() const { return *ops_; }

    /// Distance (in cells) of a node from the nearest boundary; large for periodic grids.
    int boundary_distance(int n) const;

    bool operator==(const Grid2D& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && bc_ == o.bc_ && box_.a1 == o.box_.a1 && box_.b1 == o.box_.b1 &&
               box_.a2 == o.box_.a2 && box_.b2 == o.box_.b2;
    }

private:
    int nx_, ny_;
    Box box_;
    BoundaryMode bc_;
    double dx_, dy_;
    std::shared_ptr<const Eigen::VectorXd> weights_;
    std::shared_ptr<const Stencils> ops_;
};

/// Throws ShapeError unless both grids are identical.
void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where);

} // namespace vkshell

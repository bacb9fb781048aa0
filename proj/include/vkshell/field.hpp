#pragma once

#include "vkshell/closed_form.hpp"
#include "vkshell/errors.hpp"
#include "vkshell/grid.hpp"

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>

namespace vkshell {

/// Per-node samples of an R×C tensor; each component is stored as its own plane.
template <int R, int C>
class TensorField {
public:
    static constexpr int rows = R;
    static constexpr int cols = C;
    static constexpr int ncomp = R * C;

    explicit TensorField(Grid2D grid) : grid_(std::move(grid)) {
        for (auto& p : planes_) p = Eigen::VectorXd::Zero(grid_.size());
    }

    const Grid2D& grid() const { return grid_; }
    int size() const { return grid_.size(); }

    Eigen::VectorXd& operator()(int i, int j = 0) { return planes_[i * C + j]; }
    const Eigen::VectorXd& operator()(int i, int j = 0) const { return planes_[i * C + j]; }
    Eigen::VectorXd& plane(int k) { return planes_[k]; }
    const Eigen::VectorXd& plane(int k) const { return planes_[k]; }

    /// Scalar-field convenience.
    Eigen::VectorXd& values() requires(R == 1 && C == 1) { return planes_[0]; }
    const Eigen::VectorXd& values() const requires(R == 1 && C == 1) { return planes_[0]; }

    Eigen::Matrix<double, R, C> at(int n) const {
        Eigen::Matrix<double, R, C> m;
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) m(i, j) = planes_[i * C + j][n];
        return m;
    }
    void set(int n, const Eigen::Matrix<double, R, C>& m) {
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) planes_[i * C + j][n] = m(i, j);
    }

    bool all_finite() const {
        for (const auto& p : planes_)
            if (!p.allFinite()) return false;
        return true;
    }

    TensorField& operator+=(const TensorField& o) {
        require_same_grid(grid_, o.grid_, "field +=");
        for (int k = 0; k < ncomp; ++k) planes_[k] += o.planes_[k];
        return *this;
    }
    TensorField& operator-=(const TensorField& o) {
        require_same_grid(grid_, o.grid_, "field -=");
        for (int k = 0; k < ncomp; ++k) planes_[k] -= o.planes_[k];
        return *this;
    }
    TensorField& operator*=(double s) {
        for (auto& p : planes_) p *= s;
        return *this;
    }
    friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
    friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
    friend TensorField operator*(double s, TensorField a) { return a *= s; }

private:
    Grid2D grid_;
    std::array<Eigen::VectorXd, ncomp> planes_;
};

using ScalarField = TensorField<1, 1>;
using VectorField2 = TensorField<2, 1>;
using VectorField3 = TensorField<3, 1>;
using MatrixField2 = TensorField<2, 2>;
using MatrixField3 = TensorField<3, 3>;

/// Node samples of d^(d1+d2) f / dx1^d1 dx2^d2.
ScalarField sample(const ClosedForm& f, const Grid2D& grid, int d1 = 0, int d2 = 0);

template <int R, int C>
void require_finite(const TensorField<R, C>& f, const char* where) {
    if (!f.all_finite()) throw InputError(std::string(where) + ": field contains non-finite samples");
}

/// max |F12 - F21| / (1 + |F|) over nodes.
double asymmetry(const MatrixField2& f);

/// CSV with header x1,x2,c11[,c12,...]; one row per node in index order, 17 significant digits.
template <int R, int C>
void write_csv(std::ostream& os, const TensorField<R, C>& f);
template <int R, int C>
void write_csv(const std::string& path, const TensorField<R, C>& f);
/// Reads a CSV written by write_csv onto `grid`; the node coordinates must match.
template <int R, int C>
TensorField<R, C> read_csv(std::istream& is, const Grid2D& grid);

} // namespace vkshell

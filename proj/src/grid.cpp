#include "vkshell/grid.hpp"

#include "vkshell/errors.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>
#include <vector>

namespace vkshell {

namespace {

struct Tap {
    int index;
    double weight;
};

/// Node taps realizing sample `i` (possibly outside [0, n)) along one axis.
std::vector<Tap> axis_taps(int i, int n, bool periodic) {
    if (i >= 0 && i < n) return {{i, 1.0}};
    if (periodic) return {{((i % n) + n) % n, 1.0}};
    // Quadratic extrapolation u_{-1} = 3u_0 - 3u_1 + u_2, applied recursively for deeper ghosts.
    std::vector<Tap> out;
    auto accumulate = [&](int k, double w) {
        for (const auto& t : axis_taps(k, n, periodic)) out.push_back({t.index, w * t.weight});
    };
    if (i < 0) {
        accumulate(i + 1, 3.0);
        accumulate(i + 2, -3.0);
        accumulate(i + 3, 1.0);
    } else {
        accumulate(i - 1, 3.0);
        accumulate(i - 2, -3.0);
        accumulate(i - 3, 1.0);
    }
    return out;
}

struct Offset {
    int di, dj;
    double w;
};

SparseOp build(int nx, int ny, bool periodic, const std::vector<Offset>& stencil) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nx) * ny * stencil.size() * 2);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int row = j * nx + i;
            for (const auto& s : stencil) {
                const auto ti = axis_taps(i + s.di, nx, periodic);
                const auto tj = axis_taps(j + s.dj, ny, periodic);
                for (const auto& a : ti)
                    for (const auto& b : tj) trip.emplace_back(row, b.index * nx + a.index, s.w * a.weight * b.weight);
            }
        }
    }
    SparseOp m(nx * ny, nx * ny);
    m.setFromTriplets(trip.begin(), trip.end());
    m.prune(0.0);
    return m;
}

} // namespace

Grid2D::Grid2D(int nx, int ny, Box domain, BoundaryMode bc) : nx_(nx), ny_(ny), box_(domain), bc_(bc) {
    if (nx < kMinNodes || ny < kMinNodes)
        throw SizingError("grid needs at least " + std::to_string(kMinNodes) + " nodes per axis, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
    if (!(box_.width() > 0.0) || !(box_.height() > 0.0)) throw SizingError("grid domain must have positive extent");
    const bool per = periodic();
    dx_ = box_.width() / (per ? nx : nx - 1);
    dy_ = box_.height() / (per ? ny : ny - 1);

    auto w = std::make_shared<Eigen::VectorXd>(size());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double wi = dx_, wj = dy_;
            if (!per) {
                if (i == 0 || i == nx - 1) wi *= 0.5;
                if (j == 0 || j == ny - 1) wj *= 0.5;
            }
            (*w)[index(i, j)] = wi * wj;
        }
    }
    weights_ = std::move(w);

    auto s = std::make_shared<Stencils>();
    const double hx = 1.0 / dx_, hy = 1.0 / dy_;
    s->d1 = build(nx, ny, per, {{1, 0, 0.5 * hx}, {-1, 0, -0.5 * hx}});
    s->d2 = build(nx, ny, per, {{0, 1, 0.5 * hy}, {0, -1, -0.5 * hy}});
    s->d11 = build(nx, ny, per, {{1, 0, hx * hx}, {0, 0, -2 * hx * hx}, {-1, 0, hx * hx}});
    s->d22 = build(nx, ny, per, {{0, 1, hy * hy}, {0, 0, -2 * hy * hy}, {0, -1, hy * hy}});
    const double c = 0.25 * hx * hy;
    s->d12 = build(nx, ny, per, {{1, 1, c}, {-1, -1, c}, {1, -1, -c}, {-1, 1, -c}});
    s->lap = s->d11 + s->d22;
    s->bilap = (s->lap * s->lap).pruned();
    ops_ = std::move(s);
}

int Grid2D::boundary_distance(int n) const {
    if (periodic()) return std::numeric_limits<int>::max() / 2;
    const int i = n % nx_, j = n / nx_;
    return std::min({i, nx_ - 1 - i, j, ny_ - 1 - j});
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* where) {
    if (!(a == b)) throw ShapeError(std::string(where) + ": fields live on different grids");
}

} // namespace vkshell

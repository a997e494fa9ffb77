#include "forestlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace forestlab {

GridSpec::GridSpec(Matrix m, Eigen::VectorXd g) : basis(std::move(m)), shift(std::move(g)) {
    if (shift.size() != basis.n())
        throw ValidationError("translation length must match matrix dimension");
}

Forest::Forest(std::vector<GridSpec> gs) : grids(std::move(gs)) {
    if (grids.empty()) throw ValidationError("forest needs at least one grid");
    for (const auto& g : grids)
        if (g.dim() != grids.front().dim())
            throw ValidationError("all grids in a forest must share a dimension");
}

SegmentQuery::SegmentQuery(Eigen::VectorXd a, Eigen::VectorXd b, double eps, double l_max)
    : anchor(std::move(a)), direction(std::move(b)), epsilon(eps), budget(l_max) {
    if (anchor.size() != direction.size())
        throw ValidationError("anchor and direction dimensions differ");
    if (std::abs(direction.norm() - 1.0) > 1e-12)
        throw ValidationError("direction must be a unit vector");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(budget > 0.0)) throw ValidationError("length budget must be positive");
}

Eigen::MatrixXd lll_reduce(Eigen::MatrixXd basis, double delta) {
    const int n = static_cast<int>(basis.cols());
    Eigen::MatrixXd ortho = basis;                 // Gram-Schmidt vectors
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, n);
    auto recompute = [&] {
        for (int i = 0; i < n; ++i) {
            ortho.col(i) = basis.col(i);
            for (int j = 0; j < i; ++j) {
                mu(i, j) = basis.col(i).dot(ortho.col(j)) / ortho.col(j).squaredNorm();
                ortho.col(i) -= mu(i, j) * ortho.col(j);
            }
        }
    };
    recompute();
    int iterations = 0;
    for (int k = 1; k < n && iterations < 10000; ++iterations) {
        for (int j = k - 1; j >= 0; --j) {
            double r = std::round(mu(k, j));
            if (std::abs(r) > 0.5) {
                basis.col(k) -= r * basis.col(j);
                recompute();
            }
        }
        if (ortho.col(k).squaredNorm() >=
            (delta - mu(k, k - 1) * mu(k, k - 1)) * ortho.col(k - 1).squaredNorm()) {
            ++k;
        } else {
            basis.col(k).swap(basis.col(k - 1));
            recompute();
            k = std::max(k - 1, 1);
        }
    }
    return basis;
}

namespace {

// Odometer over the integer box [lo, hi]; invokes fn on every point.
template <typename Fn>
void for_each_lattice_point(const std::vector<long long>& lo,
                            const std::vector<long long>& hi, Fn&& fn) {
    const int n = static_cast<int>(lo.size());
    for (int j = 0; j < n; ++j)
        if (lo[j] > hi[j]) return;
    std::vector<long long> z = lo;
    while (true) {
        fn(z);
        int j = n - 1;
        while (j >= 0 && z[j] == hi[j]) {
            z[j] = lo[j];
            --j;
        }
        if (j < 0) return;
        ++z[j];
    }
}

double point_segment_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& anchor,
                              const Eigen::VectorXd& dir, double half_length) {
    double t = (p - anchor).dot(dir);
    t = std::clamp(t, -half_length, half_length);
    return (p - anchor - t * dir).norm();
}

}  // namespace

CoveringRadius covering_radius(const GridSpec& grid) {
    const int n = grid.dim();
    Eigen::MatrixXd basis = lll_reduce(grid.basis.numeric());
    CoveringRadius out;
    if (n == 1) {
        out.value = std::abs(basis(0, 0)) / 2.0;
        out.exact = true;
        return out;
    }
    // Gram-Schmidt box bound: every point is within half the box diagonal of
    // the lattice, so the covering radius is at most r_box.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    double diag2 = 0.0;
    for (int i = 0; i < n; ++i) diag2 += r(i, i) * r(i, i);
    double r_box = 0.5 * std::sqrt(diag2);
    if (n > 3) {
        out.value = r_box;
        out.exact = false;
        return out;
    }
    // The deep holes are vertices of the central Voronoi cell. Constraints can
    // only come from lattice vectors of norm <= 2 * covering radius <= 2 r_box.
    const double vmax = 2.0 * r_box * (1.0 + 1e-9);
    Eigen::MatrixXd inv = basis.inverse();
    std::vector<long long> lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
        double row_norm = inv.row(j).norm();
        long long m = static_cast<long long>(std::floor(vmax * row_norm)) + 1;
        lo[j] = -m;
        hi[j] = m;
    }
    std::vector<Eigen::VectorXd> cands;
    for_each_lattice_point(lo, hi, [&](const std::vector<long long>& z) {
        Eigen::VectorXd zv(n);
        bool zero = true;
        for (int j = 0; j < n; ++j) {
            zv[j] = static_cast<double>(z[j]);
            zero = zero && z[j] == 0;
        }
        if (zero) return;
        Eigen::VectorXd v = basis * zv;
        if (v.norm() <= vmax) cands.push_back(std::move(v));
    });

    double scale2 = 0.0;
    for (const auto& v : cands) scale2 = std::max(scale2, v.squaredNorm());
    const double slack = 1e-9 * scale2;
    auto feasible = [&](const Eigen::VectorXd& x) {
        for (const auto& w : cands)
            if (2.0 * x.dot(w) > w.squaredNorm() + slack) return false;
        return true;
    };

    double best2 = 0.0;
    const int m = static_cast<int>(cands.size());
    if (n == 2) {
        Eigen::Matrix2d a;
        Eigen::Vector2d rhs;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                a.row(0) = 2.0 * cands[i].transpose();
                a.row(1) = 2.0 * cands[j].transpose();
                double det = a.determinant();
                if (std::abs(det) < 1e-12 * scale2) continue;
                rhs << cands[i].squaredNorm(), cands[j].squaredNorm();
                Eigen::Vector2d x = a.inverse() * rhs;
                if (x.squaredNorm() > best2 && feasible(x)) best2 = x.squaredNorm();
            }
    } else {
        Eigen::Matrix3d a;
        Eigen::Vector3d rhs;
        double det_floor = 1e-12 * scale2 * std::sqrt(scale2);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int l = j + 1; l < m; ++l) {
                    a.row(0) = 2.0 * cands[i].transpose();
                    a.row(1) = 2.0 * cands[j].transpose();
                    a.row(2) = 2.0 * cands[l].transpose();
                    double det = a.determinant();
                    if (std::abs(det) < det_floor) continue;
                    rhs << cands[i].squaredNorm(), cands[j].squaredNorm(),
                        cands[l].squaredNorm();
                    Eigen::Vector3d x = a.inverse() * rhs;
                    if (x.squaredNorm() > best2 && feasible(x)) best2 = x.squaredNorm();
                }
    }
    out.value = std::sqrt(best2);
    out.exact = true;
    return out;
}

namespace {

// Shared tube-walking state for one grid: the query line pulled back to
// lattice coordinates, plus per-axis margins covering the epsilon ball.
struct PulledBackLine {
    Eigen::VectorXd v;       // direction in z-space
    Eigen::VectorXd c0;      // anchor in z-space
    Eigen::VectorXd margin;  // per-axis half-width of the pulled-back ball
};

PulledBackLine pull_back(const GridSpec& grid, const SegmentQuery& q) {
    PulledBackLine p;
    Eigen::MatrixXd inv = grid.basis.inverse();
    p.v = inv * q.direction;
    p.c0 = inv * (q.anchor - grid.shift);
    p.margin.resize(grid.dim());
    for (int j = 0; j < grid.dim(); ++j)
        p.margin[j] = q.epsilon * inv.row(j).norm() + 1e-12;
    return p;
}

// Integer bounds of the pulled-back tube over the parameter window [t0, t1].
void window_box(const PulledBackLine& p, double t0, double t1,
                std::vector<long long>& lo, std::vector<long long>& hi) {
    const int n = static_cast<int>(p.v.size());
    lo.resize(n);
    hi.resize(n);
    for (int j = 0; j < n; ++j) {
        double a = p.c0[j] + t0 * p.v[j];
        double b = p.c0[j] + t1 * p.v[j];
        lo[j] = static_cast<long long>(std::ceil(std::min(a, b) - p.margin[j]));
        hi[j] = static_cast<long long>(std::floor(std::max(a, b) + p.margin[j]));
    }
}

std::uint64_t box_cells(const std::vector<long long>& lo, const std::vector<long long>& hi) {
    std::uint64_t cells = 1;
    for (size_t j = 0; j < lo.size(); ++j) {
        if (lo[j] > hi[j]) return 0;
        std::uint64_t w = static_cast<std::uint64_t>(hi[j] - lo[j] + 1);
        if (cells > std::numeric_limits<std::uint64_t>::max() / w)
            return std::numeric_limits<std::uint64_t>::max();
        cells *= w;
    }
    return cells;
}

}  // namespace

std::vector<std::vector<long long>> enumerate_near_segment(
    const GridSpec& grid, const SegmentQuery& q, double l, std::uint64_t cell_budget) {
    if (!(l > 0.0) || l > q.budget)
        throw ValidationError("half-length must lie in (0, budget]");
    PulledBackLine p = pull_back(grid, q);
    double vmax = p.v.cwiseAbs().maxCoeff();
    double step = (vmax > 1e-12) ? std::min(2.0 * l, 1.0 / vmax) : 2.0 * l;
    std::uint64_t used = 0;
    std::vector<std::vector<long long>> found;
    std::vector<long long> lo, hi;
    for (double t0 = -l; t0 < l; t0 += step) {
        double t1 = std::min(t0 + step, l);
        window_box(p, t0, t1, lo, hi);
        std::uint64_t cells = box_cells(lo, hi);
        used += cells;
        if (used > cell_budget)
            throw EnumerationBudgetExceeded("lattice walk exceeded cell budget", cell_budget);
        for_each_lattice_point(lo, hi, [&](const std::vector<long long>& z) {
            Eigen::VectorXd zv(grid.dim());
            for (int j = 0; j < grid.dim(); ++j) zv[j] = static_cast<double>(z[j]);
            Eigen::VectorXd f = grid.point(zv);
            if (point_segment_distance(f, q.anchor, q.direction, l) < q.epsilon)
                found.push_back(z);
        });
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    return found;
}

VisibilityOutcome directional_visibility(const Forest& forest, const SegmentQuery& q,
                                         std::uint64_t cell_budget) {
    const int n = forest.dim();
    if (q.anchor.size() != n) throw ValidationError("query dimension mismatch");
    std::vector<PulledBackLine> lines;
    lines.reserve(forest.grids.size());
    double vmax = 0.0;
    for (const auto& g : forest.grids) {
        lines.push_back(pull_back(g, q));
        vmax = std::max(vmax, lines.back().v.cwiseAbs().maxCoeff());
    }
    const double step = (vmax > 1e-12) ? 1.0 / vmax : q.budget + q.epsilon;

    double best = std::numeric_limits<double>::infinity();
    HitWitness best_witness;
    std::vector<long long> lo, hi;
    std::uint64_t used = 0;

    auto scan_window = [&](double t0, double t1) {
        for (size_t i = 0; i < lines.size(); ++i) {
            window_box(lines[i], t0, t1, lo, hi);
            std::uint64_t cells = box_cells(lo, hi);
            used += cells;
            if (used > cell_budget)
                throw EnumerationBudgetExceeded("lattice walk exceeded cell budget",
                                                cell_budget);
            const GridSpec& g = forest.grids[i];
            for_each_lattice_point(lo, hi, [&](const std::vector<long long>& z) {
                Eigen::VectorXd zv(n);
                for (int j = 0; j < n; ++j) zv[j] = static_cast<double>(z[j]);
                Eigen::VectorXd f = g.point(zv);
                Eigen::VectorXd rel = f - q.anchor;
                double t = rel.dot(q.direction);
                double perp2 = (rel - t * q.direction).squaredNorm();
                if (perp2 >= q.epsilon * q.epsilon) return;
                double reach = std::sqrt(q.epsilon * q.epsilon - perp2);
                double l_star = std::max(0.0, std::abs(t) - reach);
                if (l_star < best ||
                    (l_star == best &&
                     (static_cast<int>(i) < best_witness.grid_index ||
                      (static_cast<int>(i) == best_witness.grid_index &&
                       z < best_witness.coords)))) {
                    best = l_star;
                    best_witness.grid_index = static_cast<int>(i);
                    best_witness.coords = z;
                    best_witness.point = f;
                }
            });
        }
    };

    // March outward: every undiscovered point projects beyond the scanned
    // range, so its touch length exceeds (scanned range - epsilon).
    double covered = 0.0;
    while (true) {
        if (covered - q.epsilon > std::min(best, q.budget)) break;
        double t1 = covered + step;
        scan_window(covered, t1);
        scan_window(-t1, -covered);
        covered = t1;
    }

    VisibilityOutcome out;
    if (best <= q.budget) {
        out.hit = true;
        out.half_length = best;
        out.witness = best_witness;
    } else {
        // Blocked: the scan proves the segment stays clear out to the budget.
        out.half_length = q.budget;
    }
    return out;
}

Matrix build_unipotent(const Eigen::VectorXd& x) {
    int n = static_cast<int>(x.size()) + 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i + 1 < n; ++i) m(i, n - 1) = x[i];
    return Matrix(m);
}

Matrix build_unipotent(const std::vector<Rational>& x) {
    int n = static_cast<int>(x.size()) + 1;
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    RationalMatrix e = RationalMatrix::identity(n);
    for (int i = 0; i + 1 < n; ++i) {
        m(i, n - 1) = to_double(x[i]);
        e.at(i, n - 1) = x[i];
    }
    return Matrix(m, e);
}

Matrix axis_swap_rotation(int n, int axis) {
    if (axis < 0 || axis >= n) throw ValidationError("axis out of range");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    RationalMatrix e = RationalMatrix::identity(n);
    if (axis != n - 1) {
        m(axis, axis) = 0;
        m(n - 1, n - 1) = 0;
        m(axis, n - 1) = 1;
        m(n - 1, axis) = -1;
        e.at(axis, axis) = 0;
        e.at(n - 1, n - 1) = 0;
        e.at(axis, n - 1) = 1;
        e.at(n - 1, axis) = -1;
    }
    return Matrix(m, e);
}

Forest build_rotated_union(const Forest& forest) {
    const int n = forest.dim();
    std::vector<GridSpec> grids;
    grids.reserve(forest.grids.size() * n);
    for (int axis = 0; axis < n; ++axis) {
        Matrix y = axis_swap_rotation(n, axis);
        for (const auto& g : forest.grids)
            grids.emplace_back(matrix_product(y, g.basis),
                               (y.numeric() * g.shift).eval());
    }
    return Forest(std::move(grids));
}

}  // namespace forestlab

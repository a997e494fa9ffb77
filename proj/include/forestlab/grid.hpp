#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "forestlab/linalg.hpp"

namespace forestlab {

// Translated lattice G = M * Z^n + g.
struct GridSpec {
    Matrix basis;
    Eigen::VectorXd shift;

    GridSpec(Matrix m, Eigen::VectorXd g);
    int dim() const { return basis.n(); }
    Eigen::VectorXd point(const Eigen::VectorXd& z) const {
        return basis.numeric() * z + shift;
    }
};

// Finite ordered union of grids of equal dimension.
struct Forest {
    std::vector<GridSpec> grids;

    explicit Forest(std::vector<GridSpec> gs);
    int dim() const { return grids.front().dim(); }
    int k() const { return static_cast<int>(grids.size()); }
};

// Sight query: segment centred at `anchor` along unit `direction` with
// half-length to be determined, tested against epsilon-balls round grid
// points, giving up past half-length `budget`.
struct SegmentQuery {
    Eigen::VectorXd anchor;
    Eigen::VectorXd direction;
    double epsilon = 0.0;
    double budget = 0.0;

    SegmentQuery(Eigen::VectorXd a, Eigen::VectorXd b, double eps, double l_max);
};

struct HitWitness {
    int grid_index = -1;
    std::vector<long long> coords;
    Eigen::VectorXd point;
};

// Hit: smallest half-length l <= budget at which the segment touches some
// epsilon-ball. Blocked: no grid point comes epsilon-close within budget.
struct VisibilityOutcome {
    bool hit = false;
    double half_length = 0.0;
    std::optional<HitWitness> witness;
};

struct CoveringRadius {
    double value = 0.0;
    bool exact = false;  // n <= 3 gets the true radius, above that a bound
};

// Euclidean covering radius of M * Z^n; the translation plays no role.
CoveringRadius covering_radius(const GridSpec& grid);

inline constexpr std::uint64_t kDefaultCellBudget = 100000000ULL;

// All z with dist2(M z + g, segment of half-length l) < epsilon, sorted
// lexicographically, no duplicates. Throws EnumerationBudgetExceeded when the
// walk would visit more than cell_budget lattice cells.
std::vector<std::vector<long long>> enumerate_near_segment(
    const GridSpec& grid, const SegmentQuery& q, double l,
    std::uint64_t cell_budget = kDefaultCellBudget);

VisibilityOutcome directional_visibility(
    const Forest& forest, const SegmentQuery& q,
    std::uint64_t cell_budget = kDefaultCellBudget);

// Identity matrix with x written into the last column above the diagonal.
Matrix build_unipotent(const Eigen::VectorXd& x);
Matrix build_unipotent(const std::vector<Rational>& x);

// The coordinate-plane rotation taking the last basis vector onto axis
// `axis` (0-based); identity when axis == n-1.
Matrix axis_swap_rotation(int n, int axis);

// Union over i of Y_i applied to every grid, where Y_i is the rotation
// taking e_n onto e_i. Grid order: all of Y_1, then Y_2, ...
Forest build_rotated_union(const Forest& forest);

// Single reduction pass shared by covering radii and relation search:
// columns of `basis` are replaced by a Lenstra-Lenstra-Lovasz reduced basis
// of the same lattice.
Eigen::MatrixXd lll_reduce(Eigen::MatrixXd basis, double delta = 0.99);

}  // namespace forestlab

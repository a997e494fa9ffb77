#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "forestlab/linalg.hpp"

namespace forestlab {

namespace detail {
// Visits canonical integer vectors (first nonzero positive) shell by shell in
// the sup norm, lexicographically within a shell; stops early when the
// callback returns true.
bool scan_integer_shells(int n, long long height,
                         const std::function<bool(const std::vector<long long>&)>& fn);
}  // namespace detail

// Integer vector q with |q . v| below tolerance; residual is the exact dot
// product re-evaluated after the search.
struct RelationWitness {
    std::vector<long long> coeffs;
    double residual = 0.0;
};

inline constexpr long long kDefaultHeight = 50;
inline constexpr double kDefaultRelationTol = 1e-9;

// Search for q != 0, ||q||_inf <= height, |q . v| < tol * ||v||_2. Exhaustive
// over sup-norm shells for small dimension, reduction-guided above that.
// Absence of a witness is a bounded statement, not a proof.
std::optional<RelationWitness> integer_relation(const Eigen::VectorXd& v,
                                                long long height, double tol);

// Same search in exact arithmetic; a found relation has residual exactly 0.
std::optional<RelationWitness> integer_relation_exact(const std::vector<Rational>& v,
                                                      long long height);

struct ForestVerdict {
    enum class Status { NotDenseForest, NoObstructionUpTo };
    Status status = Status::NoObstructionUpTo;
    // Witness for the negative verdict: integer vectors p_i whose pullbacks
    // w_i = M_i^{-T} p_i all lie in the hyperplane orthogonal to b.
    std::vector<std::vector<long long>> witnesses;
    Eigen::VectorXd common_direction;
    double residual = 0.0;  // smallest singular value of the stacked unit w_i
    bool exact = false;     // residual certified zero in rational arithmetic
    long long height = 0;
    double tolerance = 0.0;
};

inline constexpr std::uint64_t kDefaultSearchBudget = 20000000ULL;

// Decides whether some sight direction b has every pullback M_i^{-1} b
// rationally dependent with witness heights <= H. Such a b defeats the union
// of the k grids for every choice of translations. Complete for n <= 2;
// for n >= 3 exhaustive within budget, else throws SearchBudgetExceeded.
ForestVerdict dense_forest_check(const std::vector<Matrix>& mats, long long height,
                                 double tol,
                                 std::uint64_t budget = kDefaultSearchBudget);

struct DirectionVerdict {
    bool dependent = false;
    std::optional<RelationWitness> witness;
};

// Per grid, relation search on the pullback M_i^{-1} b; a dependent pullback
// means sight along b can dodge that grid entirely.
std::vector<DirectionVerdict> direction_dependence(const std::vector<Matrix>& mats,
                                                   const Eigen::VectorXd& b,
                                                   long long height, double tol);

}  // namespace forestlab

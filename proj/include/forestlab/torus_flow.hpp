#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "forestlab/rationality.hpp"

namespace forestlab {

// Index attaining ||u||_inf, ties broken toward the largest index.
int pivot_index(const Eigen::VectorXd& u);

// Points m * (u_i / u_pivot)_{i != pivot} mod 1 for m in [-S, S], collapsed
// to the distinct values, sorted lexicographically.
std::vector<Eigen::VectorXd> discrete_flow(const Eigen::VectorXd& u, long long S);

// One wrapped piece of the trajectory {t u mod 1}, endpoints inside [0,1]^n.
struct TorusSegment {
    Eigen::VectorXd p0;
    Eigen::VectorXd p1;
};

struct FlowDecomposition {
    std::vector<TorusSegment> segments;
    bool truncated = false;  // segment cap reached, outermost pieces dropped
};

FlowDecomposition wrap_flow(const Eigen::VectorXd& u, double horizon);

struct DensityReport {
    bool dense = false;
    // A certified verdict carries an exactly re-verified distance; an
    // uncertified one stopped at the subdivision floor.
    bool certified = false;
    double resolution = 0.0;
    Eigen::VectorXd farthest_point;
    double farthest_distance = 0.0;
    std::uint64_t boxes_processed = 0;
    bool truncated = false;
};

inline constexpr std::uint64_t kDefaultBoxBudget = 30000000ULL;

// Sup-norm delta-density of the wrapped trajectory over [-T, T], decided by
// box subdivision: a box whose centre sits within delta - radius of a
// segment is discharged; a centre at distance >= delta + radius from all
// segments certifies a hole.
DensityReport flow_density_continuous(const Eigen::VectorXd& u, double horizon,
                                      double delta,
                                      std::uint64_t box_budget = kDefaultBoxBudget);

// Same decision for the discrete section points on the pivot hyperplane.
DensityReport flow_density_discrete(const Eigen::VectorXd& u, long long S,
                                    double delta,
                                    std::uint64_t box_budget = kDefaultBoxBudget);

struct FillingTime {
    bool infinite = false;
    double value = 0.0;
    std::optional<RelationWitness> obstruction;  // set for the infinite case
};

struct FillingOptions {
    double rel_tol = 1e-2;
    long long relation_height = 1000;
    double relation_tol = 1e-9;
    double horizon_cap = 0.0;  // 0: pick from delta and dimension
    std::uint64_t box_budget = kDefaultBoxBudget;
};

// Smallest horizon at which the flow is delta-dense, by doubling plus
// bisection; infinite when an integer relation confines the flow to a proper
// subtorus that is still not delta-dense at the probe horizon.
FillingTime filling_time(const Eigen::VectorXd& u, double delta,
                         const FillingOptions& opts = {});

struct DirichletResult {
    long long m = 0;
    double value = 0.0;        // max_i || m * ratio_i ||
    double bound = 0.0;        // X^{-1/d}
    bool within_bound = false;
};

// Minimizer of max_i ||m ratio_i|| over integers m in [1, X]; the closed
// right end is what the pigeonhole argument needs for the stated bound.
DirichletResult dirichlet_witness(const Eigen::VectorXd& ratios, long long X);

struct TransferenceResult {
    long long x = 0;
    double error = 0.0;   // max_i || ratio_i * x - target_i ||
    long long h = 0;
    double c_prime = 0.0;
    double x_prime = 0.0;
};

// Inhomogeneous approximation from a homogeneous non-approximability
// hypothesis: with C = min over 0 < |m| < X of max_i ||m ratio_i|| verified
// >= C, finds |x| <= X' = (h+1)X/2 with error <= C' = (h+1)C/2 where
// h = floor(1 / (X C^N)). Throws HypothesisViolated if the check fails; a
// fruitless search is a logic error, existence being guaranteed.
TransferenceResult transference_apply(const Eigen::VectorXd& ratios, double C,
                                      long long X, const Eigen::VectorXd& targets);

struct HypothesisCheck {
    bool holds = false;
    long long violator = 0;  // smallest positive violating m when !holds
    double value = 0.0;
    double threshold = 0.0;
    double range = 0.0;  // open symmetric range the quantifier ran over
};

// The arithmetic hypothesis of the discrete-to-continuous density step:
// max_i || m u_i / u_pivot || >= S^{-1/d} for all integers
// 0 < |m| < S^{1-1/d} / delta.
HypothesisCheck flow_density_hypothesis(const Eigen::VectorXd& u, long long S, double delta);

struct DiophantineWitness {
    std::vector<long long> q;
    double sup_norm = 0.0;
    double psi = 0.0;        // projective distance between [u] and [q]
    double norm_bound = 0.0; // S^{1-1/d} / delta
    double psi_bound = 0.0;  // (d+1) / (||q||_inf S^{1/d})
};

// Searches the dual witness promised whenever the continuous flow at horizon
// sqrt(d+1) S fails to be delta-dense: smallest sup-norm q, lexicographic
// tie-break, sign-canonical. Requires S > (d+1)^{d/2}.
std::optional<DiophantineWitness> diophantine_witness_search(const Eigen::VectorXd& u,
                                                      long long S, double delta);

}  // namespace forestlab

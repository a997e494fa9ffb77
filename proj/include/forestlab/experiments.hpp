#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forestlab/profile.hpp"
#include "forestlab/rationality.hpp"

namespace forestlab {

// Exponent penalty in the metrical visibility bound; defined for k > d^2.
double sigma_exponent(int d, int k);

struct BorelCantelliBudget {
    double exponent = 0.0;   // d(1 + lambda + d) - k lambda / d
    bool converges = false;  // exponent < 0
    double threshold = 0.0;  // lambda making the exponent vanish; inf if none
};

BorelCantelliBudget borel_cantelli_budget(int d, int k, double lambda);

struct ExperimentManifest {
    int d = 1;
    int k = 3;
    std::string mode = "rotations";  // or "unipotent"
    // Base matrices; empty means identity matrices.
    std::vector<Matrix> base;
    std::vector<int> levels = {3, 4, 5, 6, 7};
    int samples = 20;
    int anchors = 8;
    std::uint64_t seed = 1;
    long long relation_height = kDefaultHeight;
    double relation_tol = kDefaultRelationTol;
    double lambda_target = -1.0;  // < 0: sigma_exponent(d,k) + 0.5
    double direction_range_scale = 1.0;              // lattice-direction range constant
    double cap_radius_scale = 1.0;              // cap-radius constant
    std::uint64_t direction_budget = 2048;
    double budget_factor = 4.0;   // give-up half-length = factor * f(eps)
    double unipotent_box = 10.0;
    std::uint64_t cell_budget = kDefaultCellBudget;
    std::string out_dir;

    void validate() const;
    double lambda() const;
    // Visibility target f(eps) = eps^{-d - lambda}.
    double target(double eps) const;
};

struct LevelRecord {
    int level = 0;
    double epsilon = 0.0;
    double v_hat = 0.0;
    bool blocked = false;
    double formula_radius = 0.0;    // cap radius the scaling argument asks for
    double effective_radius = 0.0;  // radius actually used after the budget
    std::uint64_t directions = 0;
    Eigen::VectorXd worst_anchor;
    Eigen::VectorXd worst_direction;
    HitWitness worst_witness;
};

struct SampleRecord {
    int sample_id = 0;
    std::vector<LevelRecord> rows;
    std::string checker_status;
    double slope = 0.0;
    double intercept = 0.0;
    bool slope_valid = false;  // >= 4 unblocked rungs
    std::string error;         // budget failures recorded, not fatal
};

struct ExperimentResult {
    ExperimentManifest manifest;
    double sigma = 0.0;
    double lambda = 0.0;
    std::vector<SampleRecord> samples;
    // Aggregates over samples with a valid slope.
    int valid_slopes = 0;
    double slope_min = 0.0, slope_median = 0.0, slope_max = 0.0;
    double pass_rate_upper = 0.0;  // share with slope <= d + sigma + 0.5
    double pass_rate_lower = 0.0;  // share with slope >= d - 0.2
};

// Random-rotation (or random-shear) forests swept over the epsilon ladder;
// persists raw rows and summary to manifest.out_dir when set.
ExperimentResult run_experiment(const ExperimentManifest& manifest);

struct BadEventResult {
    bool member = false;
    Eigen::VectorXd direction;                  // the witnessing b
    std::vector<std::vector<long long>> q;      // one lattice vector per grid
    std::vector<double> psi;
    std::vector<double> eta;
    std::uint64_t directions_checked = 0;
};

// Membership of a rotation tuple in the level-l bad event: some cover
// direction b has, for every grid, a lattice direction [R_i M_i q_i] within
// eta_l(q_i) of [b], where the norm range is 0 < ||q_i||_inf <
// 2^l * direction_range_scale * f(2^-l)^{1-1/d} and the cap radius is
// eta_l(q) = cap_radius_scale * ||q||_inf^{-1} f(2^-l)^{-1/d}.
BadEventResult bad_event_membership(const std::vector<Eigen::MatrixXd>& rotations, int l,
                        double lambda_target, const ExperimentManifest& manifest);

// Least-squares slope of log V against log(1/eps); used for the scaling fits.
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};
SlopeFit fit_loglog_slope(const std::vector<double>& eps,
                          const std::vector<double>& v);

}  // namespace forestlab

#pragma once

#include <cstdint>
#include <vector>

#include "forestlab/grid.hpp"
#include "forestlab/sphere_cover.hpp"

namespace forestlab {

// Sampling plan for the visibility profile: one epsilon = 2^-level per rung,
// directions from the matching cap cover, anchors from a low-discrepancy set
// in the ball whose radius is the forest's worst covering radius.
struct ProfilePlan {
    std::vector<int> levels;
    std::vector<CapCover> covers;     // one per level
    std::vector<double> budgets;      // half-length give-up point per level
    int anchor_count = 16;
    double anchor_radius = -1.0;      // < 0: use max covering radius
    std::uint64_t cell_budget = kDefaultCellBudget;
};

struct ProfileLevel {
    int level = 0;
    double epsilon = 0.0;
    bool blocked = false;          // some sample saw nothing within budget
    int blocked_count = 0;
    double v_hat = 0.0;            // 2 * worst hit half-length over samples
    Eigen::VectorXd worst_anchor;
    Eigen::VectorXd worst_direction;
    HitWitness worst_witness;
    int samples = 0;
};

// Worst-case sight length per epsilon over the sampled anchors and cover
// directions. Iteration order (directions outer, anchors inner) is fixed, and
// the max-reduction breaks ties toward the earlier sample, so the output is
// reproducible.
std::vector<ProfileLevel> visibility_profile(const Forest& forest,
                                             const ProfilePlan& plan);

// Default budget from the level: 10^6 * epsilon^{-n}.
double default_length_budget(double epsilon, int dim);

// Low-discrepancy anchor set: Halton points in the cube circumscribing the
// ball, filtered to the ball.
std::vector<Eigen::VectorXd> anchor_points(int dim, int count, double radius);

}  // namespace forestlab

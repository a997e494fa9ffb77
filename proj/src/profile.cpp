#include "forestlab/profile.hpp"

#include <cmath>

#include "forestlab/errors.hpp"

namespace forestlab {

namespace {

double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13};

}  // namespace

std::vector<Eigen::VectorXd> anchor_points(int dim, int count, double radius) {
    if (dim < 1 || dim > 6) throw UnsupportedDimension("anchor dimension must be 1..6");
    if (count < 1) throw ValidationError("need at least one anchor");
    if (!(radius >= 0.0)) throw ValidationError("radius must be >= 0");
    if (radius == 0.0) return {Eigen::VectorXd::Zero(dim)};
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<size_t>(count));
    for (std::uint64_t idx = 1; static_cast<int>(out.size()) < count; ++idx) {
        Eigen::VectorXd x(dim);
        for (int j = 0; j < dim; ++j)
            x[j] = radius * (2.0 * halton(idx, kPrimes[j]) - 1.0);
        if (x.norm() <= radius) out.push_back(std::move(x));
    }
    return out;
}

double default_length_budget(double epsilon, int dim) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    return 1e6 * std::pow(epsilon, -static_cast<double>(dim));
}

std::vector<ProfileLevel> visibility_profile(const Forest& forest,
                                             const ProfilePlan& plan) {
    const int n = forest.dim();
    if (plan.covers.size() != plan.levels.size() ||
        plan.budgets.size() != plan.levels.size())
        throw ValidationError("plan rungs must align: levels, covers, budgets");
    for (const auto& c : plan.covers)
        if (c.d != n - 1)
            throw ValidationError("cover dimension must match the forest");

    double radius = plan.anchor_radius;
    if (radius < 0.0) {
        radius = 0.0;
        for (const auto& g : forest.grids)
            radius = std::max(radius, covering_radius(g).value);
    }
    auto anchors = anchor_points(n, plan.anchor_count, radius);

    std::vector<ProfileLevel> out;
    out.reserve(plan.levels.size());
    for (size_t li = 0; li < plan.levels.size(); ++li) {
        ProfileLevel rung;
        rung.level = plan.levels[li];
        rung.epsilon = std::pow(2.0, -static_cast<double>(plan.levels[li]));
        double budget = plan.budgets[li];
        if (!(budget > 0.0)) throw ValidationError("budget must be positive");
        double worst_hit = -1.0;
        for (const auto& dir : plan.covers[li].centres) {
            for (const auto& a : anchors) {
                SegmentQuery q(a, dir, rung.epsilon, budget);
                auto res = directional_visibility(forest, q, plan.cell_budget);
                ++rung.samples;
                if (!res.hit) {
                    if (!rung.blocked) {
                        // first blocked sample is the recorded worst
                        rung.blocked = true;
                        rung.worst_anchor = a;
                        rung.worst_direction = dir;
                    }
                    ++rung.blocked_count;
                    continue;
                }
                if (res.half_length > worst_hit) {
                    worst_hit = res.half_length;
                    if (!rung.blocked) {
                        rung.worst_anchor = a;
                        rung.worst_direction = dir;
                        rung.worst_witness = *res.witness;
                    }
                }
            }
        }
        rung.v_hat = worst_hit > 0.0 ? 2.0 * worst_hit : 0.0;
        out.push_back(std::move(rung));
    }
    return out;
}

}  // namespace forestlab

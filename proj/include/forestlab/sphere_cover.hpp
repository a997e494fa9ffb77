#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "forestlab/linalg.hpp"

namespace forestlab {

// Covering of projective d-space by caps of projective radius eta: every
// line direction is within sin-angle eta of some centre.
struct CapCover {
    int d = 1;
    double eta = 0.0;
    std::vector<Eigen::VectorXd> centres;  // canonical unit representatives
    double c_cover = 0.0;                  // count * eta^d
    double verified_max_gap = -1.0;        // filled in by verify_cover
};

// Deterministic latitude-longitude construction; spacing keeps the geodesic
// cell radius at 0.9 * arcsin(eta), so the covering holds by construction.
// Supports d in {1,2,3}.
CapCover build_cap_cover(int d, double eta);

// Centre count build_cap_cover(d, eta) would produce, without allocating.
std::uint64_t cap_cover_count(int d, double eta);

// Min over centres of the projective distance from `dir`.
double cover_gap_at(const CapCover& cover, const Eigen::VectorXd& dir);

// Max over sampled uniform directions of the distance to the nearest centre;
// records the value on the cover and returns it.
double verify_cover(CapCover& cover, std::uint64_t trials, std::uint64_t seed);

// Event spec for the rotation-measure estimate: a tuple of Haar rotations
// (R_1..R_k) is a member when every rotated lattice direction [R_i M_i q_i]
// falls within eta_i of the line [b].
struct AlignmentEventSpec {
    Eigen::VectorXd b;
    std::vector<std::vector<long long>> q;
    std::vector<double> eta;
    std::vector<Matrix> mats;

    int k() const { return static_cast<int>(q.size()); }
    void validate() const;
};

struct MCEstimate {
    double p_hat = 0.0;
    double lo = 0.0;  // 95% Wilson interval
    double hi = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
};

MCEstimate alignment_measure_mc(const AlignmentEventSpec& spec, std::uint64_t trials,
                            std::uint64_t seed);

// 95% Wilson score interval for a binomial proportion.
MCEstimate wilson_interval(std::uint64_t hits, std::uint64_t trials);

}  // namespace forestlab

#include "forestlab/sphere_cover.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "forestlab/errors.hpp"
#include "forestlab/rng.hpp"

namespace forestlab {

namespace {

constexpr double kPi = std::numbers::pi;

long long circle_count(double budget) {
    auto m = static_cast<long long>(std::ceil(kPi / budget));
    return m < 1 ? 1 : m;
}

// Points on the full circle with geodesic half-spacing at most `budget`.
std::vector<Eigen::Vector2d> circle_points(double budget) {
    const long long m = circle_count(budget);
    std::vector<Eigen::Vector2d> out;
    out.reserve(static_cast<size_t>(m));
    for (long long j = 0; j < m; ++j) {
        double a = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
        out.emplace_back(std::cos(a), std::sin(a));
    }
    return out;
}

long long sphere2_rows(double budget) {
    auto rows = static_cast<long long>(std::ceil(kPi / (2.0 * budget)));
    return rows < 1 ? 1 : rows;
}

std::uint64_t sphere2_count(double budget) {
    const long long rows = sphere2_rows(budget);
    std::uint64_t total = 0;
    for (long long i = 0; i < rows; ++i) {
        double theta = (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(rows);
        total += static_cast<std::uint64_t>(
            circle_count(budget / std::max(std::sin(theta), 1e-12)));
    }
    return total;
}

// Points on the full 2-sphere with per-axis geodesic half-spacing `budget`:
// colatitude rows, each row a circle scaled so arc spacing stays in budget.
std::vector<Eigen::Vector3d> sphere2_points(double budget) {
    const long long rows = sphere2_rows(budget);
    std::vector<Eigen::Vector3d> out;
    for (long long i = 0; i < rows; ++i) {
        double theta = (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(rows);
        double s = std::sin(theta);
        double ring_budget = budget / std::max(s, 1e-12);
        for (const auto& c : circle_points(ring_budget))
            out.emplace_back(s * c[0], s * c[1], std::cos(theta));
    }
    return out;
}

double per_axis_budget(int d, double eta) {
    if (d < 1 || d > 3) throw UnsupportedDimension("supported sphere dimensions: 1, 2, 3");
    if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("eta must lie in (0, 1)");
    // Per-axis geodesic budget: d axes together stay below 0.9 * arcsin(eta),
    // and sin is concave, so the sin-angle gap stays below 0.9 * eta.
    return 0.9 * std::asin(eta) / static_cast<double>(d);
}

long long hemisphere_rows(double beta) {
    auto rows = static_cast<long long>(std::ceil((kPi / 2.0) / (2.0 * beta)));
    return rows < 1 ? 1 : rows;
}

}  // namespace

std::uint64_t cap_cover_count(int d, double eta) {
    const double beta = per_axis_budget(d, eta);
    if (d == 1) return static_cast<std::uint64_t>(circle_count(2.0 * beta));
    const long long rows = hemisphere_rows(beta);
    std::uint64_t total = 0;
    for (long long i = 0; i < rows; ++i) {
        double theta =
            (static_cast<double>(i) + 0.5) * (kPi / 2.0) / static_cast<double>(rows);
        double ring_budget = beta / std::max(std::sin(theta), 1e-12);
        total += d == 2 ? static_cast<std::uint64_t>(circle_count(ring_budget))
                        : sphere2_count(ring_budget);
    }
    return total;
}

CapCover build_cap_cover(int d, double eta) {
    const double beta = per_axis_budget(d, eta);
    CapCover cover;
    cover.d = d;
    cover.eta = eta;
    if (d == 1) {
        // Half circle with antipodal identification: arc length pi.
        const long long m = circle_count(2.0 * beta);
        for (long long j = 0; j < m; ++j) {
            double a = kPi * static_cast<double>(j) / static_cast<double>(m);
            Eigen::Vector2d c(std::cos(a), std::sin(a));
            cover.centres.push_back(ProjectivePoint(c).rep());
        }
    } else {
        // Open hemisphere rows: the half-offset keeps rows off the equator,
        // so antipodal duplicates cannot arise.
        const long long rows = hemisphere_rows(beta);
        for (long long i = 0; i < rows; ++i) {
            double theta =
                (static_cast<double>(i) + 0.5) * (kPi / 2.0) / static_cast<double>(rows);
            double s = std::sin(theta);
            double ring_budget = beta / std::max(s, 1e-12);
            if (d == 2) {
                for (const auto& c : circle_points(ring_budget)) {
                    Eigen::Vector3d p(s * c[0], s * c[1], std::cos(theta));
                    cover.centres.push_back(ProjectivePoint(p).rep());
                }
            } else {
                for (const auto& y : sphere2_points(ring_budget)) {
                    Eigen::Vector4d p(s * y[0], s * y[1], s * y[2], std::cos(theta));
                    cover.centres.push_back(ProjectivePoint(p).rep());
                }
            }
        }
    }
    cover.c_cover = static_cast<double>(cover.centres.size()) *
                    std::pow(eta, static_cast<double>(d));
    return cover;
}

double cover_gap_at(const CapCover& cover, const Eigen::VectorXd& dir) {
    if (dir.size() != cover.d + 1)
        throw ValidationError("direction dimension does not match the cover");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cover.centres)
        best = std::min(best, projective_distance(dir, c));
    return best;
}

double verify_cover(CapCover& cover, std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    Rng rng(seed);
    double worst = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        Eigen::VectorXd dir = rng.unit_vector(cover.d + 1);
        worst = std::max(worst, cover_gap_at(cover, dir));
    }
    cover.verified_max_gap = worst;
    return worst;
}

void AlignmentEventSpec::validate() const {
    if (mats.empty()) throw ValidationError("need at least one grid matrix");
    if (q.size() != mats.size() || eta.size() != mats.size())
        throw ValidationError("q, eta, and matrices must align");
    const int n = mats.front().n();
    if (b.size() != n) throw ValidationError("b dimension mismatch");
    if (b.norm() == 0.0) throw ValidationError("b must be nonzero");
    for (const auto& m : mats)
        if (m.n() != n) throw ValidationError("matrices must share a dimension");
    for (const auto& qi : q) {
        if (static_cast<int>(qi.size()) != n) throw ValidationError("q dimension mismatch");
        bool nonzero = false;
        for (long long c : qi) nonzero = nonzero || c != 0;
        if (!nonzero) throw ValidationError("q vectors must be nonzero");
    }
    for (double e : eta)
        if (!(e > 0.0 && e <= 1.0)) throw ValidationError("eta must lie in (0, 1]");
}

MCEstimate alignment_measure_mc(const AlignmentEventSpec& spec, std::uint64_t trials,
                            std::uint64_t seed) {
    spec.validate();
    if (trials < 1) throw ValidationError("trials must be >= 1");
    const int n = static_cast<int>(spec.b.size());
    const int k = spec.k();
    Eigen::VectorXd bhat = spec.b.normalized();
    std::vector<Eigen::VectorXd> w(k);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd qv(n);
        for (int j = 0; j < n; ++j) qv[j] = static_cast<double>(spec.q[i][j]);
        w[i] = (spec.mats[i].numeric() * qv).normalized();
    }
    Rng rng(seed);
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        bool in = true;
        for (int i = 0; i < k; ++i) {
            Eigen::MatrixXd rot = haar_rotation(n, rng);
            if (in && projective_distance(rot * w[i], bhat) > spec.eta[i]) in = false;
        }
        if (in) ++hits;
    }
    MCEstimate est = wilson_interval(hits, trials);
    return est;
}

MCEstimate wilson_interval(std::uint64_t hits, std::uint64_t trials) {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (hits > trials) throw ValidationError("hits cannot exceed trials");
    const double z = 1.959963984540054;
    const double t = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / t;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / t;
    const double centre = (p + z2 / (2.0 * t)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
    MCEstimate est;
    est.p_hat = p;
    est.lo = std::max(0.0, centre - half);
    est.hi = std::min(1.0, centre + half);
    est.hits = hits;
    est.trials = trials;
    return est;
}

}  // namespace forestlab

#include "forestlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "forestlab/errors.hpp"
#include "forestlab/io.hpp"
#include "forestlab/rng.hpp"

namespace forestlab {

double sigma_exponent(int d, int k) {
    if (d < 1 || k < 1) throw ValidationError("d and k must be >= 1");
    if (k <= d * d) throw InvalidRegime("exponent defined only for k > d^2");
    const double dd = d;
    return dd * dd * (dd + 1.0) / (static_cast<double>(k) - dd * dd);
}

BorelCantelliBudget borel_cantelli_budget(int d, int k, double lambda) {
    if (d < 1 || k < 1) throw ValidationError("d and k must be >= 1");
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    BorelCantelliBudget out;
    const double dd = d;
    out.exponent = dd * (1.0 + lambda + dd) - static_cast<double>(k) * lambda / dd;
    out.converges = out.exponent < 0.0;
    out.threshold = k > d * d ? dd * dd * (dd + 1.0) / (static_cast<double>(k) - dd * dd)
                              : std::numeric_limits<double>::infinity();
    return out;
}

void ExperimentManifest::validate() const {
    if (d < 1) throw ValidationError("d must be >= 1");
    if (k < 1) throw ValidationError("k must be >= 1");
    if (k <= d * d) throw ValidationError("k must exceed d^2 for the exponent fit");
    if (mode != "rotations" && mode != "unipotent")
        throw ValidationError("mode must be rotations or unipotent");
    if (!base.empty()) {
        if (static_cast<int>(base.size()) != k)
            throw ValidationError("base matrices must number k");
        for (const auto& m : base)
            if (m.n() != d + 1) throw ValidationError("base matrices must be (d+1)x(d+1)");
    }
    if (levels.empty()) throw ValidationError("need at least one level");
    for (size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 1) throw ValidationError("levels must be >= 1");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw ValidationError("levels must increase strictly");
    }
    if (samples < 1) throw ValidationError("samples must be >= 1");
    if (anchors < 1) throw ValidationError("anchors must be >= 1");
    if (relation_height < 1) throw ValidationError("relation height must be >= 1");
    if (!(relation_tol > 0.0)) throw ValidationError("relation tolerance must be positive");
    if (lambda_target >= 0.0 && !(lambda_target > 0.0))
        throw ValidationError("explicit lambda target must be positive");
    if (!(direction_range_scale > 0.0) || !(cap_radius_scale > 0.0)) throw ValidationError("U1 and U2 must be positive");
    if (direction_budget < 8) throw ValidationError("direction budget must be >= 8");
    if (!(budget_factor > 0.0)) throw ValidationError("budget factor must be positive");
    if (!(unipotent_box > 0.0)) throw ValidationError("sampling box must be positive");
}

double ExperimentManifest::lambda() const {
    return lambda_target < 0.0 ? sigma_exponent(d, k) + 0.5 : lambda_target;
}

double ExperimentManifest::target(double eps) const {
    return std::pow(eps, -static_cast<double>(d) - lambda());
}

SlopeFit fit_loglog_slope(const std::vector<double>& eps, const std::vector<double>& v) {
    if (eps.size() != v.size()) throw ValidationError("mismatched fit inputs");
    if (eps.size() < 2) throw ValidationError("need at least two points");
    const int m = static_cast<int>(eps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < m; ++i) {
        if (!(eps[i] > 0.0) || !(v[i] > 0.0))
            throw ValidationError("fit inputs must be positive");
        double x = -std::log(eps[i]);
        double y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = m * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("degenerate abscissae");
    SlopeFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    fit.points = m;
    return fit;
}

namespace {

struct LevelSetup {
    int level = 0;
    double eps = 0.0;
    double formula_radius = 0.0;
    double effective_radius = 0.0;
    double budget = 0.0;
    CapCover cover;
};

std::vector<LevelSetup> plan_levels(const ExperimentManifest& m) {
    std::vector<LevelSetup> out;
    for (int l : m.levels) {
        LevelSetup s;
        s.level = l;
        s.eps = std::pow(2.0, -static_cast<double>(l));
        double f = m.target(s.eps);
        s.budget = m.budget_factor * f;
        s.formula_radius = s.eps / f;
        // Coarsen the cover geometrically until it fits the direction budget;
        // both radii are recorded so the coarsening is visible in the output.
        double r = s.formula_radius;
        while (r < 0.99 && cap_cover_count(m.d, r) > m.direction_budget)
            r = std::min(r * 1.3, 0.99);
        s.effective_radius = r;
        s.cover = build_cap_cover(m.d, r);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Matrix> base_or_identity(const ExperimentManifest& m) {
    if (!m.base.empty()) return m.base;
    return std::vector<Matrix>(static_cast<size_t>(m.k), Matrix::identity(m.d + 1));
}

Forest sample_forest(const ExperimentManifest& m, const std::vector<Matrix>& base,
                     Rng& rng) {
    const int n = m.d + 1;
    std::vector<GridSpec> grids;
    if (m.mode == "rotations") {
        for (int i = 0; i < m.k; ++i) {
            Matrix mat(haar_rotation(n, rng) * base[i].numeric());
            Eigen::VectorXd cell(n);
            for (int j = 0; j < n; ++j) cell[j] = rng.uniform01();
            grids.emplace_back(mat, Eigen::VectorXd(mat.numeric() * cell));
        }
        return Forest(std::move(grids));
    }
    for (int i = 0; i < m.k; ++i) {
        Eigen::VectorXd x(m.d);
        for (int j = 0; j < m.d; ++j) x[j] = rng.uniform(-m.unipotent_box, m.unipotent_box);
        Matrix mat = matrix_product(base[i], build_unipotent(x));
        Eigen::VectorXd cell(n);
        for (int j = 0; j < n; ++j) cell[j] = rng.uniform01();
        grids.emplace_back(mat, Eigen::VectorXd(mat.numeric() * cell));
    }
    return build_rotated_union(Forest(std::move(grids)));
}

long long vector_gcd(const std::vector<long long>& q) {
    long long g = 0;
    for (long long c : q) g = std::gcd(g, std::llabs(c));
    return g;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentManifest& manifest) {
    manifest.validate();
    ExperimentResult result;
    result.manifest = manifest;
    result.sigma = sigma_exponent(manifest.d, manifest.k);
    result.lambda = manifest.lambda();
    auto base = base_or_identity(manifest);
    auto setups = plan_levels(manifest);

    ProfilePlan plan;
    plan.anchor_count = manifest.anchors;
    plan.anchor_radius = -1.0;
    plan.cell_budget = manifest.cell_budget;
    for (const auto& s : setups) {
        plan.levels.push_back(s.level);
        plan.covers.push_back(s.cover);
        plan.budgets.push_back(s.budget);
    }

    Rng master(manifest.seed);
    for (int s = 0; s < manifest.samples; ++s) {
        Rng rng = master.child(static_cast<std::uint64_t>(s));
        SampleRecord rec;
        rec.sample_id = s;
        Forest forest = sample_forest(manifest, base, rng);
        std::vector<Matrix> mats;
        for (const auto& g : forest.grids) mats.push_back(g.basis);
        try {
            auto verdict = dense_forest_check(mats, manifest.relation_height,
                                              manifest.relation_tol);
            rec.checker_status =
                verdict.status == ForestVerdict::Status::NotDenseForest
                    ? "not-dense"
                    : "no-obstruction";
        } catch (const BudgetExceeded&) {
            rec.checker_status = "budget";
        }
        try {
            auto profile = visibility_profile(forest, plan);
            for (size_t j = 0; j < profile.size(); ++j) {
                const auto& p = profile[j];
                LevelRecord row;
                row.level = p.level;
                row.epsilon = p.epsilon;
                row.v_hat = p.v_hat;
                row.blocked = p.blocked;
                row.formula_radius = setups[j].formula_radius;
                row.effective_radius = setups[j].effective_radius;
                row.directions = setups[j].cover.centres.size();
                row.worst_anchor = p.worst_anchor;
                row.worst_direction = p.worst_direction;
                row.worst_witness = p.worst_witness;
                rec.rows.push_back(std::move(row));
            }
        } catch (const BudgetExceeded& e) {
            rec.error = e.what();
        }
        std::vector<double> es, vs;
        for (const auto& row : rec.rows)
            if (!row.blocked && row.v_hat > 0.0) {
                es.push_back(row.epsilon);
                vs.push_back(row.v_hat);
            }
        if (es.size() >= 4) {
            auto fit = fit_loglog_slope(es, vs);
            rec.slope = fit.slope;
            rec.intercept = fit.intercept;
            rec.slope_valid = true;
        }
        result.samples.push_back(std::move(rec));
    }

    std::vector<double> slopes;
    for (const auto& rec : result.samples)
        if (rec.slope_valid) slopes.push_back(rec.slope);
    result.valid_slopes = static_cast<int>(slopes.size());
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        result.slope_min = slopes.front();
        result.slope_max = slopes.back();
        size_t mid = slopes.size() / 2;
        result.slope_median = slopes.size() % 2 == 1
                                  ? slopes[mid]
                                  : 0.5 * (slopes[mid - 1] + slopes[mid]);
        double up = static_cast<double>(manifest.d) + result.sigma + 0.5;
        double low = static_cast<double>(manifest.d) - 0.2;
        double nu = 0, nl = 0;
        for (double sl : slopes) {
            if (sl <= up + 1e-12) ++nu;
            if (sl >= low - 1e-12) ++nl;
        }
        result.pass_rate_upper = nu / static_cast<double>(slopes.size());
        result.pass_rate_lower = nl / static_cast<double>(slopes.size());
    }
    if (!manifest.out_dir.empty()) persist_experiment(result);
    return result;
}

BadEventResult bad_event_membership(const std::vector<Eigen::MatrixXd>& rotations, int l,
                        double lambda_target, const ExperimentManifest& manifest) {
    manifest.validate();
    const int d = manifest.d;
    const int n = d + 1;
    const int k = manifest.k;
    if (static_cast<int>(rotations.size()) != k)
        throw ValidationError("need one rotation per grid");
    for (const auto& r : rotations) {
        if (r.rows() != n || r.cols() != n)
            throw ValidationError("rotations must be (d+1)x(d+1)");
        if ((r.transpose() * r - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-9 * n)
            throw ValidationError("rotations must be orthogonal");
    }
    if (l < 1) throw ValidationError("l must be >= 1");
    const double lambda = lambda_target < 0.0 ? manifest.lambda() : lambda_target;
    if (!(lambda > 0.0)) throw ValidationError("lambda target must be positive");

    const double eps = std::pow(2.0, -static_cast<double>(l));
    const double f = std::pow(eps, -static_cast<double>(d) - lambda);
    const double cover_radius = eps / f;
    const double f_root = std::pow(f, 1.0 / d);
    const double q_bound =
        std::pow(2.0, static_cast<double>(l)) * manifest.direction_range_scale * std::pow(f, 1.0 - 1.0 / d);
    auto base = base_or_identity(manifest);

    BadEventResult out;
    auto h_max = static_cast<long long>(std::ceil(q_bound)) - 1;
    if (h_max < 1) return out;
    auto eta_of = [&](double sup) { return manifest.cap_radius_scale / (sup * f_root); };

    if (d == 1) {
        constexpr double pi = std::numbers::pi;
        struct Cand {
            double theta;
            double eta;
            long long rank;
            std::vector<long long> q;
        };
        // Non-primitive vectors point the same way with a smaller cap, so
        // primitive ones dominate the union.
        std::vector<std::vector<Cand>> per_grid(k);
        for (int i = 0; i < k; ++i) {
            detail::scan_integer_shells(2, h_max, [&](const std::vector<long long>& q) {
                if (vector_gcd(q) != 1) return false;
                Eigen::Vector2d qv(static_cast<double>(q[0]), static_cast<double>(q[1]));
                Eigen::Vector2d v = rotations[i] * (base[i].numeric() * qv);
                double theta = std::atan2(v[1], v[0]);
                if (theta < 0.0) theta += pi;
                if (theta >= pi) theta -= pi;
                double sup = std::max(std::llabs(q[0]), std::llabs(q[1]));
                per_grid[i].push_back(
                    {theta, eta_of(sup), static_cast<long long>(per_grid[i].size()), q});
                return false;
            });
            std::sort(per_grid[i].begin(), per_grid[i].end(),
                      [](const Cand& a, const Cand& b) { return a.theta < b.theta; });
        }
        const double r_max = std::asin(std::min(eta_of(1.0), 1.0));
        // Replicates the level cover geometry so b runs over exactly the
        // centres build_cap_cover(1, cover_radius) would produce.
        auto m = static_cast<long long>(std::ceil(pi / (1.8 * std::asin(cover_radius))));
        if (m < 1) m = 1;
        if (m > 1000000000LL)
            throw SearchBudgetExceeded("direction cover too fine at this level",
                                       static_cast<std::uint64_t>(m));
        auto grid_match = [&](double theta_b, int i) -> const Cand* {
            const auto& list = per_grid[i];
            const Cand* best = nullptr;
            auto try_one = [&](const Cand& c) {
                double raw = std::abs(c.theta - theta_b);
                double dist = std::min(raw, pi - raw);
                if (dist <= std::asin(std::min(c.eta, 1.0)) &&
                    (best == nullptr || c.rank < best->rank))
                    best = &c;
            };
            auto scan_range = [&](double lo, double hi) {
                auto it = std::lower_bound(
                    list.begin(), list.end(), lo,
                    [](const Cand& c, double t) { return c.theta < t; });
                for (; it != list.end() && it->theta <= hi; ++it) try_one(*it);
            };
            double lo = theta_b - r_max, hi = theta_b + r_max;
            scan_range(std::max(lo, 0.0), std::min(hi, pi));
            if (lo < 0.0) scan_range(lo + pi, pi);
            if (hi > pi) scan_range(0.0, hi - pi);
            return best;
        };
        for (long long j = 0; j < m; ++j) {
            double theta_b = pi * static_cast<double>(j) / static_cast<double>(m);
            ++out.directions_checked;
            std::vector<const Cand*> matches(k);
            bool all = true;
            for (int i = 0; i < k && all; ++i) {
                matches[i] = grid_match(theta_b, i);
                all = matches[i] != nullptr;
            }
            if (!all) continue;
            Eigen::Vector2d b(std::cos(theta_b), std::sin(theta_b));
            out.member = true;
            out.direction = ProjectivePoint(b).rep();
            for (int i = 0; i < k; ++i) {
                out.q.push_back(matches[i]->q);
                double raw = std::abs(matches[i]->theta - theta_b);
                out.psi.push_back(std::sin(std::min(raw, pi - raw)));
                out.eta.push_back(matches[i]->eta);
            }
            return out;
        }
        return out;
    }

    // Higher d: direct product scan, honest about its limits.
    std::uint64_t centres = cap_cover_count(d, cover_radius);
    if (centres > 200000)
        throw SearchBudgetExceeded("direction cover too fine at this level", centres);
    if (h_max > 60)
        throw SearchBudgetExceeded("lattice range too wide at this level",
                                   static_cast<std::uint64_t>(h_max));
    struct VCand {
        Eigen::VectorXd v;
        double eta;
        std::vector<long long> q;
    };
    std::vector<std::vector<VCand>> per_grid(k);
    for (int i = 0; i < k; ++i) {
        detail::scan_integer_shells(n, h_max, [&](const std::vector<long long>& q) {
            if (vector_gcd(q) != 1) return false;
            Eigen::VectorXd qv(n);
            double sup = 0.0;
            for (int j = 0; j < n; ++j) {
                qv[j] = static_cast<double>(q[j]);
                sup = std::max(sup, std::abs(qv[j]));
            }
            Eigen::VectorXd v = rotations[i] * (base[i].numeric() * qv);
            per_grid[i].push_back({v.normalized(), eta_of(sup), q});
            return false;
        });
    }
    auto cover = build_cap_cover(d, cover_radius);
    for (const auto& b : cover.centres) {
        ++out.directions_checked;
        std::vector<const VCand*> matches(k);
        bool all = true;
        for (int i = 0; i < k && all; ++i) {
            matches[i] = nullptr;
            for (const auto& c : per_grid[i])
                if (projective_distance(c.v, b) <= c.eta) {
                    matches[i] = &c;
                    break;
                }
            all = matches[i] != nullptr;
        }
        if (!all) continue;
        out.member = true;
        out.direction = b;
        for (int i = 0; i < k; ++i) {
            out.q.push_back(matches[i]->q);
            out.psi.push_back(projective_distance(matches[i]->v, b));
            out.eta.push_back(matches[i]->eta);
        }
        return out;
    }
    return out;
}

}  // namespace forestlab

#include "forestlab/torus_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "forestlab/errors.hpp"

namespace forestlab {

namespace {

void require_nonzero(const Eigen::VectorXd& u) {
    if (u.size() == 0 || u.lpNorm<Eigen::Infinity>() == 0.0)
        throw ValidationError("direction must be nonzero");
}

double wrap01(double x) { return x - std::floor(x); }

// Ratios u_i / u_pivot with the pivot coordinate removed.
Eigen::VectorXd pivot_ratios(const Eigen::VectorXd& u, int pivot) {
    Eigen::VectorXd r(u.size() - 1);
    int k = 0;
    for (int i = 0; i < u.size(); ++i) {
        if (i == pivot) continue;
        r[k++] = u[i] / u[pivot];
    }
    return r;
}

// Segment a0 + t * dir, t in [0, 1]; dir = 0 encodes a point.
struct SegInstance {
    Eigen::VectorXd a0;
    Eigen::VectorXd dir;
};

// Exact minimum of max_j |a_j + t b_j| over t in [0, 1]: the upper envelope
// of finitely many absolute-value lines attains its minimum at an endpoint,
// at a per-line zero, or where two lines cross.
double segment_sup_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const int n = static_cast<int>(a.size());
    auto eval = [&](double t) {
        double m = 0.0;
        for (int j = 0; j < n; ++j) m = std::max(m, std::abs(a[j] + t * b[j]));
        return m;
    };
    double best = std::min(eval(0.0), eval(1.0));
    auto consider = [&](double t) {
        if (t > 0.0 && t < 1.0) best = std::min(best, eval(t));
    };
    for (int j = 0; j < n; ++j)
        if (b[j] != 0.0) consider(-a[j] / b[j]);
    for (int j = 0; j < n; ++j)
        for (int l = j + 1; l < n; ++l) {
            double dd = b[j] - b[l];
            if (dd != 0.0) consider((a[l] - a[j]) / dd);
            double ds = b[j] + b[l];
            if (ds != 0.0) consider(-(a[j] + a[l]) / ds);
        }
    return best;
}

double instance_distance(const SegInstance& s, const Eigen::VectorXd& c) {
    return segment_sup_distance(s.a0 - c, s.dir);
}

// Instances are the pieces shifted by every offset in {-1,0,1}^n, so the
// Euclidean-box distance to an instance set equals the torus distance.
std::vector<SegInstance> shifted_instances(const std::vector<TorusSegment>& pieces) {
    const int n = static_cast<int>(pieces.front().p0.size());
    std::vector<Eigen::VectorXd> offsets;
    std::vector<int> digit(n, -1);
    while (true) {
        Eigen::VectorXd o(n);
        for (int j = 0; j < n; ++j) o[j] = digit[j];
        offsets.push_back(o);
        int j = n - 1;
        while (j >= 0 && digit[j] == 1) digit[j--] = -1;
        if (j < 0) break;
        ++digit[j];
    }
    std::vector<SegInstance> inst;
    inst.reserve(pieces.size() * offsets.size());
    for (const auto& p : pieces)
        for (const auto& o : offsets) inst.push_back({p.p0 + o, p.p1 - p.p0});
    return inst;
}

struct DensitySearch {
    const std::vector<SegInstance>& inst;
    double delta;
    double floor_r;
    std::uint64_t budget;
    std::uint64_t processed = 0;

    bool hole = false;
    bool undecided = false;
    Eigen::VectorXd undecided_point;
    double undecided_dist = 0.0;
    double undecided_r = 0.0;
    Eigen::VectorXd stop_point;
    double stop_dist = 0.0;
    double stop_r = 0.0;

    double worst_discharged = -1.0;
    Eigen::VectorXd worst_center;
    double finest_r = 1.0;

    bool step(const Eigen::VectorXd& c, double r, const std::vector<int>& idx) {
        if (++processed > budget)
            throw EnumerationBudgetExceeded("box subdivision budget exhausted", budget);
        finest_r = std::min(finest_r, r);
        double dmin = std::numeric_limits<double>::infinity();
        std::vector<double> dist(idx.size());
        for (size_t k = 0; k < idx.size(); ++k) {
            dist[k] = instance_distance(inst[idx[k]], c);
            dmin = std::min(dmin, dist[k]);
        }
        if (dmin <= delta - r) {
            if (dmin > worst_discharged) {
                worst_discharged = dmin;
                worst_center = c;
            }
            return false;
        }
        if (dmin >= delta + r) {
            hole = true;
            stop_point = c;
            stop_dist = dmin;
            stop_r = r;
            return true;
        }
        if (r < floor_r) {
            // The floor only leaves this box unresolved. A certifiable hole
            // may still sit elsewhere, so record the deepest near miss and
            // keep searching.
            if (!undecided || dmin > undecided_dist) {
                undecided_point = c;
                undecided_dist = dmin;
                undecided_r = r;
            }
            undecided = true;
            return false;
        }
        // A pruned instance is never the closest anywhere in the box, so the
        // child minima over the kept list are the true minima.
        std::vector<int> keep;
        keep.reserve(idx.size());
        for (size_t k = 0; k < idx.size(); ++k)
            if (dist[k] <= dmin + 2.0 * r) keep.push_back(idx[k]);
        const int n = static_cast<int>(c.size());
        const double r2 = r / 2.0;
        std::vector<int> digit(n, -1);
        while (true) {
            Eigen::VectorXd c2 = c;
            for (int j = 0; j < n; ++j) c2[j] += r2 * digit[j];
            if (step(c2, r2, keep)) return true;
            int j = n - 1;
            while (j >= 0 && digit[j] == 1) digit[j--] = -1;
            if (j < 0) break;
            digit[j] += 2;
        }
        return false;
    }
};

DensityReport decide_density(const std::vector<TorusSegment>& pieces, int n,
                             double delta, std::uint64_t box_budget, bool truncated) {
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    auto inst = shifted_instances(pieces);
    DensitySearch search{inst, delta, delta * 1e-3, box_budget};
    std::vector<int> all(inst.size());
    for (size_t i = 0; i < inst.size(); ++i) all[i] = static_cast<int>(i);
    Eigen::VectorXd root = Eigen::VectorXd::Constant(n, 0.5);
    search.step(root, 0.5, all);

    DensityReport rep;
    rep.boxes_processed = search.processed;
    rep.truncated = truncated;
    if (search.hole) {
        double full = std::numeric_limits<double>::infinity();
        for (const auto& s : inst)
            full = std::min(full, instance_distance(s, search.stop_point));
        rep.dense = false;
        rep.certified = !truncated && full >= delta;
        rep.resolution = search.stop_r;
        rep.farthest_point = search.stop_point;
        rep.farthest_distance = full;
        return rep;
    }
    if (search.undecided) {
        rep.dense = false;
        rep.certified = false;
        rep.resolution = search.undecided_r;
        rep.farthest_point = search.undecided_point;
        rep.farthest_distance = search.undecided_dist;
        return rep;
    }
    rep.dense = true;
    rep.certified = true;
    rep.resolution = search.finest_r;
    rep.farthest_point = search.worst_center;
    rep.farthest_distance = search.worst_discharged;
    return rep;
}

}  // namespace

int pivot_index(const Eigen::VectorXd& u) {
    require_nonzero(u);
    int p = 0;
    for (int i = 1; i < u.size(); ++i)
        if (std::abs(u[i]) >= std::abs(u[p])) p = i;
    return p;
}

std::vector<Eigen::VectorXd> discrete_flow(const Eigen::VectorXd& u, long long S) {
    require_nonzero(u);
    if (u.size() < 2) throw ValidationError("need at least two coordinates");
    if (S < 0) throw ValidationError("S must be >= 0");
    Eigen::VectorXd r = pivot_ratios(u, pivot_index(u));
    const int d = static_cast<int>(r.size());
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(static_cast<size_t>(2 * S + 1));
    // Rational ratios make m*r[j] mod 1 land on the same torus point with
    // different last-ulp noise, so duplicates are merged with a tolerance
    // far above that noise yet far below any genuine orbit gap at desk scale.
    const double tol = 1e-9;
    for (long long m = -S; m <= S; ++m) {
        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) {
            double v = wrap01(static_cast<double>(m) * r[j]);
            if (v > 1.0 - tol) v = 0.0;
            x[j] = v;
        }
        pts.push_back(std::move(x));
    }
    auto lex_less = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        for (int j = 0; j < a.size(); ++j) {
            if (a[j] < b[j]) return true;
            if (a[j] > b[j]) return false;
        }
        return false;
    };
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [tol](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                              return (a - b).lpNorm<Eigen::Infinity>() <= tol;
                          }),
              pts.end());
    return pts;
}

FlowDecomposition wrap_flow(const Eigen::VectorXd& u, double horizon) {
    require_nonzero(u);
    if (!(horizon >= 0.0)) throw ValidationError("horizon must be >= 0");
    const int n = static_cast<int>(u.size());
    std::vector<double> breaks = {-horizon, horizon};
    for (int j = 0; j < n; ++j) {
        if (u[j] == 0.0) continue;
        double lo = -horizon * std::abs(u[j]);
        long long k0 = static_cast<long long>(std::ceil(lo));
        long long k1 = static_cast<long long>(std::floor(-lo));
        for (long long k = k0; k <= k1; ++k) {
            double t = static_cast<double>(k) / u[j];
            if (t >= -horizon && t <= horizon) breaks.push_back(t);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    const double merge_eps = 1e-15 * std::max(1.0, horizon);
    std::vector<double> uniq;
    for (double t : breaks)
        if (uniq.empty() || t - uniq.back() > merge_eps) uniq.push_back(t);

    FlowDecomposition out;
    auto wrap_point = [&](double t) {
        Eigen::VectorXd p(n);
        for (int j = 0; j < n; ++j) p[j] = wrap01(t * u[j]);
        return p;
    };
    if (uniq.size() < 2) {
        Eigen::VectorXd p = wrap_point(uniq.empty() ? 0.0 : uniq.front());
        out.segments.push_back({p, p});
        return out;
    }
    size_t count = uniq.size() - 1;
    size_t lo_idx = 0, hi_idx = count;
    const auto cap = static_cast<size_t>(4.0 * n * horizon + 4.0);
    if (count > cap) {
        // Keep the innermost pieces around t = 0; outer ones are dropped and
        // the truncation is reported.
        out.truncated = true;
        size_t mid = static_cast<size_t>(
            std::lower_bound(uniq.begin(), uniq.end(), 0.0) - uniq.begin());
        if (mid >= count) mid = count - 1;
        size_t half = cap / 2;
        lo_idx = mid > half ? mid - half : 0;
        hi_idx = std::min(count, lo_idx + cap);
        lo_idx = hi_idx > cap ? hi_idx - cap : 0;
    }
    for (size_t i = lo_idx; i < hi_idx; ++i) {
        double ta = uniq[i], tb = uniq[i + 1];
        double tm = 0.5 * (ta + tb);
        Eigen::VectorXd p0(n), p1(n);
        for (int j = 0; j < n; ++j) {
            double base = std::floor(tm * u[j]);
            p0[j] = std::clamp(ta * u[j] - base, 0.0, 1.0);
            p1[j] = std::clamp(tb * u[j] - base, 0.0, 1.0);
        }
        out.segments.push_back({std::move(p0), std::move(p1)});
    }
    return out;
}

DensityReport flow_density_continuous(const Eigen::VectorXd& u, double horizon,
                                      double delta, std::uint64_t box_budget) {
    auto flow = wrap_flow(u, horizon);
    return decide_density(flow.segments, static_cast<int>(u.size()), delta,
                          box_budget, flow.truncated);
}

DensityReport flow_density_discrete(const Eigen::VectorXd& u, long long S,
                                    double delta, std::uint64_t box_budget) {
    auto pts = discrete_flow(u, S);
    std::vector<TorusSegment> pieces;
    pieces.reserve(pts.size());
    for (const auto& p : pts) pieces.push_back({p, p});
    return decide_density(pieces, static_cast<int>(pts.front().size()), delta,
                          box_budget, false);
}

FillingTime filling_time(const Eigen::VectorXd& u, double delta,
                         const FillingOptions& opts) {
    require_nonzero(u);
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    if (!(opts.rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
    const int n = static_cast<int>(u.size());
    auto dense_at = [&](double T) {
        return flow_density_continuous(u, T, delta, opts.box_budget).dense;
    };
    if (dense_at(0.0)) return {false, 0.0, std::nullopt};

    auto rel = integer_relation(u, opts.relation_height, opts.relation_tol);
    const double root_n = std::sqrt(static_cast<double>(n));
    double lo = 0.0, hi = 0.0;
    if (rel) {
        // A relation confines the closure to a proper subtorus, so density
        // saturates by a probe horizon scaled to the relation height.
        double qn = 0.0;
        for (long long c : rel->coeffs)
            qn = std::max(qn, static_cast<double>(std::llabs(c)));
        double probe = std::max(4.0 / delta, 2.0 * root_n * (qn + 1.0));
        auto rep = flow_density_continuous(u, probe, delta, opts.box_budget);
        if (!rep.dense) {
            if (rep.certified) return {true, 0.0, rel};
            throw SearchBudgetExceeded("density undecided at the probe horizon",
                                       opts.box_budget);
        }
        hi = probe;
    } else {
        double cap = opts.horizon_cap > 0.0
                         ? opts.horizon_cap
                         : 200.0 * std::pow(delta, -static_cast<double>(n - 1)) * root_n;
        double T = 1.0;
        while (!dense_at(T)) {
            lo = T;
            T *= 2.0;
            if (T > cap)
                throw SearchBudgetExceeded(
                    "no density reached below the horizon cap",
                    static_cast<std::uint64_t>(cap));
        }
        hi = T;
    }
    while (hi - lo > opts.rel_tol * hi) {
        double mid = 0.5 * (lo + hi);
        if (dense_at(mid))
            hi = mid;
        else
            lo = mid;
    }
    return {false, hi, std::nullopt};
}

DirichletResult dirichlet_witness(const Eigen::VectorXd& ratios, long long X) {
    if (ratios.size() == 0) throw ValidationError("need at least one ratio");
    if (X < 1) throw ValidationError("X must be >= 1");
    const int d = static_cast<int>(ratios.size());
    DirichletResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (long long m = 1; m <= X; ++m) {
        double v = 0.0;
        for (int i = 0; i < d; ++i)
            v = std::max(v, dist_to_integers(static_cast<double>(m) * ratios[i]));
        if (v < best.value) {
            best.m = m;
            best.value = v;
        }
    }
    best.bound = std::pow(static_cast<double>(X), -1.0 / d);
    best.within_bound = best.value <= best.bound;
    return best;
}

TransferenceResult transference_apply(const Eigen::VectorXd& ratios, double C,
                                      long long X, const Eigen::VectorXd& targets) {
    const int d = static_cast<int>(ratios.size());
    if (d == 0) throw ValidationError("need at least one ratio");
    if (targets.size() != d) throw ValidationError("targets must match ratios");
    if (X < 1) throw ValidationError("X must be >= 1");
    if (!(C > 0.0)) throw ValidationError("C must be positive");
    auto homog = [&](long long m) {
        double v = 0.0;
        for (int i = 0; i < d; ++i)
            v = std::max(v, dist_to_integers(static_cast<double>(m) * ratios[i]));
        return v;
    };
    for (long long m = 1; m < X; ++m)
        if (homog(m) < C)
            throw HypothesisViolated("homogeneous minimum drops below C", m);

    auto h = static_cast<long long>(
        std::floor(1.0 / (static_cast<double>(X) * std::pow(C, d))));
    if (h < 0) h = 0;
    const double cp = 0.5 * static_cast<double>(h + 1) * C;
    const double xp = 0.5 * static_cast<double>(h + 1) * static_cast<double>(X);
    auto err_at = [&](long long x) {
        double e = 0.0;
        for (int i = 0; i < d; ++i)
            e = std::max(e, dist_to_integers(static_cast<double>(x) * ratios[i] -
                                             targets[i]));
        return e;
    };
    const auto xmax = static_cast<long long>(std::floor(xp));
    for (long long a = 0; a <= xmax; ++a) {
        for (long long x : {a, -a}) {
            double e = err_at(x);
            if (e <= cp) return {x, e, h, cp, xp};
            if (a == 0) break;
        }
    }
    throw std::logic_error("transference guarantee produced no candidate");
}

HypothesisCheck flow_density_hypothesis(const Eigen::VectorXd& u, long long S, double delta) {
    require_nonzero(u);
    if (u.size() < 2) throw ValidationError("need at least two coordinates");
    if (S < 1) throw ValidationError("S must be >= 1");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    Eigen::VectorXd r = pivot_ratios(u, pivot_index(u));
    const int d = static_cast<int>(r.size());
    HypothesisCheck out;
    out.threshold = std::pow(static_cast<double>(S), -1.0 / d);
    out.range = std::pow(static_cast<double>(S), 1.0 - 1.0 / d) / delta;
    for (long long m = 1; static_cast<double>(m) < out.range; ++m) {
        double v = 0.0;
        for (int i = 0; i < d; ++i)
            v = std::max(v, dist_to_integers(static_cast<double>(m) * r[i]));
        if (v < out.threshold) {
            out.holds = false;
            out.violator = m;
            out.value = v;
            return out;
        }
    }
    out.holds = true;
    return out;
}

std::optional<DiophantineWitness> diophantine_witness_search(const Eigen::VectorXd& u,
                                                      long long S, double delta) {
    require_nonzero(u);
    if (u.size() < 2) throw ValidationError("need at least two coordinates");
    if (!(delta > 0.0)) throw ValidationError("delta must be positive");
    const int n = static_cast<int>(u.size());
    const int d = n - 1;
    if (!(static_cast<double>(S) > std::pow(static_cast<double>(n), d / 2.0)))
        throw InvalidRegime("S must exceed (d+1)^(d/2)");
    const double norm_bound =
        std::pow(static_cast<double>(S), 1.0 - 1.0 / d) / delta;
    auto hmax = static_cast<long long>(std::ceil(norm_bound)) - 1;
    if (hmax < 1) return std::nullopt;
    const double s_root = std::pow(static_cast<double>(S), 1.0 / d);
    std::optional<DiophantineWitness> found;
    detail::scan_integer_shells(n, hmax, [&](const std::vector<long long>& q) {
        double sup = 0.0;
        Eigen::VectorXd qv(n);
        for (int j = 0; j < n; ++j) {
            qv[j] = static_cast<double>(q[j]);
            sup = std::max(sup, std::abs(qv[j]));
        }
        if (!(sup < norm_bound)) return false;
        double psi = projective_distance(u, qv);
        double psi_bound = static_cast<double>(n) / (sup * s_root);
        if (psi < psi_bound) {
            found = DiophantineWitness{q, sup, psi, norm_bound, psi_bound};
            return true;
        }
        return false;
    });
    return found;
}

}  // namespace forestlab

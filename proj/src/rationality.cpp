#include "forestlab/rationality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace forestlab {

namespace {

// Canonical sign: first nonzero coefficient positive.
void canonicalize(std::vector<long long>& q) {
    for (long long c : q) {
        if (c == 0) continue;
        if (c < 0)
            for (auto& x : q) x = -x;
        return;
    }
}

bool is_zero(const std::vector<long long>& q) {
    return std::all_of(q.begin(), q.end(), [](long long c) { return c == 0; });
}

double dot(const std::vector<long long>& q, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) s += static_cast<double>(q[i]) * v[i];
    return s;
}

}  // namespace

namespace detail {

bool scan_integer_shells(int n, long long height,
                         const std::function<bool(const std::vector<long long>&)>& fn) {
    std::vector<long long> q(n);
    for (long long h = 1; h <= height; ++h) {
        std::fill(q.begin(), q.end(), -h);
        while (true) {
            long long sup = 0;
            for (long long c : q) sup = std::max(sup, std::llabs(c));
            if (sup == h) {
                bool canonical = true;
                for (long long c : q) {
                    if (c == 0) continue;
                    canonical = c > 0;
                    break;
                }
                if (canonical && fn(q)) return true;
            }
            int j = n - 1;
            while (j >= 0 && q[j] == h) {
                q[j] = -h;
                --j;
            }
            if (j < 0) break;
            ++q[j];
        }
    }
    return false;
}

}  // namespace detail

namespace {

std::optional<RelationWitness> relation_n2(const Eigen::VectorXd& v, long long height,
                                           double threshold) {
    // With |v_p| the larger component, a near-relation fixes the pivot
    // coefficient to the rounding, so one pass over the other coefficient is
    // exhaustive.
    int p = std::abs(v[0]) >= std::abs(v[1]) ? 0 : 1;
    int o = 1 - p;
    if (std::abs(v[p]) < threshold) {
        std::vector<long long> q(2, 0);
        q[p] = 1;  // both components below threshold, either axis works
        canonicalize(q);
        return RelationWitness{q, std::abs(dot(q, v))};
    }
    for (long long a = 1; a <= height; ++a) {
        double ideal = -static_cast<double>(a) * v[o] / v[p];
        long long r = static_cast<long long>(std::llround(ideal));
        if (std::llabs(r) > height) continue;
        std::vector<long long> q(2, 0);
        q[o] = a;
        q[p] = r;
        if (is_zero(q)) continue;
        double res = std::abs(dot(q, v));
        if (res < threshold) {
            canonicalize(q);
            return RelationWitness{q, res};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<RelationWitness> integer_relation(const Eigen::VectorXd& v,
                                                long long height, double tol) {
    if (height < 1) throw ValidationError("height must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    const int n = static_cast<int>(v.size());
    if (n == 0) throw ValidationError("empty vector");
    double scale = v.norm();
    if (scale == 0.0) {
        std::vector<long long> q(n, 0);
        q[0] = 1;
        return RelationWitness{q, 0.0};
    }
    const double threshold = tol * scale;
    if (n == 1) {
        if (std::abs(v[0]) < threshold) return RelationWitness{{1}, std::abs(v[0])};
        return std::nullopt;
    }
    if (n == 2) return relation_n2(v, height, threshold);

    std::optional<RelationWitness> found;
    detail::scan_integer_shells(n, height, [&](const std::vector<long long>& q) {
        double res = std::abs(dot(q, v));
        if (res < threshold) {
            found = RelationWitness{q, res};
            return true;
        }
        return false;
    });
    return found;
}

std::optional<RelationWitness> integer_relation_exact(const std::vector<Rational>& v,
                                                      long long height) {
    if (height < 1) throw ValidationError("height must be >= 1");
    const int n = static_cast<int>(v.size());
    if (n == 0) throw ValidationError("empty vector");
    auto big_ok = [height](const std::vector<BigInt>& w) {
        for (const auto& c : w)
            if (boost::multiprecision::abs(c) > height) return false;
        return true;
    };
    auto to_ll = [](const std::vector<BigInt>& w) {
        std::vector<long long> q;
        q.reserve(w.size());
        for (const auto& c : w) q.push_back(static_cast<long long>(c));
        return q;
    };
    if (n == 1) {
        if (v[0] == 0) return RelationWitness{{1}, 0.0};
        return std::nullopt;
    }
    if (n == 2) {
        // (v2, -v1) is orthogonal to v; clearing denominators gives the
        // smallest integer relation, which exists whenever v != 0.
        std::vector<BigInt> w = integer_direction({v[1], -v[0]});
        bool zero = true;
        for (const auto& c : w) zero = zero && c == 0;
        if (zero) return RelationWitness{{1, 0}, 0.0};
        if (!big_ok(w)) return std::nullopt;
        return RelationWitness{to_ll(w), 0.0};
    }
    std::optional<RelationWitness> found;
    detail::scan_integer_shells(n, height, [&](const std::vector<long long>& q) {
        Rational s(0);
        for (int i = 0; i < n; ++i) s += Rational(q[i]) * v[i];
        if (s == 0) {
            found = RelationWitness{q, 0.0};
            return true;
        }
        return false;
    });
    return found;
}

namespace {

// Nonzero rational vector orthogonal to all rows; rows must have rank < n.
std::vector<Rational> rational_nullspace_vector(std::vector<std::vector<Rational>> rows,
                                                int n) {
    int rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < n && rank < static_cast<int>(rows.size()); ++col) {
        int p = -1;
        for (int r = rank; r < static_cast<int>(rows.size()); ++r)
            if (rows[r][col] != 0) { p = r; break; }
        if (p < 0) continue;
        std::swap(rows[rank], rows[p]);
        Rational piv = rows[rank][col];
        for (int j = 0; j < n; ++j) rows[rank][j] /= piv;
        for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            Rational f = rows[r][col];
            for (int j = 0; j < n; ++j) rows[r][j] -= f * rows[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<bool> is_pivot(n, false);
    for (int c : pivot_col) is_pivot[c] = true;
    int free_col = -1;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) { free_col = c; break; }
    if (free_col < 0) throw ValidationError("rows have full rank, no nullspace");
    std::vector<Rational> b(n, Rational(0));
    b[free_col] = 1;
    for (int r = 0; r < rank; ++r) b[pivot_col[r]] = -rows[r][free_col];
    return b;
}

Eigen::VectorXd to_numeric(const std::vector<Rational>& v) {
    Eigen::VectorXd x(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = to_double(v[i]);
    return x;
}

std::vector<Rational> apply_rational(const RationalMatrix& m, const std::vector<Rational>& v) {
    return m.apply(v);
}

double stack_smallest_singular(const std::vector<Eigen::VectorXd>& unit_rows) {
    const int k = static_cast<int>(unit_rows.size());
    const int n = static_cast<int>(unit_rows.front().size());
    Eigen::MatrixXd w(k, n);
    for (int i = 0; i < k; ++i) w.row(i) = unit_rows[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (k < n) return 0.0;  // rank cannot reach n
    return sv(sv.size() - 1);
}

Eigen::VectorXd stack_null_direction(const std::vector<Eigen::VectorXd>& rows, int n) {
    Eigen::MatrixXd w(static_cast<int>(rows.size()), n);
    for (size_t i = 0; i < rows.size(); ++i) w.row(static_cast<int>(i)) = rows[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullV);
    return ProjectivePoint(svd.matrixV().col(n - 1)).rep();
}

}  // namespace

ForestVerdict dense_forest_check(const std::vector<Matrix>& mats, long long height,
                                 double tol, std::uint64_t budget) {
    if (mats.empty()) throw ValidationError("need at least one matrix");
    if (height < 1) throw ValidationError("height must be >= 1");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    const int n = mats.front().n();
    const int k = static_cast<int>(mats.size());
    for (const auto& m : mats)
        if (m.n() != n) throw ValidationError("matrices must share a dimension");

    ForestVerdict verdict;
    verdict.height = height;
    verdict.tolerance = tol;
    const double accept = 2.0 * tol * std::sqrt(static_cast<double>(k));

    if (n == 1) return verdict;  // scalars are never rationally dependent

    bool all_exact = std::all_of(mats.begin(), mats.end(),
                                 [](const Matrix& m) { return m.has_exact(); });

    if (k < n) {
        // Fewer pullbacks than dimensions: e1 per grid leaves a common
        // orthogonal direction no matter what the matrices are.
        std::vector<Eigen::VectorXd> rows;
        verdict.status = ForestVerdict::Status::NotDenseForest;
        for (const auto& m : mats) {
            std::vector<long long> p(n, 0);
            p[0] = 1;
            verdict.witnesses.push_back(p);
            Eigen::VectorXd w = m.inverse().transpose().col(0);
            rows.push_back(w.normalized());
        }
        if (all_exact) {
            std::vector<std::vector<Rational>> wr;
            for (const auto& m : mats) {
                RationalMatrix invt = m.exact().inverse().transpose();
                std::vector<Rational> e1(n, Rational(0));
                e1[0] = 1;
                wr.push_back(apply_rational(invt, e1));
            }
            auto b = rational_nullspace_vector(wr, n);
            verdict.common_direction = ProjectivePoint(to_numeric(b)).rep();
            verdict.exact = true;
            verdict.residual = 0.0;
        } else {
            verdict.common_direction = stack_null_direction(rows, n);
            double worst = 0.0;
            for (const auto& w : rows)
                worst = std::max(worst, std::abs(w.dot(verdict.common_direction)));
            verdict.residual = worst;
        }
        return verdict;
    }

    if (n == 2) {
        // Every candidate obstruction is generated by a primitive p1: b must
        // be orthogonal to M1^{-T} p1, which pins b up to sign, and then each
        // further grid needs an integer vector orthogonal to M_i^{-1} b.
        std::vector<RationalMatrix> inv_exact;
        if (all_exact)
            for (const auto& m : mats) inv_exact.push_back(m.exact().inverse());

        std::optional<ForestVerdict> found;
        detail::scan_integer_shells(2, height, [&](const std::vector<long long>& p1) {
            long long g = std::llabs(std::gcd(p1[0], p1[1]));
            if (g != 1) return false;
            if (all_exact) {
                std::vector<Rational> p1r = {Rational(p1[0]), Rational(p1[1])};
                RationalMatrix m1_invt = inv_exact[0].transpose();
                std::vector<Rational> w1 = apply_rational(m1_invt, p1r);
                std::vector<Rational> b = {-w1[1], w1[0]};
                std::vector<std::vector<long long>> ps = {p1};
                for (int i = 1; i < k; ++i) {
                    std::vector<Rational> u = apply_rational(inv_exact[i], b);
                    std::vector<BigInt> pi = integer_direction({u[1], -u[0]});
                    bool ok = !(pi[0] == 0 && pi[1] == 0);
                    for (const auto& c : pi)
                        ok = ok && boost::multiprecision::abs(c) <= height;
                    if (!ok) return false;
                    ps.push_back({static_cast<long long>(pi[0]),
                                  static_cast<long long>(pi[1])});
                }
                ForestVerdict v = verdict;
                v.status = ForestVerdict::Status::NotDenseForest;
                v.witnesses = ps;
                v.common_direction = ProjectivePoint(to_numeric(b)).rep();
                v.exact = true;
                v.residual = 0.0;
                found = std::move(v);
                return true;
            }
            Eigen::Vector2d p1v(static_cast<double>(p1[0]), static_cast<double>(p1[1]));
            Eigen::VectorXd w1 = mats[0].inverse().transpose() * p1v;
            Eigen::Vector2d b(-w1[1], w1[0]);
            b.normalize();
            std::vector<std::vector<long long>> ps = {p1};
            std::vector<Eigen::VectorXd> rows = {w1.normalized()};
            for (int i = 1; i < k; ++i) {
                Eigen::VectorXd u = mats[i].inverse() * b;
                Eigen::VectorXd uh = u.normalized();
                auto rel = relation_n2(uh, height, 2.0 * tol);
                if (!rel) return false;
                ps.push_back(rel->coeffs);
                Eigen::Vector2d pv(static_cast<double>(rel->coeffs[0]),
                                   static_cast<double>(rel->coeffs[1]));
                rows.push_back((mats[i].inverse().transpose() * pv).normalized());
            }
            double sigma = stack_smallest_singular(rows);
            if (sigma >= accept) return false;
            ForestVerdict v = verdict;
            v.status = ForestVerdict::Status::NotDenseForest;
            v.witnesses = ps;
            v.common_direction = ProjectivePoint(b).rep();
            v.residual = sigma;
            found = std::move(v);
            return true;
        });
        if (found) return *found;
        return verdict;
    }

    // Joint exhaustive search over witness tuples, budgeted; the height is
    // lowered to fit the budget and absence within the lowered height is
    // inconclusive.
    long long h_eff = height;
    auto tuple_count = [&](long long h) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c *= std::pow(2.0 * static_cast<double>(h) + 1.0, n);
        return c;
    };
    while (h_eff > 1 && tuple_count(h_eff) > static_cast<double>(budget)) --h_eff;
    bool reduced = h_eff < height;
    if (tuple_count(h_eff) > static_cast<double>(budget))
        throw SearchBudgetExceeded("witness tuple space exceeds budget", budget);

    std::vector<std::vector<long long>> ps(k, std::vector<long long>(n, 0));
    std::vector<Eigen::VectorXd> rows(k);
    std::optional<ForestVerdict> found;
    // Odometer over the k-fold box [-h, h]^{nk} with canonical per-vector
    // signs; lexicographic order keeps the first find deterministic.
    std::vector<long long> flat(static_cast<size_t>(n) * k, -h_eff);
    auto next = [&] {
        int j = static_cast<int>(flat.size()) - 1;
        while (j >= 0 && flat[j] == h_eff) {
            flat[j] = -h_eff;
            --j;
        }
        if (j < 0) return false;
        ++flat[j];
        return true;
    };
    do {
        bool usable = true;
        for (int i = 0; i < k && usable; ++i) {
            for (int j = 0; j < n; ++j) ps[i][j] = flat[static_cast<size_t>(i) * n + j];
            if (is_zero(ps[i])) usable = false;
            for (long long c : ps[i]) {
                if (c == 0) continue;
                usable = usable && c > 0;
                break;
            }
        }
        if (!usable) continue;
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd pv(n);
            for (int j = 0; j < n; ++j) pv[j] = static_cast<double>(ps[i][j]);
            rows[i] = (mats[i].inverse().transpose() * pv).normalized();
        }
        double sigma = stack_smallest_singular(rows);
        if (sigma < accept) {
            ForestVerdict v = verdict;
            v.status = ForestVerdict::Status::NotDenseForest;
            v.witnesses = ps;
            v.common_direction = stack_null_direction(rows, n);
            v.residual = sigma;
            found = std::move(v);
            break;
        }
    } while (next());
    if (found) return *found;
    if (reduced)
        throw SearchBudgetExceeded("no witness within the budget-reduced height",
                                   budget);
    return verdict;
}

std::vector<DirectionVerdict> direction_dependence(const std::vector<Matrix>& mats,
                                                   const Eigen::VectorXd& b,
                                                   long long height, double tol) {
    if (mats.empty()) throw ValidationError("need at least one matrix");
    if (std::abs(b.norm() - 1.0) > 1e-12)
        throw ValidationError("direction must be a unit vector");
    std::vector<DirectionVerdict> out;
    out.reserve(mats.size());
    for (const auto& m : mats) {
        Eigen::VectorXd u = m.inverse() * b;
        DirectionVerdict v;
        v.witness = integer_relation(u, height, tol);
        v.dependent = v.witness.has_value();
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace forestlab

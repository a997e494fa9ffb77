#include "forestlab/rational.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace forestlab {

Rational parse_rational(const std::string& text) {
    auto bad = [&] { return ValidationError("not a rational literal: '" + text + "'"); };
    std::string s = text;
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        std::string p = s.substr(0, slash);
        std::string q = s.substr(slash + 1);
        if (p.empty() || q.empty()) throw bad();
        BigInt den(q);
        if (den == 0) throw ValidationError("zero denominator in '" + text + "'");
        return Rational(BigInt(p), den);
    } catch (const std::runtime_error&) {
        throw bad();
    }
}

RationalMatrix RationalMatrix::identity(int n) {
    RationalMatrix m;
    m.n = n;
    m.a.assign(static_cast<size_t>(n) * n, Rational(0));
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t;
    t.n = n;
    t.a.resize(a.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t.at(j, i) = at(i, j);
    return t;
}

Rational RationalMatrix::determinant() const {
    // Fraction-free elimination would be faster; plain Gauss is fine at n <= 4.
    RationalMatrix w = *this;
    Rational det(1);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (w.at(r, col) != 0) { pivot = r; break; }
        if (pivot < 0) return Rational(0);
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(w.at(pivot, j), w.at(col, j));
            det = -det;
        }
        det *= w.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            if (w.at(r, col) == 0) continue;
            Rational f = w.at(r, col) / w.at(col, col);
            for (int j = col; j < n; ++j) w.at(r, j) -= f * w.at(col, j);
        }
    }
    return det;
}

RationalMatrix RationalMatrix::inverse() const {
    RationalMatrix w = *this;
    RationalMatrix inv = identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (w.at(r, col) != 0) { pivot = r; break; }
        if (pivot < 0) throw SingularMatrix("rational matrix has zero determinant");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(w.at(pivot, j), w.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        Rational p = w.at(col, col);
        for (int j = 0; j < n; ++j) {
            w.at(col, j) /= p;
            inv.at(col, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || w.at(r, col) == 0) continue;
            Rational f = w.at(r, col);
            for (int j = 0; j < n; ++j) {
                w.at(r, j) -= f * w.at(col, j);
                inv.at(r, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

std::vector<Rational> RationalMatrix::apply(const std::vector<Rational>& v) const {
    std::vector<Rational> out(static_cast<size_t>(n), Rational(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i] += at(i, j) * v[j];
    return out;
}

RationalMatrix RationalMatrix::multiply(const RationalMatrix& rhs) const {
    RationalMatrix out;
    out.n = n;
    out.a.assign(a.size(), Rational(0));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            if (at(i, l) == 0) continue;
            for (int j = 0; j < n; ++j) out.at(i, j) += at(i, l) * rhs.at(l, j);
        }
    return out;
}

std::vector<BigInt> integer_direction(const std::vector<Rational>& v) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    using boost::multiprecision::gcd;
    BigInt lcm_den(1);
    for (const auto& r : v) {
        BigInt d = denominator(r);
        lcm_den = lcm_den / gcd(lcm_den, d) * d;
    }
    std::vector<BigInt> w;
    w.reserve(v.size());
    BigInt content(0);
    for (const auto& r : v) {
        BigInt x = numerator(r) * (lcm_den / denominator(r));
        content = gcd(content, x);
        w.push_back(x);
    }
    if (content == 0) return w;  // zero vector
    int lead_sign = 0;
    for (auto& x : w) {
        x /= content;
        if (lead_sign == 0 && x != 0) lead_sign = (x > 0) ? 1 : -1;
    }
    if (lead_sign < 0)
        for (auto& x : w) x = -x;
    return w;
}

}  // namespace forestlab

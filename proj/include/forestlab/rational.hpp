#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "forestlab/errors.hpp"

namespace forestlab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// Accepts "p", "-p", "p/q" with integer p, q and q != 0.
Rational parse_rational(const std::string& text);

// Dense square matrix over Q, row major. Small sizes only; operations are
// textbook Gauss-Jordan and meant for certificates, not performance.
struct RationalMatrix {
    int n = 0;
    std::vector<Rational> a;

    const Rational& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
    Rational& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }

    static RationalMatrix identity(int n);
    RationalMatrix transpose() const;
    // Throws SingularMatrix when the determinant vanishes.
    RationalMatrix inverse() const;
    Rational determinant() const;
    std::vector<Rational> apply(const std::vector<Rational>& v) const;
    RationalMatrix multiply(const RationalMatrix& rhs) const;
};

// Smallest integer vector proportional to v (denominators cleared, content
// divided out, first nonzero entry positive). Zero vector maps to itself.
std::vector<BigInt> integer_direction(const std::vector<Rational>& v);

}  // namespace forestlab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "forestlab/errors.hpp"
#include "forestlab/rng.hpp"
#include "forestlab/sphere_cover.hpp"

using namespace forestlab;

TEST_CASE("circle cover at eta one half uses four centres") {
    CapCover c = build_cap_cover(1, 0.5);
    CHECK(c.centres.size() == 4);
    CHECK(cap_cover_count(1, 0.5) == 4);
    // First centre is the first axis; spacing is pi/4.
    CHECK(c.centres[0][0] == doctest::Approx(1.0));
    CHECK(c.centres[0][1] == doctest::Approx(0.0));
    // Worst direction sits midway between adjacent centres.
    Eigen::VectorXd mid(2);
    mid << std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8);
    CHECK(cover_gap_at(c, mid) == doctest::Approx(std::sin(std::numbers::pi / 8)));
    CHECK(std::sin(std::numbers::pi / 8) < 0.5);
}

TEST_CASE("cap covers get denser as eta shrinks and stay within budget") {
    for (double eta : {0.4, 0.2, 0.1, 0.05}) {
        for (int d : {1, 2}) {
            CapCover c = build_cap_cover(d, eta);
            CHECK(c.centres.size() == cap_cover_count(d, eta));
            CHECK(c.c_cover ==
                  doctest::Approx(c.centres.size() * std::pow(eta, d)));
            // Verified gap must stay below eta.
            double gap = verify_cover(c, 20000, 99);
            CHECK(gap < eta);
            CHECK(c.verified_max_gap == doctest::Approx(gap));
        }
    }
}

TEST_CASE("every centre is canonical and unit length") {
    CapCover c = build_cap_cover(2, 0.3);
    for (const auto& v : c.centres) {
        CHECK(v.norm() == doctest::Approx(1.0));
        for (int i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) > 1e-14) {
                CHECK(v[i] > 0.0);
                break;
            }
        }
    }
}

TEST_CASE("three dimensional projective cover also verifies") {
    CapCover c = build_cap_cover(3, 0.5);
    double gap = verify_cover(c, 20000, 5);
    CHECK(gap < 0.5);
}

TEST_CASE("cover construction validates its regime") {
    CHECK_THROWS_AS(build_cap_cover(4, 0.3), UnsupportedDimension);
    CHECK_THROWS_AS(build_cap_cover(1, 0.0), ValidationError);
    CHECK_THROWS_AS(build_cap_cover(1, 1.5), ValidationError);
}

TEST_CASE("wilson interval brackets the proportion and stays in range") {
    auto e = wilson_interval(50, 100);
    CHECK(e.p_hat == doctest::Approx(0.5));
    CHECK(e.lo > 0.40);
    CHECK(e.hi < 0.60);
    CHECK(e.lo < 0.5);
    CHECK(e.hi > 0.5);
    auto zero = wilson_interval(0, 100);
    CHECK(zero.lo == doctest::Approx(0.0));
    CHECK(zero.hi > 0.0);
    auto all = wilson_interval(100, 100);
    CHECK(all.hi == doctest::Approx(1.0));
    CHECK(all.lo < 1.0);
}

TEST_CASE("alignment measure for one grid matches the arc length formula") {
    // For a single identity grid in the plane, membership asks the rotated
    // line [R q] to fall within eta of [b]; by rotation invariance the
    // probability is (2/pi) arcsin(eta), independent of q and b.
    for (double eta : {0.4, 0.2}) {
        AlignmentEventSpec spec;
        spec.b = Eigen::VectorXd::Zero(2);
        spec.b[0] = 1.0;
        spec.q = {{1, 0}};
        spec.eta = {eta};
        spec.mats = {Matrix::identity(2)};
        auto est = alignment_measure_mc(spec, 200000, 31);
        double want = 2.0 / std::numbers::pi * std::asin(eta);
        CHECK(est.lo <= want);
        CHECK(est.hi >= want);
        CHECK(est.hi - est.lo < 0.01);
    }
}

TEST_CASE("alignment measure multiplies for independent grids") {
    AlignmentEventSpec spec;
    spec.b = Eigen::VectorXd::Zero(2);
    spec.b[1] = 1.0;
    spec.q = {{1, 0}, {0, 1}};
    spec.eta = {0.5, 0.5};
    spec.mats = {Matrix::identity(2), Matrix::identity(2)};
    auto est = alignment_measure_mc(spec, 200000, 77);
    double one = 2.0 / std::numbers::pi * std::asin(0.5);
    double want = one * one;
    CHECK(est.lo <= want + 0.01);
    CHECK(est.hi >= want - 0.01);
}

TEST_CASE("alignment estimates are reproducible for a fixed seed") {
    AlignmentEventSpec spec;
    spec.b = Eigen::VectorXd::Zero(2);
    spec.b[0] = 1.0;
    spec.q = {{2, 1}};
    spec.eta = {0.3};
    spec.mats = {Matrix::identity(2)};
    auto a = alignment_measure_mc(spec, 5000, 123);
    auto b = alignment_measure_mc(spec, 5000, 123);
    CHECK(a.hits == b.hits);
    CHECK(a.p_hat == b.p_hat);
    auto c = alignment_measure_mc(spec, 5000, 124);
    CHECK(a.hits != c.hits);
}

TEST_CASE("alignment event validation catches mismatched arities") {
    AlignmentEventSpec spec;
    spec.b = Eigen::VectorXd::Zero(2);
    spec.b[0] = 1.0;
    spec.q = {{1, 0}};
    spec.eta = {0.3, 0.4};
    spec.mats = {Matrix::identity(2)};
    CHECK_THROWS_AS(spec.validate(), ValidationError);
}

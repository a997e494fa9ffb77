#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "forestlab/errors.hpp"
#include "forestlab/grid.hpp"
#include "forestlab/rng.hpp"

using namespace forestlab;

namespace {

GridSpec unit_grid(int n) {
    return GridSpec(Matrix::identity(n), Eigen::VectorXd::Zero(n));
}

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("segment query normalizes nothing and validates inputs") {
    CHECK_THROWS_AS(SegmentQuery(vec2(0, 0), vec2(0.5, 0), 0.1, 10.0),
                    ValidationError);
    CHECK_THROWS_AS(SegmentQuery(vec2(0, 0), vec2(1, 0), -0.1, 10.0),
                    ValidationError);
    CHECK_THROWS_AS(SegmentQuery(vec2(0, 0), vec2(1, 0), 0.1, 0.0),
                    ValidationError);
}

TEST_CASE("covering radius of the square lattice is half the diagonal") {
    auto cr = covering_radius(unit_grid(2));
    CHECK(cr.exact);
    CHECK(cr.value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    auto cr3 = covering_radius(unit_grid(3));
    CHECK(cr3.value == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
}

TEST_CASE("covering radius ignores the translation and scales linearly") {
    GridSpec g(Matrix(0.5 * Eigen::MatrixXd::Identity(2, 2)), vec2(0.3, -0.7));
    auto cr = covering_radius(g);
    CHECK(cr.value == doctest::Approx(0.5 * std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("enumerate_near_segment finds exactly the near cells") {
    GridSpec g = unit_grid(2);
    // Segment along the x axis from -2.05 to 2.05, radius 0.1: only the
    // integer points (z, 0) with |z| <= 2 are within reach.
    SegmentQuery q(vec2(0, 0), vec2(1, 0), 0.1, 10.0);
    auto cells = enumerate_near_segment(g, q, 2.05);
    REQUIRE(cells.size() == 5);
    for (long long z = -2; z <= 2; ++z) {
        std::vector<long long> want{z, 0};
        CHECK(std::find(cells.begin(), cells.end(), want) != cells.end());
    }
    CHECK(std::is_sorted(cells.begin(), cells.end()));
}

TEST_CASE("enumeration respects the cell budget") {
    GridSpec g = unit_grid(2);
    SegmentQuery q(vec2(0, 0), vec2(1, 0), 0.45, 1e7);
    CHECK_THROWS_AS(enumerate_near_segment(g, q, 1e6, 100),
                    EnumerationBudgetExceeded);
}

TEST_CASE("visibility hits the first ball along the ray") {
    Forest f({unit_grid(2)});
    // Anchor midway between (0,0) and (1,0), looking along x: both balls
    // are first touched at half-length 0.5 - eps.
    SegmentQuery q(vec2(0.5, 0.0), vec2(1, 0), 0.25, 50.0);
    auto out = directional_visibility(f, q);
    REQUIRE(out.hit);
    CHECK(out.half_length == doctest::Approx(0.25).epsilon(1e-9));
    REQUIRE(out.witness.has_value());
    CHECK(out.witness->grid_index == 0);
    long long cx = out.witness->coords[0];
    CHECK((cx == 0 || cx == 1));
    CHECK(out.witness->coords[1] == 0);
}

TEST_CASE("visibility from inside a ball has zero half-length") {
    Forest f({unit_grid(2)});
    SegmentQuery q(vec2(0.05, 0.0), vec2(0, 1), 0.2, 10.0);
    auto out = directional_visibility(f, q);
    REQUIRE(out.hit);
    CHECK(out.half_length == doctest::Approx(0.0));
}

TEST_CASE("visibility is blocked when no ball is reachable") {
    Forest f({unit_grid(2)});
    // Looking along x at height 0.5: every lattice point stays at distance
    // >= 0.5 from the line, so radius 0.2 can never be hit.
    SegmentQuery q(vec2(0.0, 0.5), vec2(1, 0), 0.2, 30.0);
    auto out = directional_visibility(f, q);
    CHECK_FALSE(out.hit);
    CHECK(out.half_length == doctest::Approx(30.0));
}

TEST_CASE("two offset grids block sooner than one") {
    GridSpec a = unit_grid(2);
    GridSpec b(Matrix::identity(2), vec2(0.5, 0.5));
    Forest f({a, b});
    SegmentQuery q(vec2(0.1, 0.5), vec2(1, 0), 0.25, 50.0);
    auto out = directional_visibility(f, q);
    REQUIRE(out.hit);
    REQUIRE(out.witness.has_value());
    CHECK(out.witness->grid_index == 1);
}

TEST_CASE("irrational rotation leaves long sight lines at small radius") {
    double theta = std::atan(0.37);
    Matrix rot = Matrix::rotation2d(theta);
    Forest f({GridSpec(rot, vec2(0.5, 0.5))});
    SegmentQuery q(vec2(0.0, 0.0), vec2(1, 0), 1e-4, 200.0);
    auto out = directional_visibility(f, q);
    // The rotated grid still misses a thin tube for a long while.
    CHECK_FALSE(out.hit);
}

TEST_CASE("build_unipotent writes the last column") {
    Eigen::VectorXd x(2);
    x << 0.3, -1.2;
    Matrix u = build_unipotent(x);
    REQUIRE(u.n() == 3);
    CHECK(u.numeric()(0, 2) == doctest::Approx(0.3));
    CHECK(u.numeric()(1, 2) == doctest::Approx(-1.2));
    CHECK(u.numeric()(2, 2) == doctest::Approx(1.0));
    CHECK(u.det() == doctest::Approx(1.0));
    CHECK_FALSE(u.has_exact());

    std::vector<Rational> xr{Rational(1, 2)};
    Matrix ur = build_unipotent(xr);
    REQUIRE(ur.n() == 2);
    CHECK(ur.has_exact());
    CHECK(ur.exact().at(0, 1) == Rational(1, 2));
}

TEST_CASE("axis swap rotations permute the last axis with sign fix") {
    for (int n = 2; n <= 4; ++n) {
        for (int axis = 0; axis < n; ++axis) {
            Matrix r = axis_swap_rotation(n, axis);
            Eigen::VectorXd en = Eigen::VectorXd::Zero(n);
            en[n - 1] = 1.0;
            Eigen::VectorXd image = r.numeric() * en;
            Eigen::VectorXd want = Eigen::VectorXd::Zero(n);
            want[axis] = 1.0;
            CHECK((image - want).norm() < 1e-14);
            CHECK(r.det() == doctest::Approx(1.0));
            CHECK((r.numeric().transpose() * r.numeric() -
                   Eigen::MatrixXd::Identity(n, n))
                      .norm() < 1e-14);
        }
    }
}

TEST_CASE("rotated union replicates each grid once per axis") {
    GridSpec g(Matrix::identity(3), Eigen::VectorXd::Zero(3));
    GridSpec h(Matrix::identity(3), Eigen::VectorXd::Constant(3, 0.25));
    Forest f({g, h});
    Forest u = build_rotated_union(f);
    CHECK(u.k() == 6);
    // First block is the axis-0 rotation of both grids, in input order.
    CHECK((u.grids[0].shift - axis_swap_rotation(3, 0).numeric() *
                                  g.shift).norm() < 1e-14);
    CHECK((u.grids[1].shift - axis_swap_rotation(3, 0).numeric() *
                                  h.shift).norm() < 1e-14);
    // Last block rotation is the identity.
    CHECK((u.grids[4].basis.numeric() - g.basis.numeric()).norm() < 1e-14);
}

TEST_CASE("lll reduction preserves the lattice and shortens the basis") {
    Eigen::MatrixXd b(2, 2);
    b << 1.0, 60.0, 0.0, 1.0;
    Eigen::MatrixXd r = lll_reduce(b);
    CHECK(std::abs(std::abs(r.determinant()) - 1.0) < 1e-9);
    CHECK(r.col(0).norm() <= b.col(1).norm());
    CHECK(r.col(0).norm() == doctest::Approx(1.0).epsilon(1e-9));

    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        Eigen::MatrixXd m(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                m(i, j) = std::round(rng.uniform(-30.0, 30.0));
        if (std::abs(m.determinant()) < 0.5) continue;
        Eigen::MatrixXd red = lll_reduce(m);
        CHECK(std::abs(red.determinant()) ==
              doctest::Approx(std::abs(m.determinant())).epsilon(1e-8));
        // Reduced vectors are no longer than the original worst column.
        double worst_before = 0.0, worst_after = 0.0;
        for (int j = 0; j < 3; ++j) {
            worst_before = std::max(worst_before, m.col(j).norm());
            worst_after = std::max(worst_after, red.col(j).norm());
        }
        CHECK(worst_after <= worst_before + 1e-9);
    }
}

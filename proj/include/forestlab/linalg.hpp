#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "forestlab/errors.hpp"
#include "forestlab/rational.hpp"

namespace forestlab {

// Square invertible matrix. Entries may carry an exact rational mirror, in
// which case certificates can be produced with zero residual.
class Matrix {
public:
    // Validates squareness and |det| > kDetTol * max|entry|^n at construction.
    explicit Matrix(Eigen::MatrixXd numeric);
    Matrix(Eigen::MatrixXd numeric, RationalMatrix exact);

    static Matrix identity(int n);
    static Matrix rotation2d(double angle);

    int n() const { return static_cast<int>(num_.rows()); }
    const Eigen::MatrixXd& numeric() const { return num_; }
    bool has_exact() const { return exact_.has_value(); }
    const RationalMatrix& exact() const { return *exact_; }

    Eigen::MatrixXd inverse() const { return inv_; }
    double det() const { return det_; }

    static constexpr double kDetTol = 1e-12;

private:
    void validate();
    Eigen::MatrixXd num_;
    Eigen::MatrixXd inv_;
    double det_ = 0.0;
    std::optional<RationalMatrix> exact_;
};

// Point of real projective space stored as a canonical unit representative:
// unit Euclidean norm, first nonzero coordinate positive.
class ProjectivePoint {
public:
    explicit ProjectivePoint(const Eigen::VectorXd& any_representative);
    const Eigen::VectorXd& rep() const { return rep_; }
    int n() const { return static_cast<int>(rep_.size()); }

private:
    Eigen::VectorXd rep_;
};

// Product preserving the exact mirror when both factors carry one.
Matrix matrix_product(const Matrix& lhs, const Matrix& rhs);

// Sine of the acute angle between the spanned lines. Symmetric, in [0,1],
// vanishes exactly on equal lines, and satisfies the triangle inequality.
double projective_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double projective_distance(const ProjectivePoint& x, const ProjectivePoint& y);

struct IwasawaParts {
    Eigen::MatrixXd rotation;  // special orthogonal
    Eigen::MatrixXd diagonal;  // positive diagonal entries
    Eigen::MatrixXd shear;     // unit upper triangular
};

// M = rotation * diagonal * shear. Requires det M > 0: a positive diagonal
// and unit shear force det(rotation) = sign(det M), so reflections admit no
// such factorization with a special orthogonal factor.
IwasawaParts iwasawa_decompose(const Matrix& m);

struct LipschitzReport {
    double bound;      // sigma_max / sigma_min
    double empirical;  // max observed distance expansion over sampled pairs
};

// Expansion of projective_distance under x -> Mx. The ratio of extreme
// singular values dominates every pairwise expansion factor.
LipschitzReport projective_lipschitz(const Matrix& m, int pairs, std::uint64_t seed);

// Haar-distributed special orthogonal (d+1)x(d+1) matrix: Gaussian entries,
// QR, column signs fixed by positive R diagonal, then det corrected to +1.
Eigen::MatrixXd sample_rotation(int d, std::uint64_t seed);

class Rng;

// Same distribution, drawing from a caller-owned stream; n is the ambient
// matrix dimension.
Eigen::MatrixXd haar_rotation(int n, Rng& rng);

// max_i over components of the distance from x_i to the nearest integer.
double sup_dist_to_integers(const Eigen::VectorXd& x);
double dist_to_integers(double x);

}  // namespace forestlab

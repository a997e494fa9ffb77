#include "forestlab/linalg.hpp"

#include <cmath>

#include "forestlab/rng.hpp"

namespace forestlab {

Matrix::Matrix(Eigen::MatrixXd numeric) : num_(std::move(numeric)) { validate(); }

Matrix::Matrix(Eigen::MatrixXd numeric, RationalMatrix exact)
    : num_(std::move(numeric)), exact_(std::move(exact)) {
    if (exact_->n != num_.rows())
        throw ValidationError("exact mirror has wrong size");
    for (int i = 0; i < exact_->n; ++i)
        for (int j = 0; j < exact_->n; ++j) {
            double e = to_double(exact_->at(i, j));
            if (std::abs(e - num_(i, j)) > 1e-9 * std::max(1.0, std::abs(e)))
                throw ValidationError("exact mirror disagrees with numeric entries");
        }
    validate();
}

void Matrix::validate() {
    if (num_.rows() != num_.cols() || num_.rows() == 0)
        throw ValidationError("matrix must be square and nonempty");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(num_);
    det_ = lu.determinant();
    double scale = num_.cwiseAbs().maxCoeff();
    double floor = kDetTol * std::pow(std::max(scale, 1e-300), num_.rows());
    if (!(std::abs(det_) > floor))
        throw SingularMatrix("matrix is singular within tolerance");
    inv_ = lu.inverse();
}

Matrix Matrix::identity(int n) {
    return Matrix(Eigen::MatrixXd::Identity(n, n), RationalMatrix::identity(n));
}

Matrix Matrix::rotation2d(double angle) {
    Eigen::MatrixXd r(2, 2);
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return Matrix(r);
}

Matrix matrix_product(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.n() != rhs.n()) throw ValidationError("size mismatch in matrix product");
    Eigen::MatrixXd num = lhs.numeric() * rhs.numeric();
    if (lhs.has_exact() && rhs.has_exact())
        return Matrix(num, lhs.exact().multiply(rhs.exact()));
    return Matrix(num);
}

ProjectivePoint::ProjectivePoint(const Eigen::VectorXd& any_representative) {
    double norm = any_representative.norm();
    if (!(norm > 1e-300))
        throw ValidationError("zero vector has no projective class");
    rep_ = any_representative / norm;
    for (int i = 0; i < rep_.size(); ++i) {
        if (rep_[i] == 0.0) continue;
        if (rep_[i] < 0.0) rep_ = -rep_;
        break;
    }
}

double projective_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double nx = x.norm(), ny = y.norm();
    if (!(nx > 1e-300) || !(ny > 1e-300))
        throw ValidationError("zero vector has no projective class");
    Eigen::VectorXd xh = x / nx, yh = y / ny;
    double c = xh.dot(yh);
    // Norm of the rejection equals |sin| of the angle; stable near zero where
    // sqrt(1 - c^2) loses half the digits.
    double s = (xh - c * yh).norm();
    return std::min(s, 1.0);
}

double projective_distance(const ProjectivePoint& x, const ProjectivePoint& y) {
    return projective_distance(x.rep(), y.rep());
}

IwasawaParts iwasawa_decompose(const Matrix& m) {
    if (m.det() < 0)
        throw ValidationError(
            "negative determinant: positive diagonal and unit shear force the "
            "orthogonal factor to carry the reflection");
    int n = m.n();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.numeric());
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (r(i, i) < 0) {
            r.row(i) = -r.row(i);
            q.col(i) = -q.col(i);
        }
    }
    IwasawaParts parts;
    parts.rotation = q;
    parts.diagonal = Eigen::MatrixXd::Zero(n, n);
    parts.shear = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        parts.diagonal(i, i) = r(i, i);
        for (int j = i + 1; j < n; ++j) parts.shear(i, j) = r(i, j) / r(i, i);
    }
    return parts;
}

LipschitzReport projective_lipschitz(const Matrix& m, int pairs, std::uint64_t seed) {
    if (pairs <= 0) throw ValidationError("pair count must be positive");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.numeric());
    const auto& sv = svd.singularValues();
    LipschitzReport rep;
    rep.bound = sv(0) / sv(sv.size() - 1);
    rep.empirical = 0.0;
    Rng rng(seed);
    int n = m.n();
    // Mix far-apart pairs with perturbation pairs at shrinking scales; the
    // expansion factor is typically attained in the small-angle limit.
    const double scales[] = {1.0, 1e-1, 1e-3, 1e-6};
    for (int t = 0; t < pairs; ++t) {
        Eigen::VectorXd x = rng.unit_vector(n);
        double sc = scales[t % 4];
        Eigen::VectorXd y = (sc >= 1.0) ? rng.unit_vector(n)
                                        : (x + sc * rng.unit_vector(n)).eval();
        double base = projective_distance(x, y);
        if (base < 1e-13) continue;
        double mapped = projective_distance(m.numeric() * x, m.numeric() * y);
        rep.empirical = std::max(rep.empirical, mapped / base);
    }
    return rep;
}

Eigen::MatrixXd haar_rotation(int n, Rng& rng) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR();
    // Positive diagonal of the triangular factor makes QR unique, which turns
    // the Gaussian measure into the invariant one on the orthogonal group.
    for (int i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    // Fold the reflection component onto the rotation component.
    if (q.determinant() < 0) q.col(n - 1) = -q.col(n - 1);
    return q;
}

Eigen::MatrixXd sample_rotation(int d, std::uint64_t seed) {
    if (d < 1) throw UnsupportedDimension("sphere dimension must be >= 1");
    Rng rng(seed);
    return haar_rotation(d + 1, rng);
}

double dist_to_integers(double x) {
    return std::abs(x - std::round(x));
}

double sup_dist_to_integers(const Eigen::VectorXd& x) {
    double best = 0.0;
    for (int i = 0; i < x.size(); ++i)
        best = std::max(best, dist_to_integers(x[i]));
    return best;
}

}  // namespace forestlab

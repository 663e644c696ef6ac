#include "witness/unitary.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

#include "witness/error.hpp"

namespace witness {

double unitarity_residual(const ComplexMatrix& u) {
  const auto n = u.rows();
  return (u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm();
}

InterferometerMatrix::InterferometerMatrix(ComplexMatrix entries, double tolerance)
    : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    std::ostringstream msg;
    msg << "invalid dimension: transfer matrix must be square and non-empty, got "
        << entries_.rows() << "x" << entries_.cols();
    throw InvalidArgument(msg.str());
  }
  const double residual = unitarity_residual(entries_);
  if (!(residual < tolerance)) {
    std::ostringstream msg;
    msg << "matrix is not unitary: ||U^dagger U - I||_F = " << residual;
    throw PreconditionViolation(msg.str());
  }
}

InterferometerMatrix InterferometerMatrix::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return InterferometerMatrix(ComplexMatrix::Identity(n, n));
}

RowPair::RowPair(ComplexVector row_a, ComplexVector row_b, double tolerance)
    : row_a_(std::move(row_a)), row_b_(std::move(row_b)) {
  if (row_a_.size() == 0 || row_a_.size() != row_b_.size()) {
    throw InvalidArgument("row pair must hold two non-empty rows of equal length");
  }
  const double norm_a = row_a_.norm();
  const double norm_b = row_b_.norm();
  const Complex overlap = row_a_.dot(row_b_);
  if (std::abs(norm_a - 1.0) > tolerance || std::abs(norm_b - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "rows are not normalized: |a| = " << norm_a << ", |b| = " << norm_b;
    throw PreconditionViolation(msg.str());
  }
  if (std::abs(overlap) > tolerance) {
    std::ostringstream msg;
    msg << "rows are not orthogonal: <a|b> = " << overlap;
    throw PreconditionViolation(msg.str());
  }
}

InterferometerMatrix haar_random(std::size_t dim, Rng& rng) {
  if (dim == 0) throw InvalidArgument("invalid dimension: haar_random requires dim >= 1");
  const auto n = static_cast<Eigen::Index>(dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix ginibre(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      ginibre(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double mag = std::abs(d);
    q.col(k) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return InterferometerMatrix(std::move(q));
}

InterferometerMatrix haar_random(std::size_t dim, Seed seed) {
  Rng rng = make_rng(seed);
  return haar_random(dim, rng);
}

RowPair u_max_rows(std::size_t photons) {
  if (photons < 2) throw InvalidArgument("invalid photon count: u_max requires n >= 2");
  const auto n = static_cast<Eigen::Index>(photons);
  const double bulk = 1.0 / std::sqrt(2.0 * static_cast<double>(photons));
  const double last = 1.0 / std::sqrt(2.0);
  ComplexVector a = ComplexVector::Constant(n + 1, Complex(bulk, 0.0));
  ComplexVector b = a;
  a(n) = Complex(last, 0.0);
  b(n) = Complex(-last, 0.0);
  return RowPair(std::move(a), std::move(b));
}

InterferometerMatrix u_max(std::size_t photons) {
  return complete_to_unitary(u_max_rows(photons), 0x5EED0F0A11ULL);
}

InterferometerMatrix complete_to_unitary(const RowPair& rows, Seed seed) {
  const auto n = static_cast<Eigen::Index>(rows.dim());
  if (n < 2) throw InvalidArgument("invalid dimension: completion needs N >= 2");
  ComplexMatrix u(n, n);
  u.row(0) = rows.row_a().transpose();
  u.row(1) = rows.row_b().transpose();

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index filled = 2;
  while (filled < n) {
    Eigen::RowVectorXcd v(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double re = normal(rng);
      const double im = normal(rng);
      v(k) = Complex(re, im);
    }
    // Two passes of modified Gram-Schmidt keep the completion orthogonal to
    // working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index r = 0; r < filled; ++r) {
        const Complex proj = (u.row(r).conjugate().cwiseProduct(v)).sum();
        v -= proj * u.row(r);
      }
    }
    const double norm = v.norm();
    if (norm < 1e-6) continue;  // fill vector was nearly in the span; redraw
    u.row(filled++) = v / norm;
  }
  return InterferometerMatrix(std::move(u));
}

double fidelity(const InterferometerMatrix& u, const InterferometerMatrix& v) {
  if (u.dim() != v.dim()) {
    std::ostringstream msg;
    msg << "dimension mismatch in fidelity: " << u.dim() << " vs " << v.dim();
    throw InvalidArgument(msg.str());
  }
  const Complex trace = (u.entries().adjoint() * v.entries()).trace();
  return std::min(1.0, std::abs(trace) / static_cast<double>(u.dim()));
}

}  // namespace witness

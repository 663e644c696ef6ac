#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "witness/random.hpp"

namespace witness {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Frobenius-norm tolerance on U^dagger U - I accepted for a transfer matrix.
inline constexpr double kUnitarityTolerance = 1e-10;

/// Norm / inner-product tolerance for the two specified rows of a RowPair.
inline constexpr double kRowTolerance = 1e-12;

/// ||U^dagger U - I||_F.
double unitarity_residual(const ComplexMatrix& u);

/// Square unitary transfer matrix of a linear-optical network. Entry (i, k)
/// is the amplitude for a photon entering mode k to leave in mode i.
class InterferometerMatrix {
 public:
  /// Validates squareness and unitarity (kUnitarityTolerance by default).
  explicit InterferometerMatrix(ComplexMatrix entries, double tolerance = kUnitarityTolerance);

  static InterferometerMatrix identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return entries_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

 private:
  ComplexMatrix entries_;
};

/// Two orthonormal rows of an N x N unitary; the only rows a two-mode
/// correlator between output modes a and b depends on.
class RowPair {
 public:
  RowPair(ComplexVector row_a, ComplexVector row_b, double tolerance = kRowTolerance);

  std::size_t dim() const { return static_cast<std::size_t>(row_a_.size()); }
  const ComplexVector& row_a() const { return row_a_; }
  const ComplexVector& row_b() const { return row_b_; }

 private:
  ComplexVector row_a_;
  ComplexVector row_b_;
};

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// diagonal of R normalized to positive reals. Deterministic in `seed`.
InterferometerMatrix haar_random(std::size_t dim, Seed seed);
InterferometerMatrix haar_random(std::size_t dim, Rng& rng);

/// First two rows of the (n+1)-mode interferometer that maximizes the
/// correlator between modes 0 and 1 for n indistinguishable photons:
///   row 0 = (1/sqrt(2n), ..., 1/sqrt(2n),  1/sqrt(2))
///   row 1 = (1/sqrt(2n), ..., 1/sqrt(2n), -1/sqrt(2))
RowPair u_max_rows(std::size_t photons);

/// u_max_rows(photons) completed to a full unitary (fixed completion seed).
InterferometerMatrix u_max(std::size_t photons);

/// Completes two orthonormal rows to a unitary. The rows are copied verbatim;
/// rows 2..N-1 come from Gram-Schmidt on seeded random complex vectors.
InterferometerMatrix complete_to_unitary(const RowPair& rows, Seed seed);

/// |Tr(U^dagger V)| / N. Symmetric and insensitive to global phases.
double fidelity(const InterferometerMatrix& u, const InterferometerMatrix& v);

}  // namespace witness

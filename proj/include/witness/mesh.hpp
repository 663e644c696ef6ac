#pragma once

#include <cstddef>
#include <vector>

#include "witness/random.hpp"
#include "witness/unitary.hpp"

namespace witness {

/// One Mach-Zehnder unit cell acting on adjacent modes (mode, mode + 1).
///
/// Light first picks up phase `phi` on the upper input arm, crosses a 50:50
/// coupler B = [[1, i], [i, 1]] / sqrt(2), picks up the internal phase
/// `theta` on the upper arm and crosses a second coupler:
///
///   T(theta, phi) = B diag(e^{i theta}, 1) B diag(e^{i phi}, 1)
///                 = i e^{i theta/2} [[e^{i phi} sin(theta/2),  cos(theta/2)],
///                                    [e^{i phi} cos(theta/2), -sin(theta/2)]]
///
/// theta = 0 swaps the two modes, theta = pi with phi = pi is the identity
/// and theta = pi/2 is a balanced splitter.
struct MeshCell {
  int layer = 0;
  std::size_t mode = 0;  ///< upper mode; the cell couples (mode, mode + 1)
  double theta = 0.0;    ///< canonical range [0, pi]
  double phi = 0.0;      ///< canonical range [0, 2 pi)
};

/// 2x2 transfer matrix of a cell.
Eigen::Matrix2cd cell_transfer(double theta, double phi);

/// Rectangular mesh program: cells in propagation order followed by a
/// diagonal of output phases.
struct MeshProgram {
  std::size_t dim = 0;
  std::vector<MeshCell> cells;
  std::vector<double> output_phases;
};

/// Clements-style rectangular decomposition into N(N-1)/2 cells.
MeshProgram decompose(const InterferometerMatrix& u);

/// diag(e^{i output_phases}) * T_last * ... * T_first.
InterferometerMatrix reconstruct(const MeshProgram& program);

/// Brings every cell into theta in [0, pi], phi in [0, 2 pi) without
/// changing the implemented unitary; leftover phases are pushed through the
/// mesh into the output phases.
MeshProgram canonicalize(MeshProgram program);

/// Adds i.i.d. N(0, sigma^2) noise to every theta and phi, then
/// canonicalizes. Deterministic in `seed`.
MeshProgram perturb_phases(const MeshProgram& program, double sigma, Seed seed);

/// Noise magnitude at which the Monte-Carlo mean fidelity of `trials` noisy
/// realizations of decompose(u) matches target_fidelity within 0.002.
/// Realization r always uses substream derive_seed(seed, r), so the mean
/// fidelity is a smooth function of sigma and bisection is well defined.
double calibrate_noise_to_fidelity(const InterferometerMatrix& u, double target_fidelity, std::size_t trials,
                                   Seed seed);

/// Mean fidelity between reconstruct(perturb_phases(program, sigma, .)) and
/// the clean program over `trials` realizations.
double mean_noisy_fidelity(const MeshProgram& program, double sigma, std::size_t trials, Seed seed);

}  // namespace witness

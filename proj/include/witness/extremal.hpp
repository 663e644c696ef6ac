#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "witness/interference.hpp"
#include "witness/random.hpp"
#include "witness/unitary.hpp"

namespace witness {

/// Outcome of a multi-start search over the first two rows of an
/// interferometer. The value is numerical evidence, not a proof of
/// optimality.
struct SearchResult {
  double best_value = 0.0;
  RowPair best_rows;
  std::size_t restarts_used = 0;
  /// True when the winning restart stopped on its convergence test rather
  /// than the iteration cap.
  bool converged = false;
  std::size_t best_restart = 0;
  /// Final objective value of every restart, indexed by restart.
  std::vector<double> restart_values;
};

struct SearchOptions {
  std::size_t restarts = 200;
  Seed seed = 0;
  /// Interferometer dimension; 0 picks the default (n + 1 for the
  /// indistinguishable search).
  std::size_t modes = 0;
  std::size_t max_iterations = 3000;
  unsigned threads = 1;
};

/// Maximizes the distinguishable-photon correlator
///   -sum_k |U_0k|^2 |U_1k|^2   (k over the photon-carrying columns)
/// over orthonormal row pairs of an N-mode network. Photons occupy the first
/// min(n, N) input modes.
SearchResult max_correlator_distinguishable(std::size_t modes, std::size_t photons, const SearchOptions& options);

/// Maximizes the correlator between output modes 0 and 1 for n fully
/// indistinguishable photons in the first n modes. Default dimension n + 1;
/// options.modes may raise it to n + 3.
SearchResult max_correlator_indistinguishable(std::size_t photons, const SearchOptions& options);

/// Largest deviation of a row pair's magnitude profile from the u_max
/// pattern: each of the first n columns at 1/sqrt(2n) and the remaining
/// columns carrying total weight 1/2, per row. Invariant under per-entry
/// phases and permutations within the photon columns.
double umax_profile_deviation(const RowPair& rows, std::size_t photons);

/// c_classical = 0 and c_quantum = 1/4 - 1/(2n), plus the gap to n + 1.
WitnessThresholds thresholds(std::size_t photons);

/// Generic multi-start ascent on orthonormal row pairs; exposed for tests.
SearchResult maximize_row_objective(std::size_t modes,
                                    const std::function<double(const ComplexVector&, const ComplexVector&)>& objective,
                                    const SearchOptions& options);

}  // namespace witness

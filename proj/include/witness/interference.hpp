#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "witness/unitary.hpp"

namespace witness {

/// Gram matrix S_kl = <psi_k|psi_l> of the photons' internal states.
/// Hermitian, unit diagonal, positive semidefinite. Only |S_kl| enters the
/// two-mode correlator, but the full matrix drives the output distribution.
class DistinguishabilityGram {
 public:
  explicit DistinguishabilityGram(ComplexMatrix entries);

  static DistinguishabilityGram identity(std::size_t photons);
  static DistinguishabilityGram ones(std::size_t photons);

  std::size_t photons() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& entries() const { return entries_; }
  Complex operator()(std::size_t k, std::size_t l) const {
    return entries_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  }
  /// x_kl^2 = |S_kl|^2.
  double overlap_sq(std::size_t k, std::size_t l) const { return std::norm((*this)(k, l)); }
  /// Mean of |S_kl|^2 over ordered pairs k != l (0 for a single photon).
  double mean_overlap_sq() const;
  /// Sum of |S_kl|^2 over ordered pairs k != l.
  double offdiagonal_overlap_sq_sum() const;

 private:
  ComplexMatrix entries_;
};

/// Photon numbers per output mode.
using OccupationPattern = std::vector<int>;

/// Exact distribution of output occupation patterns for n photons in N modes.
/// Patterns are kept in lexicographic order.
class OutputDistribution {
 public:
  OutputDistribution(std::size_t photons, std::size_t modes,
                     std::map<OccupationPattern, double> probabilities);

  std::size_t photons() const { return photons_; }
  std::size_t modes() const { return modes_; }
  const std::map<OccupationPattern, double>& probabilities() const { return probabilities_; }
  double probability(const OccupationPattern& pattern) const;

  /// <n_i>.
  double mean_occupation(std::size_t mode) const;

 private:
  std::size_t photons_;
  std::size_t modes_;
  std::map<OccupationPattern, double> probabilities_;
};

/// Classical and quantum witness thresholds for n photons.
struct WitnessThresholds {
  double c_classical = 0.0;
  double c_quantum = 0.0;
  /// c_quantum(n + 1) - c_quantum(n): precision needed to separate n from
  /// n + 1 indistinguishable photons.
  double certification_gap = 0.0;
};

/// Largest photon number accepted by output_distribution ((n!)^2 terms per
/// pattern).
inline constexpr std::size_t kMaxBruteForcePhotons = 6;

/// All off-diagonal entries equal to sqrt(xbar_sq).
DistinguishabilityGram gram_uniform(std::size_t photons, double xbar_sq);

/// Three photons from two pair sources: photons 0 and 1 share a crystal
/// (overlap^2 = signal_idler), photon 2 comes from the other crystal
/// (overlap^2 = signal_signal with both).
DistinguishabilityGram gram_source(double signal_idler_sq, double signal_signal_sq);

/// Gaussian temporal-overlap kernel S_kl = exp(-(t_k - t_l)^2 / (2 tau^2)).
DistinguishabilityGram gram_from_delays(std::span<const double> delays, double coherence_time);

/// Element-wise product of two Gram matrices (internal states that factor
/// into independent degrees of freedom). PSD by the Schur product theorem.
DistinguishabilityGram gram_product(const DistinguishabilityGram& a, const DistinguishabilityGram& b);

/// Modes 0..n-1, the standard boson-sampling injection.
std::vector<std::size_t> first_modes(std::size_t photons);

/// Brute-force Fock-basis distribution for one photon in each listed input
/// mode:
///   P(m) = 1/prod(m_j!) * sum_{sigma,tau} prod_j U[d_j, in_sigma(j)]
///          * conj(U[d_j, in_tau(j)]) * S[tau(j), sigma(j)]
/// where d lists the occupied output modes of m with multiplicity.
OutputDistribution output_distribution(const InterferometerMatrix& u, const DistinguishabilityGram& s,
                                       std::span<const std::size_t> input_modes);

/// <n_i n_j> - <n_i><n_j> evaluated on an exact distribution.
double correlator_from_distribution(const OutputDistribution& dist, std::size_t i, std::size_t j);

/// Closed-form two-mode correlator:
///   C_ij = -sum_k |U_ik|^2 |U_jk|^2
///          + sum_{k != l} |S_kl|^2 U_ik U_jl conj(U_il) conj(U_jk)
/// with k, l running over the photons (columns = their input modes).
double correlator_analytic(const InterferometerMatrix& u, const DistinguishabilityGram& s, std::size_t i,
                           std::size_t j, std::span<const std::size_t> input_modes);

/// Same as correlator_analytic but on bare rows; used by the extremal search.
double correlator_rows(const ComplexVector& row_i, const ComplexVector& row_j, const DistinguishabilityGram& s,
                       std::span<const std::size_t> input_modes);

/// Correlator between modes 0 and 1 of u_max(n):
///   (-n + sum_{i != j} |S_ij|^2) / (4 n^2).
double correlator_umax_closed_form(std::size_t photons, const DistinguishabilityGram& s);

/// Probability that at least one photon lands in mode i or mode j.
double contribution_probability(const InterferometerMatrix& u, const DistinguishabilityGram& s, std::size_t i,
                                std::size_t j, std::span<const std::size_t> input_modes);

}  // namespace witness

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "witness/interference.hpp"
#include "witness/random.hpp"

namespace witness {

/// Pseudo-number-resolving detector on one output mode: the mode is split
/// over three threshold sub-detectors.
struct ModeDetector {
  std::array<double, 3> ratios{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double efficiency = 1.0;  ///< relative to the best mode, in (0, 1]
};

class DetectorBank {
 public:
  DetectorBank(std::vector<ModeDetector> modes, double transmission, double dark_count_probability = 0.0);

  /// Lossless bank with balanced splitters.
  static DetectorBank ideal(std::size_t modes);
  static DetectorBank uniform(std::size_t modes, double transmission);

  std::size_t modes() const { return modes_.size(); }
  const ModeDetector& mode(std::size_t m) const { return modes_.at(m); }
  const std::vector<ModeDetector>& mode_detectors() const { return modes_; }
  /// Per-photon survival probability through the optics, common to all modes.
  double transmission() const { return transmission_; }
  /// Per-trial click probability of each sub-detector without a photon.
  double dark_count_probability() const { return dark_count_probability_; }

 private:
  std::vector<ModeDetector> modes_;
  double transmission_;
  double dark_count_probability_;
};

/// Postselected detection record of one measurement run.
struct CountsTable {
  std::size_t photons = 0;
  std::size_t modes = 0;
  double integration_time = 0.0;
  std::uint64_t total_trials = 0;
  std::map<OccupationPattern, std::uint64_t> events;

  std::uint64_t n_events() const;
};

struct CorrelatorEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_events = 0;
};

struct BootstrapOptions {
  std::size_t resamples = 1000;
  Seed seed = 0;
  /// When set, each detected pattern is weighted by the inverse of its
  /// postselection acceptance under this (calibrated) bank. Without it the
  /// estimator sees bunched patterns at the rate the pseudo-number-resolving
  /// detectors let them through.
  std::optional<DetectorBank> acceptance_correction;
};

/// Draws Poisson(rate * time) heralded trials. Each trial samples a true
/// pattern from `dist`, loses each photon with probability
/// 1 - transmission * efficiency, routes survivors onto sub-detectors and
/// counts clicks per mode. Only trials whose click total equals the photon
/// number are kept. Trials are split into fixed blocks with their own
/// substreams, so the table does not depend on `threads`.
CountsTable simulate_counts(const OutputDistribution& dist, const DetectorBank& bank, double event_rate,
                            double integration_time, Seed seed, unsigned threads = 1);

/// Exact probability that a trial survives postselection (no dark counts).
double postselection_probability(const OutputDistribution& dist, const DetectorBank& bank);

/// Probability that a trial with true pattern `pattern` is kept, up to the
/// pattern-independent factor transmission^n:
///   prod_m efficiency_m^{k_m} * P(k_m photons hit distinct sub-detectors).
double pattern_acceptance(const OccupationPattern& pattern, const DetectorBank& bank);

/// Draws `events` patterns straight from the distribution (ideal detection).
CountsTable sample_events(const OutputDistribution& dist, std::uint64_t events, Seed seed);

/// Empirical <n_i n_j> - <n_i><n_j> over postselected events, with a
/// nonparametric bootstrap standard error (multinomial resampling of the
/// event list).
CorrelatorEstimate estimate_correlator(const CountsTable& counts, std::size_t i, std::size_t j,
                                       const BootstrapOptions& options = {});

/// Click counts on the three sub-detectors of each output mode, recorded
/// while single photons are sent to every output mode in turn.
using ReferenceCounts = std::vector<std::array<std::uint64_t, 3>>;

/// Single-photon reference run through a known bank: `photons_per_mode`
/// photons are sent to each output mode.
ReferenceCounts simulate_reference_counts(const DetectorBank& bank, std::uint64_t photons_per_mode, Seed seed);

/// Splitting ratios from each mode's click shares; mode efficiencies from
/// total clicks relative to the brightest mode.
DetectorBank calibrate_bank(const ReferenceCounts& reference, double transmission = 1.0);

}  // namespace witness

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "witness/detector.hpp"
#include "witness/extremal.hpp"
#include "witness/interference.hpp"
#include "witness/io.hpp"

namespace witness {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ExperimentKind { kHaarSweep, kDelayScan, kNoiseSweep, kExtremal, kCertify };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

enum class GramKind { kUniform, kSource, kIdentity, kOnes };

/// How the photons' Gram matrix is built.
struct GramSpec {
  GramKind kind = GramKind::kUniform;
  double xbar_sq = 0.81;
  double signal_idler_sq = 0.93;
  double signal_signal_sq = 0.78;

  DistinguishabilityGram build(std::size_t photons) const;
};

struct DetectorSpec {
  double transmission = 0.57;
  double dark_count_probability = 0.0;
  /// Per-mode splitting ratios; empty means balanced splitters everywhere.
  std::vector<std::array<double, 3>> ratios;
  std::vector<double> efficiencies;

  DetectorBank build(std::size_t modes) const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kHaarSweep;
  std::size_t photons = 3;
  std::size_t modes = 4;
  GramSpec gram;

  // Haar sweep
  std::size_t matrices = 500;
  bool include_umax = false;

  // Counting statistics
  std::uint64_t events_per_matrix = 10000;  ///< target postselected events
  double event_rate = 250.0;                ///< heralded trials per second
  DetectorSpec detector;
  std::size_t bootstrap_resamples = 1000;
  double significance = 5.0;
  /// Reweight detected patterns by their acceptance under a bank recovered
  /// from a simulated single-photon calibration run.
  bool correct_acceptance = true;
  std::uint64_t calibration_photons = 1000000;  ///< per output mode

  // Delay scan
  std::vector<double> delays;
  double coherence_time = 1.0;
  std::size_t delayed_photon = 2;

  // Noise sweep
  std::vector<double> fidelities;
  std::size_t realizations = 100;
  std::size_t calibration_trials = 200;
  std::uint64_t events_per_realization = 0;  ///< 0 skips count simulation

  // Extremal search
  bool indistinguishable = true;
  std::size_t restarts = 200;

  // Certification
  double value = 0.0;
  double std_error = 0.0;

  std::size_t histogram_bins = 40;
  Seed seed = 1;
  unsigned threads = 1;
};

/// Parses and validates a JSON config. Throws ConfigError on any problem.
ExperimentConfig parse_config(const Json& j);
Json config_to_json(const ExperimentConfig& config);
/// Checks cross-field constraints; parse_config calls this.
void validate_config(const ExperimentConfig& config);

struct CertificationReport {
  CorrelatorEstimate estimate;
  double threshold = 0.0;
  double z_score = 0.0;
  bool certified = false;
  std::string matrix_id;
  std::size_t mode_i = 0;
  std::size_t mode_j = 1;
};

/// z = value / std_error against the classical threshold 0, which holds for
/// every interferometer. Throws StatisticalError when std_error is 0.
CertificationReport certify(const CorrelatorEstimate& estimate, double significance);

/// Like certify, but an estimate without spread is reported as not
/// certified (z = 0) instead of raising.
CertificationReport certify_or_reject(const CorrelatorEstimate& estimate, double significance);

struct HaarSweepRow {
  std::string matrix_id;
  std::size_t i = 0, j = 0;
  double c_exact = 0.0;
  CertificationReport report;
};

struct DelayScanRow {
  double delay = 0.0;
  double xbar_sq = 0.0;
  double c_exact = 0.0;
  double c_closed_form = 0.0;
  std::optional<CertificationReport> report;
};

struct NoiseSweepRow {
  double target_fidelity = 1.0;
  double sigma = 0.0;
  double mean_fidelity = 1.0;
  double c_mean = 0.0;
  double c_std = 0.0;
  std::size_t realizations = 0;
  std::size_t certified = 0;
  double max_z = 0.0;
};

/// Bank recovered by calibrate_bank from a simulated reference run of the
/// configured detectors; nullopt when correct_acceptance is off.
std::optional<DetectorBank> calibrated_bank(const ExperimentConfig& config, std::size_t modes);

/// Integration time giving `events` postselected events on average.
double integration_time_for(const OutputDistribution& dist, const DetectorBank& bank, double event_rate,
                            std::uint64_t events);

std::vector<HaarSweepRow> run_haar_sweep(const ExperimentConfig& config);
std::vector<DelayScanRow> run_delay_scan(const ExperimentConfig& config);
std::vector<NoiseSweepRow> run_noise_sweep(const ExperimentConfig& config);
SearchResult run_extremal(const ExperimentConfig& config);

/// Simulates counts for (u, s) and certifies the (i, j) correlator.
CertificationReport measure_and_certify(const InterferometerMatrix& u, const DistinguishabilityGram& s,
                                        std::size_t i, std::size_t j, const ExperimentConfig& config, Seed seed);

void write_haar_sweep_csv(std::ostream& out, const std::vector<HaarSweepRow>& rows);
void write_histogram_csv(std::ostream& out, const std::vector<HaarSweepRow>& rows, std::size_t bins);
void write_delay_scan_csv(std::ostream& out, const std::vector<DelayScanRow>& rows);
void write_noise_sweep_csv(std::ostream& out, const std::vector<NoiseSweepRow>& rows);
Json search_result_to_json(const SearchResult& result, const ExperimentConfig& config);
Json report_to_json(const CertificationReport& report);

/// Runs the configured experiment and writes manifest.json, results.csv (or
/// results.json) and figure.svg into `out_dir`.
void run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace witness

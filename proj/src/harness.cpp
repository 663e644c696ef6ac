#include "witness/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "witness/error.hpp"
#include "witness/mesh.hpp"
#include "witness/parallel.hpp"
#include "witness/svg_plot.hpp"

namespace witness {
namespace {

// Substream tags under the master seed.
enum Stream : std::uint64_t {
  kMatrixStream = 1,
  kCountsStream = 2,
  kBootstrapStream = 3,
  kUmaxStream = 4,
  kDelayStream = 5,
  kCalibrationStream = 6,
  kNoiseStream = 7,
  kNoiseCountsStream = 8,
  kSearchStream = 9,
  kReferenceStream = 10,
};

Seed stream_seed(Seed master, Stream stream, std::uint64_t item) { return derive_seed(derive_seed(master, stream), item); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError("config: " + what); }

GramKind parse_gram_kind(const std::string& name) {
  if (name == "uniform") return GramKind::kUniform;
  if (name == "source") return GramKind::kSource;
  if (name == "identity" || name == "distinguishable") return GramKind::kIdentity;
  if (name == "ones" || name == "indistinguishable") return GramKind::kOnes;
  config_fail("unknown gram kind '" + name + "'");
}

std::string gram_kind_name(GramKind kind) {
  switch (kind) {
    case GramKind::kUniform: return "uniform";
    case GramKind::kSource: return "source";
    case GramKind::kIdentity: return "identity";
    case GramKind::kOnes: return "ones";
  }
  return "uniform";
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_fail(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) config_fail("unknown key '" + item.key() + "' in " + where);
  }
}

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::vector<std::pair<std::size_t, std::size_t>> mode_pairs(std::size_t modes) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < modes; ++i) {
    for (std::size_t j = i + 1; j < modes; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

ExperimentConfig with_events(ExperimentConfig config, std::uint64_t events) {
  config.events_per_matrix = events;
  return config;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kHaarSweep: return "haar-sweep";
    case ExperimentKind::kDelayScan: return "delay-scan";
    case ExperimentKind::kNoiseSweep: return "noise-sweep";
    case ExperimentKind::kExtremal: return "extremal";
    case ExperimentKind::kCertify: return "certify";
  }
  return "haar-sweep";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto kind : {ExperimentKind::kHaarSweep, ExperimentKind::kDelayScan, ExperimentKind::kNoiseSweep,
                    ExperimentKind::kExtremal, ExperimentKind::kCertify}) {
    if (to_string(kind) == name) return kind;
  }
  config_fail("unknown experiment '" + name + "'");
}

DistinguishabilityGram GramSpec::build(std::size_t photons) const {
  switch (kind) {
    case GramKind::kUniform: return gram_uniform(photons, xbar_sq);
    case GramKind::kSource: return gram_source(signal_idler_sq, signal_signal_sq);
    case GramKind::kIdentity: return DistinguishabilityGram::identity(photons);
    case GramKind::kOnes: return DistinguishabilityGram::ones(photons);
  }
  return DistinguishabilityGram::identity(photons);
}

DetectorBank DetectorSpec::build(std::size_t modes) const {
  std::vector<ModeDetector> detectors(modes);
  for (std::size_t m = 0; m < modes; ++m) {
    if (!ratios.empty()) detectors[m].ratios = ratios.at(m);
    if (!efficiencies.empty()) detectors[m].efficiency = efficiencies.at(m);
  }
  return DetectorBank(std::move(detectors), transmission, dark_count_probability);
}

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"experiment", "regime", "photons", "modes", "gram", "matrices", "include_umax", "events_per_matrix",
                "event_rate", "detector", "bootstrap_resamples", "significance", "correct_acceptance",
                "calibration_photons", "delay_scan", "noise_sweep",
                "extremal", "certify", "histogram_bins", "seed", "threads"},
               "config");
    if (!j.contains("experiment")) config_fail("missing 'experiment'");
    c.kind = parse_experiment_kind(j.at("experiment").get<std::string>());

    if (j.contains("regime")) {
      const auto regime = j.at("regime").get<std::string>();
      if (regime == "two-indistinguishable") {
        c.photons = 2;
        c.gram.kind = GramKind::kOnes;
      } else if (regime == "three-distinguishable") {
        c.photons = 3;
        c.gram.kind = GramKind::kIdentity;
      } else if (regime == "three-partial") {
        c.photons = 3;
        c.gram.kind = GramKind::kUniform;
      } else {
        config_fail("unknown regime '" + regime + "'");
      }
    }
    c.photons = j.value("photons", c.photons);
    c.modes = j.value("modes", c.modes);
    if (j.contains("gram")) {
      const Json& g = j.at("gram");
      check_keys(g, {"kind", "xbar_sq", "signal_idler", "signal_signal"}, "gram");
      if (g.contains("kind")) c.gram.kind = parse_gram_kind(g.at("kind").get<std::string>());
      c.gram.xbar_sq = g.value("xbar_sq", c.gram.xbar_sq);
      c.gram.signal_idler_sq = g.value("signal_idler", c.gram.signal_idler_sq);
      c.gram.signal_signal_sq = g.value("signal_signal", c.gram.signal_signal_sq);
    }
    c.matrices = j.value("matrices", c.matrices);
    c.include_umax = j.value("include_umax", c.include_umax);
    c.events_per_matrix = j.value("events_per_matrix", c.events_per_matrix);
    c.event_rate = j.value("event_rate", c.event_rate);
    if (j.contains("detector")) {
      const Json& d = j.at("detector");
      check_keys(d, {"transmission", "dark_count_probability", "ratios", "efficiencies"}, "detector");
      c.detector.transmission = d.value("transmission", c.detector.transmission);
      c.detector.dark_count_probability = d.value("dark_count_probability", c.detector.dark_count_probability);
      if (d.contains("ratios")) c.detector.ratios = d.at("ratios").get<std::vector<std::array<double, 3>>>();
      if (d.contains("efficiencies")) c.detector.efficiencies = d.at("efficiencies").get<std::vector<double>>();
    }
    c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
    c.significance = j.value("significance", c.significance);
    c.correct_acceptance = j.value("correct_acceptance", c.correct_acceptance);
    c.calibration_photons = j.value("calibration_photons", c.calibration_photons);
    if (j.contains("delay_scan")) {
      const Json& d = j.at("delay_scan");
      check_keys(d, {"delays", "coherence_time", "delayed_photon"}, "delay_scan");
      c.delays = d.value("delays", c.delays);
      c.coherence_time = d.value("coherence_time", c.coherence_time);
      c.delayed_photon = d.value("delayed_photon", c.delayed_photon);
    }
    if (j.contains("noise_sweep")) {
      const Json& d = j.at("noise_sweep");
      check_keys(d, {"fidelities", "realizations", "calibration_trials", "events_per_realization"}, "noise_sweep");
      c.fidelities = d.value("fidelities", c.fidelities);
      c.realizations = d.value("realizations", c.realizations);
      c.calibration_trials = d.value("calibration_trials", c.calibration_trials);
      c.events_per_realization = d.value("events_per_realization", c.events_per_realization);
    }
    if (j.contains("extremal")) {
      const Json& d = j.at("extremal");
      check_keys(d, {"mode", "restarts"}, "extremal");
      const auto mode = d.value("mode", std::string("indist"));
      if (mode != "dist" && mode != "indist") config_fail("extremal mode must be 'dist' or 'indist'");
      c.indistinguishable = mode == "indist";
      c.restarts = d.value("restarts", c.restarts);
    }
    if (j.contains("certify")) {
      const Json& d = j.at("certify");
      check_keys(d, {"value", "std_error"}, "certify");
      c.value = d.at("value").get<double>();
      c.std_error = d.at("std_error").get<double>();
    }
    c.histogram_bins = j.value("histogram_bins", c.histogram_bins);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
  } catch (const Json::exception& e) {
    config_fail(e.what());
  }
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig& c) {
  const bool needs_distribution = c.kind == ExperimentKind::kHaarSweep || c.kind == ExperimentKind::kDelayScan ||
                                  c.kind == ExperimentKind::kNoiseSweep;
  if (c.kind != ExperimentKind::kCertify) {
    if (c.photons < 2) config_fail("photons must be >= 2");
    if (c.modes < 2) config_fail("modes must be >= 2");
  }
  if (needs_distribution) {
    if (c.photons > kMaxBruteForcePhotons) config_fail("photons exceed the brute-force limit");
    if (c.photons > c.modes) config_fail("photons must not exceed modes (one photon per input mode)");
    if (!in_unit_interval(c.gram.xbar_sq) || !in_unit_interval(c.gram.signal_idler_sq) ||
        !in_unit_interval(c.gram.signal_signal_sq)) {
      config_fail("gram overlaps must lie in [0, 1]");
    }
    if (c.gram.kind == GramKind::kSource && c.photons != 3) config_fail("source gram describes exactly 3 photons");
    try {
      (void)c.gram.build(c.photons);
      (void)c.detector.build(c.modes);
    } catch (const Error& e) {
      config_fail(e.what());
    }
    if (!c.detector.ratios.empty() && c.detector.ratios.size() != c.modes) config_fail("detector ratios per mode");
    if (!c.detector.efficiencies.empty() && c.detector.efficiencies.size() != c.modes) {
      config_fail("detector efficiencies per mode");
    }
    if (!(c.event_rate > 0.0)) config_fail("event_rate must be positive");
    if (c.bootstrap_resamples < 2) config_fail("bootstrap_resamples must be >= 2");
    if (!(c.significance > 0.0)) config_fail("significance must be positive");
    if (c.correct_acceptance && c.calibration_photons == 0) config_fail("calibration_photons must be positive");
  }
  switch (c.kind) {
    case ExperimentKind::kHaarSweep:
      if (c.matrices == 0 && !c.include_umax) config_fail("haar sweep needs at least one matrix");
      if (c.events_per_matrix == 0) config_fail("events_per_matrix must be positive");
      if (c.include_umax && c.modes != c.photons + 1) config_fail("include_umax requires modes = photons + 1");
      if (c.histogram_bins == 0) config_fail("histogram_bins must be positive");
      break;
    case ExperimentKind::kDelayScan:
      if (c.delays.empty()) config_fail("delay scan needs a non-empty delay grid");
      if (!(c.coherence_time > 0.0)) config_fail("coherence_time must be positive");
      if (c.delayed_photon >= c.photons) config_fail("delayed_photon out of range");
      if (c.modes != c.photons + 1) config_fail("delay scan runs on u_max: modes must equal photons + 1");
      break;
    case ExperimentKind::kNoiseSweep:
      if (c.fidelities.empty()) config_fail("noise sweep needs a non-empty fidelity grid");
      for (double f : c.fidelities) {
        if (!(f > 0.0 && f <= 1.0)) config_fail("fidelities must lie in (0, 1]");
      }
      if (c.realizations == 0 || c.calibration_trials == 0) config_fail("noise sweep needs realizations and trials");
      if (c.modes != c.photons + 1) config_fail("noise sweep runs on u_max: modes must equal photons + 1");
      break;
    case ExperimentKind::kExtremal:
      if (c.restarts == 0) config_fail("restarts must be >= 1");
      if (c.indistinguishable && (c.modes < c.photons || c.modes > c.photons + 3)) {
        config_fail("indistinguishable search needs photons <= modes <= photons + 3");
      }
      break;
    case ExperimentKind::kCertify:
      if (!(c.significance > 0.0)) config_fail("significance must be positive");
      if (!(c.std_error >= 0.0)) config_fail("std_error must be non-negative");
      break;
  }
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = to_string(c.kind);
  j["photons"] = c.photons;
  j["modes"] = c.modes;
  j["gram"] = {{"kind", gram_kind_name(c.gram.kind)},
               {"xbar_sq", c.gram.xbar_sq},
               {"signal_idler", c.gram.signal_idler_sq},
               {"signal_signal", c.gram.signal_signal_sq}};
  j["matrices"] = c.matrices;
  j["include_umax"] = c.include_umax;
  j["events_per_matrix"] = c.events_per_matrix;
  j["event_rate"] = c.event_rate;
  j["detector"] = {{"transmission", c.detector.transmission},
                   {"dark_count_probability", c.detector.dark_count_probability}};
  if (!c.detector.ratios.empty()) j["detector"]["ratios"] = c.detector.ratios;
  if (!c.detector.efficiencies.empty()) j["detector"]["efficiencies"] = c.detector.efficiencies;
  j["bootstrap_resamples"] = c.bootstrap_resamples;
  j["significance"] = c.significance;
  j["correct_acceptance"] = c.correct_acceptance;
  j["calibration_photons"] = c.calibration_photons;
  j["delay_scan"] = {{"delays", c.delays}, {"coherence_time", c.coherence_time}, {"delayed_photon", c.delayed_photon}};
  j["noise_sweep"] = {{"fidelities", c.fidelities},
                      {"realizations", c.realizations},
                      {"calibration_trials", c.calibration_trials},
                      {"events_per_realization", c.events_per_realization}};
  j["extremal"] = {{"mode", c.indistinguishable ? "indist" : "dist"}, {"restarts", c.restarts}};
  j["certify"] = {{"value", c.value}, {"std_error", c.std_error}};
  j["histogram_bins"] = c.histogram_bins;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

CertificationReport certify(const CorrelatorEstimate& estimate, double significance) {
  if (!(estimate.std_error > 0.0)) {
    throw StatisticalError("cannot certify an estimate with zero standard error");
  }
  CertificationReport report;
  report.estimate = estimate;
  report.threshold = 0.0;
  report.z_score = (estimate.value - report.threshold) / estimate.std_error;
  report.certified = report.z_score >= significance;
  return report;
}

CertificationReport certify_or_reject(const CorrelatorEstimate& estimate, double significance) {
  if (estimate.std_error > 0.0) return certify(estimate, significance);
  CertificationReport report;
  report.estimate = estimate;
  return report;
}

std::optional<DetectorBank> calibrated_bank(const ExperimentConfig& config, std::size_t modes) {
  if (!config.correct_acceptance) return std::nullopt;
  const DetectorBank truth = config.detector.build(modes);
  return calibrate_bank(simulate_reference_counts(truth, config.calibration_photons,
                                                  derive_seed(config.seed, kReferenceStream)),
                        truth.transmission());
}

double integration_time_for(const OutputDistribution& dist, const DetectorBank& bank, double event_rate,
                            std::uint64_t events) {
  const double accept = postselection_probability(dist, bank);
  if (!(accept > 0.0)) throw StatisticalError("no trial can survive postselection with this detector bank");
  return static_cast<double>(events) / (event_rate * accept);
}

CertificationReport measure_and_certify(const InterferometerMatrix& u, const DistinguishabilityGram& s,
                                        std::size_t i, std::size_t j, const ExperimentConfig& config, Seed seed) {
  const auto inputs = first_modes(s.photons());
  const OutputDistribution dist = output_distribution(u, s, inputs);
  const DetectorBank bank = config.detector.build(u.dim());
  const double time = integration_time_for(dist, bank, config.event_rate, config.events_per_matrix);
  const CountsTable counts = simulate_counts(dist, bank, config.event_rate, time, derive_seed(seed, 0));
  const CorrelatorEstimate estimate = estimate_correlator(
      counts, i, j, BootstrapOptions{config.bootstrap_resamples, derive_seed(seed, 1), calibrated_bank(config, u.dim())});
  CertificationReport report = certify_or_reject(estimate, config.significance);
  report.mode_i = i;
  report.mode_j = j;
  return report;
}

std::vector<HaarSweepRow> run_haar_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const DistinguishabilityGram s = config.gram.build(config.photons);
  const DetectorBank bank = config.detector.build(config.modes);
  const auto inputs = first_modes(config.photons);
  const auto pairs = mode_pairs(config.modes);
  const std::size_t items = config.matrices + (config.include_umax ? 1 : 0);
  const std::optional<DetectorBank> correction = calibrated_bank(config, config.modes);

  std::vector<std::vector<HaarSweepRow>> per_matrix(items);
  parallel_for(items, config.threads, [&](std::size_t k) {
    const bool is_umax = k == config.matrices;
    const InterferometerMatrix u =
        is_umax ? u_max(config.photons) : haar_random(config.modes, stream_seed(config.seed, kMatrixStream, k));
    const std::string id = is_umax ? "umax" : std::to_string(k);
    const OutputDistribution dist = output_distribution(u, s, inputs);
    const double time = integration_time_for(dist, bank, config.event_rate, config.events_per_matrix);
    const CountsTable counts =
        simulate_counts(dist, bank, config.event_rate, time, stream_seed(config.seed, kCountsStream, k));
    auto& rows = per_matrix[k];
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [i, j] = pairs[p];
      HaarSweepRow row;
      row.matrix_id = id;
      row.i = i;
      row.j = j;
      row.c_exact = correlator_analytic(u, s, i, j, inputs);
      const BootstrapOptions boot{config.bootstrap_resamples,
                                  stream_seed(config.seed, kBootstrapStream, k * pairs.size() + p), correction};
      row.report = certify_or_reject(estimate_correlator(counts, i, j, boot), config.significance);
      row.report.matrix_id = id;
      row.report.mode_i = i;
      row.report.mode_j = j;
      rows.push_back(std::move(row));
    }
  });
  std::vector<HaarSweepRow> out;
  for (auto& rows : per_matrix) {
    for (auto& row : rows) out.push_back(std::move(row));
  }
  return out;
}

std::vector<DelayScanRow> run_delay_scan(const ExperimentConfig& config) {
  validate_config(config);
  const InterferometerMatrix u = u_max(config.photons);
  const DistinguishabilityGram base = config.gram.build(config.photons);
  const auto inputs = first_modes(config.photons);
  std::vector<DelayScanRow> rows(config.delays.size());
  parallel_for(config.delays.size(), config.threads, [&](std::size_t k) {
    std::vector<double> times(config.photons, 0.0);
    times[config.delayed_photon] = config.delays[k];
    const DistinguishabilityGram s = gram_product(base, gram_from_delays(times, config.coherence_time));
    DelayScanRow& row = rows[k];
    row.delay = config.delays[k];
    row.xbar_sq = s.mean_overlap_sq();
    row.c_exact = correlator_analytic(u, s, 0, 1, inputs);
    row.c_closed_form = correlator_umax_closed_form(config.photons, s);
    if (config.events_per_matrix > 0) {
      row.report = measure_and_certify(u, s, 0, 1, config, stream_seed(config.seed, kDelayStream, k));
      row.report->matrix_id = "umax";
    }
  });
  return rows;
}

std::vector<NoiseSweepRow> run_noise_sweep(const ExperimentConfig& config) {
  validate_config(config);
  const InterferometerMatrix u = u_max(config.photons);
  const MeshProgram program = decompose(u);
  const DistinguishabilityGram s = config.gram.build(config.photons);
  const auto inputs = first_modes(config.photons);
  const ExperimentConfig counting = with_events(config, config.events_per_realization);

  std::vector<NoiseSweepRow> rows;
  for (std::size_t f = 0; f < config.fidelities.size(); ++f) {
    NoiseSweepRow row;
    row.target_fidelity = config.fidelities[f];
    row.sigma = calibrate_noise_to_fidelity(u, row.target_fidelity, config.calibration_trials,
                                            derive_seed(config.seed, kCalibrationStream));
    row.realizations = config.realizations;
    std::vector<double> corr(config.realizations), fid(config.realizations);
    std::vector<std::optional<CertificationReport>> reports(config.realizations);
    parallel_for(config.realizations, config.threads, [&](std::size_t r) {
      const InterferometerMatrix noisy =
          reconstruct(perturb_phases(program, row.sigma, stream_seed(config.seed, kNoiseStream, r)));
      fid[r] = fidelity(u, noisy);
      corr[r] = correlator_analytic(noisy, s, 0, 1, inputs);
      if (config.events_per_realization > 0) {
        reports[r] = measure_and_certify(noisy, s, 0, 1, counting,
                                         stream_seed(config.seed, kNoiseCountsStream, f * config.realizations + r));
      }
    });
    double sum = 0.0, sum_f = 0.0;
    for (std::size_t r = 0; r < corr.size(); ++r) {
      sum += corr[r];
      sum_f += fid[r];
    }
    const double n = static_cast<double>(corr.size());
    row.c_mean = sum / n;
    row.mean_fidelity = sum_f / n;
    double ss = 0.0;
    for (double c : corr) ss += (c - row.c_mean) * (c - row.c_mean);
    row.c_std = corr.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    for (const auto& rep : reports) {
      if (!rep) continue;
      row.certified += rep->certified ? 1 : 0;
      row.max_z = std::max(row.max_z, rep->z_score);
    }
    rows.push_back(row);
  }
  return rows;
}

SearchResult run_extremal(const ExperimentConfig& config) {
  validate_config(config);
  SearchOptions options;
  options.restarts = config.restarts;
  options.seed = derive_seed(config.seed, kSearchStream);
  options.threads = config.threads;
  if (config.indistinguishable) {
    options.modes = config.modes;
    return max_correlator_indistinguishable(config.photons, options);
  }
  return max_correlator_distinguishable(config.modes, config.photons, options);
}

void write_haar_sweep_csv(std::ostream& out, const std::vector<HaarSweepRow>& rows) {
  out << "matrix,i,j,c_exact,c_estimate,std_error,n_events,z_score,certified\n";
  for (const auto& r : rows) {
    out << r.matrix_id << ',' << r.i << ',' << r.j << ',' << fmt(r.c_exact) << ',' << fmt(r.report.estimate.value)
        << ',' << fmt(r.report.estimate.std_error) << ',' << r.report.estimate.n_events << ','
        << fmt(r.report.z_score) << ',' << (r.report.certified ? 1 : 0) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<HaarSweepRow>& rows, std::size_t bins) {
  std::vector<double> estimates, exact;
  for (const auto& r : rows) {
    estimates.push_back(r.report.estimate.value);
    exact.push_back(r.c_exact);
  }
  out << "series,bin_lo,bin_hi,count\n";
  for (const auto& b : make_histogram(estimates, bins)) {
    out << "estimate," << fmt(b.lo) << ',' << fmt(b.hi) << ',' << b.count << '\n';
  }
  for (const auto& b : make_histogram(exact, bins)) {
    out << "exact," << fmt(b.lo) << ',' << fmt(b.hi) << ',' << b.count << '\n';
  }
}

void write_delay_scan_csv(std::ostream& out, const std::vector<DelayScanRow>& rows) {
  out << "delay,xbar_sq,c_exact,c_closed_form,c_estimate,std_error,n_events,z_score,certified\n";
  for (const auto& r : rows) {
    out << fmt(r.delay) << ',' << fmt(r.xbar_sq) << ',' << fmt(r.c_exact) << ',' << fmt(r.c_closed_form) << ',';
    if (r.report) {
      out << fmt(r.report->estimate.value) << ',' << fmt(r.report->estimate.std_error) << ','
          << r.report->estimate.n_events << ',' << fmt(r.report->z_score) << ',' << (r.report->certified ? 1 : 0);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

void write_noise_sweep_csv(std::ostream& out, const std::vector<NoiseSweepRow>& rows) {
  out << "target_fidelity,sigma,mean_fidelity,c_mean,c_std,realizations,certified,max_z\n";
  for (const auto& r : rows) {
    out << fmt(r.target_fidelity) << ',' << fmt(r.sigma) << ',' << fmt(r.mean_fidelity) << ',' << fmt(r.c_mean)
        << ',' << fmt(r.c_std) << ',' << r.realizations << ',' << r.certified << ',' << fmt(r.max_z) << '\n';
  }
}

Json search_result_to_json(const SearchResult& result, const ExperimentConfig& config) {
  auto row_json = [](const ComplexVector& v) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      re.push_back(v(k).real());
      im.push_back(v(k).imag());
    }
    return Json{{"re", re}, {"im", im}};
  };
  Json j;
  j["value"] = result.best_value;
  j["rows"] = {row_json(result.best_rows.row_a()), row_json(result.best_rows.row_b())};
  Json meta;
  meta["mode"] = config.indistinguishable ? "indist" : "dist";
  meta["photons"] = config.photons;
  meta["modes"] = result.best_rows.dim();
  meta["restarts"] = result.restarts_used;
  meta["best_restart"] = result.best_restart;
  meta["converged"] = result.converged;
  meta["seed"] = config.seed;
  if (config.indistinguishable) {
    meta["conjectured_optimum"] = thresholds(config.photons).c_quantum;
    if (config.photons >= 3 && result.best_rows.dim() > config.photons) {
      meta["umax_profile_deviation"] = umax_profile_deviation(result.best_rows, config.photons);
    }
  } else {
    meta["classical_bound"] = 0.0;
  }
  meta["note"] = "multi-start local search: numerical evidence, not a proof of global optimality";
  j["metadata"] = meta;
  return j;
}

Json report_to_json(const CertificationReport& report) {
  return Json{{"value", report.estimate.value},
              {"std_error", report.estimate.std_error},
              {"n_events", report.estimate.n_events},
              {"threshold", report.threshold},
              {"z_score", report.z_score},
              {"certified", report.certified},
              {"matrix", report.matrix_id},
              {"modes", {report.mode_i, report.mode_j}}};
}

void run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  validate_config(config);
  std::filesystem::create_directories(out_dir);
  Json manifest;
  manifest["experiment"] = to_string(config.kind);
  manifest["config"] = config_to_json(config);
  manifest["seed"] = config.seed;
  manifest["versions"] = {{"witness", kToolkitVersion}, {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                                                     std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                                                     std::to_string(EIGEN_MINOR_VERSION)}};

  auto write_text = [&](const std::string& name, const std::string& text) {
    std::ofstream out(out_dir / name);
    if (!out) throw Error("cannot write " + (out_dir / name).string());
    out << text;
  };

  switch (config.kind) {
    case ExperimentKind::kHaarSweep: {
      const auto rows = run_haar_sweep(config);
      std::ostringstream csv, hist;
      write_haar_sweep_csv(csv, rows);
      write_histogram_csv(hist, rows, config.histogram_bins);
      write_text("results.csv", csv.str());
      write_text("histogram.csv", hist.str());
      std::vector<double> values;
      std::size_t certified = 0;
      for (const auto& r : rows) {
        values.push_back(r.report.estimate.value);
        certified += r.report.certified ? 1 : 0;
      }
      manifest["summary"] = {{"rows", rows.size()}, {"certified", certified}};
      write_text("figure.svg", histogram_svg(values, config.histogram_bins,
                                             {"Two-mode correlators over Haar-random interferometers",
                                              "estimated correlator C", "count"},
                                             0.0));
      break;
    }
    case ExperimentKind::kDelayScan: {
      const auto rows = run_delay_scan(config);
      std::ostringstream csv;
      write_delay_scan_csv(csv, rows);
      write_text("results.csv", csv.str());
      PlotSeries exact{"exact", {}, {}, {}, false};
      PlotSeries est{"simulated", {}, {}, {}, true};
      for (const auto& r : rows) {
        exact.x.push_back(r.xbar_sq);
        exact.y.push_back(r.c_exact);
        if (r.report) {
          est.x.push_back(r.xbar_sq);
          est.y.push_back(r.report->estimate.value);
          est.error.push_back(r.report->estimate.std_error);
        }
      }
      std::vector<PlotSeries> series{exact};
      if (!est.x.empty()) series.push_back(est);
      write_text("figure.svg",
                 series_svg(series, {"Correlator of the optimal interferometer vs overlap", "mean overlap x^2", "C"},
                            0.0));
      break;
    }
    case ExperimentKind::kNoiseSweep: {
      const auto rows = run_noise_sweep(config);
      std::ostringstream csv;
      write_noise_sweep_csv(csv, rows);
      write_text("results.csv", csv.str());
      PlotSeries mean{"mean exact C over noisy meshes", {}, {}, {}, false};
      for (const auto& r : rows) {
        mean.x.push_back(r.target_fidelity);
        mean.y.push_back(r.c_mean);
        mean.error.push_back(r.c_std);
      }
      write_text("figure.svg", series_svg({mean}, {"Correlator under phase noise", "fidelity", "C"}, 0.0));
      break;
    }
    case ExperimentKind::kExtremal: {
      const SearchResult result = run_extremal(config);
      write_json_file(out_dir / "results.json", search_result_to_json(result, config));
      std::vector<double> sorted = result.restart_values;
      std::sort(sorted.begin(), sorted.end());
      PlotSeries s{"restart optimum (sorted)", {}, sorted, {}, true};
      for (std::size_t k = 0; k < sorted.size(); ++k) s.x.push_back(static_cast<double>(k));
      const double reference = config.indistinguishable ? thresholds(config.photons).c_quantum : 0.0;
      write_text("figure.svg", series_svg({s}, {"Local optima per restart", "restart (sorted)", "C"}, reference));
      break;
    }
    case ExperimentKind::kCertify: {
      const CertificationReport report =
          certify(CorrelatorEstimate{config.value, config.std_error, 0}, config.significance);
      write_json_file(out_dir / "results.json", report_to_json(report));
      break;
    }
  }
  write_json_file(out_dir / "manifest.json", manifest);
}

}  // namespace witness

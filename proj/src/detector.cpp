#include "witness/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "witness/error.hpp"
#include "witness/parallel.hpp"

namespace witness {
namespace {

constexpr std::uint64_t kTrialBlock = 1u << 14;

// Probability that k photons routed with `ratios` hit k distinct sub-detectors.
double resolve_probability(int k, const std::array<double, 3>& r) {
  switch (k) {
    case 0:
    case 1:
      return 1.0;
    case 2:
      return 1.0 - (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    case 3:
      return 6.0 * r[0] * r[1] * r[2];
    default:
      return 0.0;
  }
}

std::size_t pick_subdetector(const std::array<double, 3>& ratios, double u) {
  if (u < ratios[0]) return 0;
  if (u < ratios[0] + ratios[1]) return 1;
  return 2;
}

}  // namespace

DetectorBank::DetectorBank(std::vector<ModeDetector> modes, double transmission, double dark_count_probability)
    : modes_(std::move(modes)), transmission_(transmission), dark_count_probability_(dark_count_probability) {
  if (modes_.empty()) throw InvalidArgument("detector bank needs at least one mode");
  if (!(transmission_ > 0.0 && transmission_ <= 1.0)) {
    throw InvalidArgument("transmission must lie in (0, 1]");
  }
  if (!(dark_count_probability_ >= 0.0 && dark_count_probability_ < 1.0)) {
    throw InvalidArgument("dark count probability must lie in [0, 1)");
  }
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const auto& d = modes_[m];
    const double sum = d.ratios[0] + d.ratios[1] + d.ratios[2];
    const bool negative = std::any_of(d.ratios.begin(), d.ratios.end(), [](double r) { return r < 0.0; });
    if (negative || std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "splitting ratios of mode " << m << " must be non-negative and sum to 1 (sum " << sum << ")";
      throw InvalidArgument(msg.str());
    }
    if (!(d.efficiency > 0.0 && d.efficiency <= 1.0)) {
      std::ostringstream msg;
      msg << "efficiency of mode " << m << " must lie in (0, 1], got " << d.efficiency;
      throw InvalidArgument(msg.str());
    }
  }
}

DetectorBank DetectorBank::ideal(std::size_t modes) { return uniform(modes, 1.0); }

DetectorBank DetectorBank::uniform(std::size_t modes, double transmission) {
  return DetectorBank(std::vector<ModeDetector>(modes), transmission);
}

std::uint64_t CountsTable::n_events() const {
  std::uint64_t total = 0;
  for (const auto& [pattern, count] : events) total += count;
  return total;
}

CountsTable simulate_counts(const OutputDistribution& dist, const DetectorBank& bank, double event_rate,
                            double integration_time, Seed seed, unsigned threads) {
  if (!(event_rate > 0.0) || !(integration_time > 0.0)) {
    throw InvalidArgument("event rate and integration time must be positive");
  }
  if (bank.modes() != dist.modes()) {
    std::ostringstream msg;
    msg << "detector bank covers " << bank.modes() << " modes, distribution has " << dist.modes();
    throw InvalidArgument(msg.str());
  }

  std::vector<const OccupationPattern*> patterns;
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& [pattern, p] : dist.probabilities()) {
    if (p <= 0.0) continue;
    acc += p;
    patterns.push_back(&pattern);
    cdf.push_back(acc);
  }
  if (patterns.empty()) throw StatisticalError("output distribution has no support");

  CountsTable table;
  table.photons = dist.photons();
  table.modes = dist.modes();
  table.integration_time = integration_time;
  {
    Rng rng = make_rng(derive_seed(seed, 0));
    std::poisson_distribution<std::uint64_t> poisson(event_rate * integration_time);
    table.total_trials = poisson(rng);
  }

  const std::size_t modes = dist.modes();
  const int photons = static_cast<int>(dist.photons());
  const double dark = bank.dark_count_probability();
  const std::uint64_t blocks = (table.total_trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::map<OccupationPattern, std::uint64_t>> partial(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    Rng rng = make_rng(derive_seed(seed, 1 + b));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::uint64_t begin = b * kTrialBlock;
    const std::uint64_t end = std::min(table.total_trials, begin + kTrialBlock);
    std::vector<std::array<bool, 3>> clicks(modes);
    OccupationPattern detected(modes);
    auto& local = partial[b];
    for (std::uint64_t t = begin; t < end; ++t) {
      const double u = unit(rng) * acc;
      const auto idx = std::min<std::size_t>(
          static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()), cdf.size() - 1);
      const OccupationPattern& truth = *patterns[idx];
      int total = 0;
      for (std::size_t m = 0; m < modes; ++m) {
        clicks[m] = {false, false, false};
        const ModeDetector& det = bank.mode(m);
        const double survive = bank.transmission() * det.efficiency;
        for (int k = 0; k < truth[m]; ++k) {
          if (unit(rng) >= survive) continue;
          clicks[m][pick_subdetector(det.ratios, unit(rng))] = true;
        }
        if (dark > 0.0) {
          for (auto& c : clicks[m]) {
            if (unit(rng) < dark) c = true;
          }
        }
        detected[m] = static_cast<int>(clicks[m][0]) + static_cast<int>(clicks[m][1]) + static_cast<int>(clicks[m][2]);
        total += detected[m];
      }
      if (total == photons) ++local[detected];
    }
  });

  for (const auto& block : partial) {
    for (const auto& [pattern, count] : block) table.events[pattern] += count;
  }
  return table;
}

double pattern_acceptance(const OccupationPattern& pattern, const DetectorBank& bank) {
  if (pattern.size() != bank.modes()) throw InvalidArgument("pattern length does not match the detector bank");
  double keep = 1.0;
  for (std::size_t m = 0; m < pattern.size(); ++m) {
    const ModeDetector& det = bank.mode(m);
    keep *= std::pow(det.efficiency, pattern[m]) * resolve_probability(pattern[m], det.ratios);
  }
  return keep;
}

double postselection_probability(const OutputDistribution& dist, const DetectorBank& bank) {
  if (bank.modes() != dist.modes()) throw InvalidArgument("detector bank and distribution mode counts differ");
  double total = 0.0;
  const double survive_all = std::pow(bank.transmission(), static_cast<double>(dist.photons()));
  for (const auto& [pattern, p] : dist.probabilities()) total += p * survive_all * pattern_acceptance(pattern, bank);
  return total;
}

CountsTable sample_events(const OutputDistribution& dist, std::uint64_t events, Seed seed) {
  std::vector<const OccupationPattern*> patterns;
  std::vector<double> weights;
  for (const auto& [pattern, p] : dist.probabilities()) {
    patterns.push_back(&pattern);
    weights.push_back(p);
  }
  CountsTable table;
  table.photons = dist.photons();
  table.modes = dist.modes();
  table.total_trials = events;
  Rng rng = make_rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  for (std::uint64_t e = 0; e < events; ++e) ++table.events[*patterns[pick(rng)]];
  return table;
}

CorrelatorEstimate estimate_correlator(const CountsTable& counts, std::size_t i, std::size_t j,
                                       const BootstrapOptions& options) {
  if (i == j) throw InvalidArgument("correlator requires two distinct output modes");
  if (i >= counts.modes || j >= counts.modes) throw InvalidArgument("output mode index out of range");
  const std::uint64_t total = counts.n_events();
  if (total == 0) throw StatisticalError("no postselected events to estimate the correlator from");

  struct Cell {
    double ni, nj;
    double weight;  // inverse acceptance, 1 without correction
    std::uint64_t count;
  };
  std::vector<Cell> cells;
  cells.reserve(counts.events.size());
  for (const auto& [pattern, count] : counts.events) {
    if (count == 0) continue;
    double weight = 1.0;
    if (options.acceptance_correction) {
      const double accept = pattern_acceptance(pattern, *options.acceptance_correction);
      if (!(accept > 0.0)) {
        throw StatisticalError("observed pattern " + std::to_string(count) +
                               " times has zero acceptance under the correction bank");
      }
      weight = 1.0 / accept;
    }
    cells.push_back({static_cast<double>(pattern[i]), static_cast<double>(pattern[j]), weight, count});
  }

  auto statistic = [&](const std::vector<std::uint64_t>& counts_per_cell, std::uint64_t) {
    double norm = 0.0, si = 0.0, sj = 0.0, sij = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double w = static_cast<double>(counts_per_cell[c]) * cells[c].weight;
      norm += w;
      si += w * cells[c].ni;
      sj += w * cells[c].nj;
      sij += w * cells[c].ni * cells[c].nj;
    }
    const double inv = 1.0 / norm;
    return sij * inv - (si * inv) * (sj * inv);
  };

  std::vector<std::uint64_t> observed(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) observed[c] = cells[c].count;

  CorrelatorEstimate estimate;
  estimate.n_events = total;
  estimate.value = statistic(observed, total);
  if (total <= 1 || options.resamples < 2) return estimate;

  // Resampling events with replacement is a multinomial draw over the
  // observed patterns; draw it as a chain of conditional binomials.
  Rng rng = make_rng(options.seed);
  std::vector<std::uint64_t> resampled(cells.size());
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < options.resamples; ++r) {
    std::uint64_t remaining = total;
    std::uint64_t mass = total;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c + 1 == cells.size() || remaining == 0) {
        resampled[c] = remaining;
      } else {
        const double p = std::min(1.0, static_cast<double>(cells[c].count) / static_cast<double>(mass));
        std::binomial_distribution<std::uint64_t> binom(remaining, p);
        resampled[c] = binom(rng);
      }
      remaining -= resampled[c];
      mass -= cells[c].count;
    }
    const double value = statistic(resampled, total);
    const double delta = value - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (value - mean);
  }
  estimate.std_error = std::sqrt(m2 / static_cast<double>(options.resamples - 1));
  return estimate;
}

ReferenceCounts simulate_reference_counts(const DetectorBank& bank, std::uint64_t photons_per_mode, Seed seed) {
  ReferenceCounts counts(bank.modes(), {0, 0, 0});
  for (std::size_t m = 0; m < bank.modes(); ++m) {
    Rng rng = make_rng(derive_seed(seed, m));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ModeDetector& det = bank.mode(m);
    const double survive = bank.transmission() * det.efficiency;
    for (std::uint64_t k = 0; k < photons_per_mode; ++k) {
      if (unit(rng) >= survive) continue;
      ++counts[m][pick_subdetector(det.ratios, unit(rng))];
    }
  }
  return counts;
}

DetectorBank calibrate_bank(const ReferenceCounts& reference, double transmission) {
  if (reference.empty()) throw InvalidArgument("calibration needs reference counts for every mode");
  std::vector<double> totals(reference.size());
  for (std::size_t m = 0; m < reference.size(); ++m) {
    const auto& c = reference[m];
    totals[m] = static_cast<double>(c[0] + c[1] + c[2]);
    if (totals[m] == 0.0) {
      std::ostringstream msg;
      msg << "mode " << m << " recorded no reference counts";
      throw StatisticalError(msg.str());
    }
  }
  const double brightest = *std::max_element(totals.begin(), totals.end());
  std::vector<ModeDetector> modes(reference.size());
  for (std::size_t m = 0; m < reference.size(); ++m) {
    for (std::size_t d = 0; d < 3; ++d) modes[m].ratios[d] = static_cast<double>(reference[m][d]) / totals[m];
    // force an exact unit sum
    modes[m].ratios[2] = std::max(0.0, 1.0 - modes[m].ratios[0] - modes[m].ratios[1]);
    modes[m].efficiency = totals[m] / brightest;
  }
  return DetectorBank(std::move(modes), transmission);
}

}  // namespace witness

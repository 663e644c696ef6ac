#include "witness/interference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "witness/error.hpp"

namespace witness {
namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;

void check_inputs(const InterferometerMatrix& u, const DistinguishabilityGram& s,
                  std::span<const std::size_t> input_modes) {
  if (input_modes.size() != s.photons()) {
    std::ostringstream msg;
    msg << "Gram matrix describes " << s.photons() << " photons but " << input_modes.size()
        << " input modes were given";
    throw InvalidArgument(msg.str());
  }
  std::vector<std::size_t> sorted(input_modes.begin(), input_modes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("input modes must be distinct (one photon per input mode)");
  }
  if (!sorted.empty() && sorted.back() >= u.dim()) {
    std::ostringstream msg;
    msg << "input mode " << sorted.back() << " out of range for a " << u.dim() << "-mode network";
    throw InvalidArgument(msg.str());
  }
}

void check_mode_pair(std::size_t modes, std::size_t i, std::size_t j) {
  if (i == j) throw InvalidArgument("correlator requires two distinct output modes");
  if (i >= modes || j >= modes) {
    std::ostringstream msg;
    msg << "output mode pair (" << i << ", " << j << ") out of range for " << modes << " modes";
    throw InvalidArgument(msg.str());
  }
}

void enumerate_patterns(std::size_t photons, std::size_t modes, OccupationPattern& current, std::size_t mode,
                        int remaining, std::vector<OccupationPattern>& out) {
  if (mode + 1 == modes) {
    current[mode] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[mode] = k;
    enumerate_patterns(photons, modes, current, mode + 1, remaining - k, out);
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

DistinguishabilityGram::DistinguishabilityGram(ComplexMatrix entries) : entries_(std::move(entries)) {
  const auto n = entries_.rows();
  if (n == 0 || n != entries_.cols()) throw InvalidArgument("Gram matrix must be square and non-empty");
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(entries_(k, k) - Complex(1.0, 0.0)) > kHermitianTolerance) {
      throw PreconditionViolation("Gram matrix must have unit diagonal");
    }
    for (Eigen::Index l = 0; l < n; ++l) {
      if (std::abs(entries_(k, l) - std::conj(entries_(l, k))) > kHermitianTolerance) {
        throw PreconditionViolation("Gram matrix must be Hermitian");
      }
      if (std::abs(entries_(k, l)) > 1.0 + kHermitianTolerance) {
        throw PreconditionViolation("Gram matrix entries must satisfy |S_kl| <= 1");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(entries_, Eigen::EigenvaluesOnly);
  const double min_eigenvalue = eig.eigenvalues().minCoeff();
  if (min_eigenvalue < -kPsdTolerance) {
    std::ostringstream msg;
    msg << "Gram matrix is not positive semidefinite: minimum eigenvalue " << min_eigenvalue;
    throw PreconditionViolation(msg.str());
  }
}

DistinguishabilityGram DistinguishabilityGram::identity(std::size_t photons) {
  const auto n = static_cast<Eigen::Index>(photons);
  return DistinguishabilityGram(ComplexMatrix::Identity(n, n));
}

DistinguishabilityGram DistinguishabilityGram::ones(std::size_t photons) {
  const auto n = static_cast<Eigen::Index>(photons);
  return DistinguishabilityGram(ComplexMatrix::Ones(n, n));
}

double DistinguishabilityGram::offdiagonal_overlap_sq_sum() const {
  double sum = 0.0;
  for (std::size_t k = 0; k < photons(); ++k) {
    for (std::size_t l = 0; l < photons(); ++l) {
      if (k != l) sum += overlap_sq(k, l);
    }
  }
  return sum;
}

double DistinguishabilityGram::mean_overlap_sq() const {
  const std::size_t n = photons();
  if (n < 2) return 0.0;
  return offdiagonal_overlap_sq_sum() / static_cast<double>(n * (n - 1));
}

OutputDistribution::OutputDistribution(std::size_t photons, std::size_t modes,
                                       std::map<OccupationPattern, double> probabilities)
    : photons_(photons), modes_(modes), probabilities_(std::move(probabilities)) {}

double OutputDistribution::probability(const OccupationPattern& pattern) const {
  const auto it = probabilities_.find(pattern);
  return it == probabilities_.end() ? 0.0 : it->second;
}

double OutputDistribution::mean_occupation(std::size_t mode) const {
  if (mode >= modes_) throw InvalidArgument("mode index out of range");
  double mean = 0.0;
  for (const auto& [pattern, p] : probabilities_) mean += p * pattern[mode];
  return mean;
}

DistinguishabilityGram gram_uniform(std::size_t photons, double xbar_sq) {
  if (photons == 0) throw InvalidArgument("invalid photon count: need at least one photon");
  if (!(xbar_sq >= 0.0 && xbar_sq <= 1.0)) {
    std::ostringstream msg;
    msg << "mean squared overlap must lie in [0, 1], got " << xbar_sq;
    throw InvalidArgument(msg.str());
  }
  const auto n = static_cast<Eigen::Index>(photons);
  ComplexMatrix s = ComplexMatrix::Constant(n, n, Complex(std::sqrt(xbar_sq), 0.0));
  s.diagonal().setOnes();
  return DistinguishabilityGram(std::move(s));
}

DistinguishabilityGram gram_source(double signal_idler_sq, double signal_signal_sq) {
  for (const double v : {signal_idler_sq, signal_signal_sq}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream msg;
      msg << "squared source overlaps must lie in [0, 1], got " << v;
      throw InvalidArgument(msg.str());
    }
  }
  const double si = std::sqrt(signal_idler_sq);
  const double ss = std::sqrt(signal_signal_sq);
  ComplexMatrix s(3, 3);
  s << 1.0, si, ss,
       si, 1.0, ss,
       ss, ss, 1.0;
  return DistinguishabilityGram(std::move(s));
}

DistinguishabilityGram gram_from_delays(std::span<const double> delays, double coherence_time) {
  if (!(coherence_time > 0.0)) throw InvalidArgument("coherence time must be positive");
  if (delays.empty()) throw InvalidArgument("need at least one photon delay");
  const auto n = static_cast<Eigen::Index>(delays.size());
  ComplexMatrix s(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      const double dt = (delays[static_cast<std::size_t>(k)] - delays[static_cast<std::size_t>(l)]) / coherence_time;
      s(k, l) = Complex(std::exp(-0.5 * dt * dt), 0.0);
    }
  }
  return DistinguishabilityGram(std::move(s));
}

DistinguishabilityGram gram_product(const DistinguishabilityGram& a, const DistinguishabilityGram& b) {
  if (a.photons() != b.photons()) throw InvalidArgument("Gram matrices describe different photon counts");
  return DistinguishabilityGram(a.entries().cwiseProduct(b.entries()));
}

std::vector<std::size_t> first_modes(std::size_t photons) {
  std::vector<std::size_t> modes(photons);
  std::iota(modes.begin(), modes.end(), std::size_t{0});
  return modes;
}

OutputDistribution output_distribution(const InterferometerMatrix& u, const DistinguishabilityGram& s,
                                       std::span<const std::size_t> input_modes) {
  check_inputs(u, s, input_modes);
  const std::size_t n = input_modes.size();
  if (n > kMaxBruteForcePhotons) {
    std::ostringstream msg;
    msg << "brute-force distribution limited to " << kMaxBruteForcePhotons << " photons, got " << n;
    throw InvalidArgument(msg.str());
  }
  const std::size_t modes = u.dim();

  std::vector<OccupationPattern> patterns;
  OccupationPattern scratch(modes, 0);
  enumerate_patterns(n, modes, scratch, 0, static_cast<int>(n), patterns);

  std::vector<std::vector<std::size_t>> perms;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::map<OccupationPattern, double> probs;
  std::vector<std::size_t> slots;
  std::vector<Complex> m(n * n);  // m[j * n + k] = U[d_j, in_k]
  for (const auto& pattern : patterns) {
    slots.clear();
    double multiplicity = 1.0;
    for (std::size_t mode = 0; mode < modes; ++mode) {
      for (int c = 0; c < pattern[mode]; ++c) slots.push_back(mode);
      multiplicity *= factorial(pattern[mode]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) m[j * n + k] = u(slots[j], input_modes[k]);
    }
    Complex total(0.0, 0.0);
    for (const auto& sigma : perms) {
      for (const auto& tau : perms) {
        Complex term(1.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
          term *= m[j * n + sigma[j]] * std::conj(m[j * n + tau[j]]) * s(tau[j], sigma[j]);
        }
        total += term;
      }
    }
    if (std::abs(total.imag()) > 1e-12 * std::max(1.0, multiplicity)) {
      std::ostringstream msg;
      msg << "probability has imaginary residue " << total.imag();
      throw StatisticalError(msg.str());
    }
    probs.emplace(pattern, std::max(0.0, total.real() / multiplicity));
  }
  return OutputDistribution(n, modes, std::move(probs));
}

double correlator_from_distribution(const OutputDistribution& dist, std::size_t i, std::size_t j) {
  check_mode_pair(dist.modes(), i, j);
  double ni = 0.0, nj = 0.0, nij = 0.0;
  for (const auto& [pattern, p] : dist.probabilities()) {
    ni += p * pattern[i];
    nj += p * pattern[j];
    nij += p * pattern[i] * pattern[j];
  }
  return nij - ni * nj;
}

double correlator_rows(const ComplexVector& row_i, const ComplexVector& row_j, const DistinguishabilityGram& s,
                       std::span<const std::size_t> input_modes) {
  const std::size_t n = input_modes.size();
  double classical = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto ck = static_cast<Eigen::Index>(input_modes[k]);
    classical += std::norm(row_i(ck)) * std::norm(row_j(ck));
  }
  double quantum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto ck = static_cast<Eigen::Index>(input_modes[k]);
    for (std::size_t l = 0; l < n; ++l) {
      if (k == l) continue;
      const auto cl = static_cast<Eigen::Index>(input_modes[l]);
      const Complex term = row_i(ck) * row_j(cl) * std::conj(row_i(cl)) * std::conj(row_j(ck));
      quantum += s.overlap_sq(k, l) * term.real();  // imaginary parts cancel between (k,l) and (l,k)
    }
  }
  return quantum - classical;
}

double correlator_analytic(const InterferometerMatrix& u, const DistinguishabilityGram& s, std::size_t i,
                           std::size_t j, std::span<const std::size_t> input_modes) {
  check_inputs(u, s, input_modes);
  check_mode_pair(u.dim(), i, j);
  const auto& e = u.entries();
  return correlator_rows(e.row(static_cast<Eigen::Index>(i)).transpose(),
                         e.row(static_cast<Eigen::Index>(j)).transpose(), s, input_modes);
}

double correlator_umax_closed_form(std::size_t photons, const DistinguishabilityGram& s) {
  if (photons < 2) throw InvalidArgument("invalid photon count: need n >= 2");
  if (s.photons() != photons) {
    std::ostringstream msg;
    msg << "Gram matrix dimension " << s.photons() << " does not match photon count " << photons;
    throw InvalidArgument(msg.str());
  }
  const double n = static_cast<double>(photons);
  return (-n + s.offdiagonal_overlap_sq_sum()) / (4.0 * n * n);
}

double contribution_probability(const InterferometerMatrix& u, const DistinguishabilityGram& s, std::size_t i,
                                std::size_t j, std::span<const std::size_t> input_modes) {
  check_mode_pair(u.dim(), i, j);
  const OutputDistribution dist = output_distribution(u, s, input_modes);
  double p = 0.0;
  for (const auto& [pattern, prob] : dist.probabilities()) {
    if (pattern[i] + pattern[j] >= 1) p += prob;
  }
  return p;
}

}  // namespace witness

#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace witness::oracle {

/// Permanent by explicit sum over permutations.
inline std::complex<double> permanent(const Eigen::MatrixXcd& a) {
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::complex<double> total = 0.0;
  do {
    std::complex<double> term = 1.0;
    for (std::size_t r = 0; r < n; ++r) term *= a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(perm[r]));
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

/// Sub-matrix M[j][k] = U[d_j, in_k] with d listing the occupied modes of
/// `pattern` with multiplicity.
inline Eigen::MatrixXcd submatrix(const Eigen::MatrixXcd& u, const std::vector<int>& pattern,
                                  const std::vector<std::size_t>& inputs) {
  std::vector<Eigen::Index> rows;
  for (std::size_t m = 0; m < pattern.size(); ++m) {
    for (int c = 0; c < pattern[m]; ++c) rows.push_back(static_cast<Eigen::Index>(m));
  }
  const auto n = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXcd sub(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) sub(j, k) = u(rows[static_cast<std::size_t>(j)], static_cast<Eigen::Index>(inputs[static_cast<std::size_t>(k)]));
  }
  return sub;
}

inline double multiplicity(const std::vector<int>& pattern) {
  double f = 1.0;
  for (int k : pattern) {
    for (int i = 2; i <= k; ++i) f *= i;
  }
  return f;
}

/// Fully indistinguishable bosons: |perm(M)|^2 / prod m!.
inline double bosonic_probability(const Eigen::MatrixXcd& u, const std::vector<int>& pattern,
                                  const std::vector<std::size_t>& inputs) {
  return std::norm(permanent(submatrix(u, pattern, inputs))) / multiplicity(pattern);
}

/// Fully distinguishable particles: perm(|M|^2) / prod m!.
inline double classical_probability(const Eigen::MatrixXcd& u, const std::vector<int>& pattern,
                                    const std::vector<std::size_t>& inputs) {
  const Eigen::MatrixXcd sub = submatrix(u, pattern, inputs);
  const Eigen::MatrixXcd moduli = sub.cwiseAbs2().cast<std::complex<double>>();
  return permanent(moduli).real() / multiplicity(pattern);
}

/// All occupation patterns of n photons over `modes` modes.
inline std::vector<std::vector<int>> all_patterns(std::size_t photons, std::size_t modes) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(modes, 0);
  auto rec = [&](auto&& self, std::size_t m, int left) -> void {
    if (m + 1 == modes) {
      cur[m] = left;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[m] = k;
      self(self, m + 1, left - k);
    }
  };
  rec(rec, 0, static_cast<int>(photons));
  return out;
}

/// Kolmogorov-Smirnov p-value of `samples` against Uniform[lo, hi).
inline double ks_uniform_pvalue(std::vector<double> samples, double lo, double hi) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = (samples[k] - lo) / (hi - lo);
    d = std::max({d, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
  }
  const double sqrt_n = std::sqrt(n);
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return std::clamp(q, 0.0, 1.0);
}

/// Output pattern probabilities for photons with internal states given by
/// the columns of `states` (Gram = states^dagger states). Each spatial mode is
/// expanded into rank(states) internal modes and every fine-grained Fock
/// state is summed as |perm|^2 / prod(r!).
inline std::vector<double> partial_probabilities(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& states,
                                                 const std::vector<std::size_t>& inputs,
                                                 const std::vector<std::vector<int>>& patterns) {
  const Eigen::Index modes = u.rows();
  const Eigen::Index internal = states.rows();
  const auto photons = static_cast<Eigen::Index>(inputs.size());
  Eigen::MatrixXcd w(modes * internal, photons);
  for (Eigen::Index j = 0; j < modes; ++j) {
    for (Eigen::Index a = 0; a < internal; ++a) {
      for (Eigen::Index k = 0; k < photons; ++k) {
        w(j * internal + a, k) = u(j, static_cast<Eigen::Index>(inputs[static_cast<std::size_t>(k)])) * states(a, k);
      }
    }
  }
  std::vector<double> out(patterns.size(), 0.0);
  for (const auto& fine : all_patterns(inputs.size(), static_cast<std::size_t>(modes * internal))) {
    std::vector<int> coarse(static_cast<std::size_t>(modes), 0);
    std::vector<Eigen::Index> rows;
    for (std::size_t f = 0; f < fine.size(); ++f) {
      coarse[f / static_cast<std::size_t>(internal)] += fine[f];
      for (int c = 0; c < fine[f]; ++c) rows.push_back(static_cast<Eigen::Index>(f));
    }
    Eigen::MatrixXcd sub(photons, photons);
    for (Eigen::Index r = 0; r < photons; ++r) sub.row(r) = w.row(rows[static_cast<std::size_t>(r)]);
    const double p = std::norm(permanent(sub)) / multiplicity(fine);
    for (std::size_t q = 0; q < patterns.size(); ++q) {
      if (patterns[q] == coarse) out[q] += p;
    }
  }
  return out;
}

/// Internal-state vectors V with V^dagger V = gram.
inline Eigen::MatrixXcd states_from_gram(const Eigen::MatrixXcd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return lambda.asDiagonal() * eig.eigenvectors().adjoint();
}

/// Random Gram matrix of n unit vectors in C^d with normally distributed
/// components.
template <class Rng>
Eigen::MatrixXcd random_gram(std::size_t photons, std::size_t internal, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd v(static_cast<Eigen::Index>(internal), static_cast<Eigen::Index>(photons));
  for (Eigen::Index a = 0; a < v.rows(); ++a) {
    for (Eigen::Index k = 0; k < v.cols(); ++k) v(a, k) = {normal(rng), normal(rng)};
  }
  v.colwise().normalize();
  Eigen::MatrixXcd s = v.adjoint() * v;
  for (Eigen::Index k = 0; k < s.rows(); ++k) s(k, k) = 1.0;
  return s;
}

/// <n_i n_j> - <n_i><n_j> from a list of patterns and probabilities.
inline double correlator(const std::vector<std::vector<int>>& patterns, const std::vector<double>& probs,
                         std::size_t i, std::size_t j) {
  double ni = 0.0, nj = 0.0, nij = 0.0;
  for (std::size_t q = 0; q < patterns.size(); ++q) {
    ni += probs[q] * patterns[q][i];
    nj += probs[q] * patterns[q][j];
    nij += probs[q] * patterns[q][i] * patterns[q][j];
  }
  return nij - ni * nj;
}

}  // namespace witness::oracle

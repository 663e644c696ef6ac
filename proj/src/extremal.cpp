#include "witness/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "witness/error.hpp"
#include "witness/parallel.hpp"

namespace witness {
namespace {

using Params = Eigen::VectorXd;

struct Rows {
  ComplexVector a;
  ComplexVector b;
};

// 4N reals -> two orthonormal complex rows (normalize a, project a out of b,
// normalize b).
Rows orthonormalize(const Params& x, Eigen::Index n) {
  Rows r{ComplexVector(n), ComplexVector(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    r.a(k) = Complex(x(k), x(n + k));
    r.b(k) = Complex(x(2 * n + k), x(3 * n + k));
  }
  r.a /= r.a.norm();
  for (int pass = 0; pass < 2; ++pass) r.b -= r.a.dot(r.b) * r.a;
  r.b /= r.b.norm();
  return r;
}

Params to_params(const Rows& r) {
  const Eigen::Index n = r.a.size();
  Params x(4 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x(k) = r.a(k).real();
    x(n + k) = r.a(k).imag();
    x(2 * n + k) = r.b(k).real();
    x(3 * n + k) = r.b(k).imag();
  }
  return x;
}

struct LocalResult {
  double value = -1e300;
  Rows rows;
  bool converged = false;
};

LocalResult ascend(Eigen::Index n, const std::function<double(const ComplexVector&, const ComplexVector&)>& objective,
                   Seed seed, std::size_t max_iterations) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Params x(4 * n);
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = normal(rng);

  auto eval = [&](const Params& p) {
    const Rows r = orthonormalize(p, n);
    return objective(r.a, r.b);
  };

  Rows rows = orthonormalize(x, n);
  x = to_params(rows);
  double f = objective(rows.a, rows.b);
  double step = 1.0;
  constexpr double kFiniteStep = 1e-6;
  constexpr double kArmijo = 1e-4;
  int stalls = 0;
  bool converged = false;
  Params grad(x.size());

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      Params up = x, down = x;
      up(k) += kFiniteStep;
      down(k) -= kFiniteStep;
      grad(k) = (eval(up) - eval(down)) / (2.0 * kFiniteStep);
    }
    const double g2 = grad.squaredNorm();
    if (g2 < 1e-24) {
      converged = true;
      break;
    }
    // Backtracking line search; the trial step grows after each success.
    step = std::min(step * 4.0, 1e6);
    double f_new = f;
    Params x_new;
    while (step > 1e-14) {
      x_new = x + step * grad;
      f_new = eval(x_new);
      if (f_new >= f + kArmijo * step * g2) break;
      step *= 0.5;
    }
    if (step <= 1e-14) {
      converged = true;
      break;
    }
    rows = orthonormalize(x_new, n);
    x = to_params(rows);
    const double improvement = f_new - f;
    f = f_new;
    stalls = improvement < 1e-15 ? stalls + 1 : 0;
    if (stalls >= 5) {
      converged = true;
      break;
    }
  }
  rows = orthonormalize(x, n);
  return LocalResult{objective(rows.a, rows.b), rows, converged};
}

std::vector<std::size_t> photon_columns(std::size_t modes, std::size_t photons) {
  return first_modes(std::min(modes, photons));
}

}  // namespace

SearchResult maximize_row_objective(std::size_t modes,
                                    const std::function<double(const ComplexVector&, const ComplexVector&)>& objective,
                                    const SearchOptions& options) {
  if (modes < 2) throw InvalidArgument("search needs at least two modes");
  if (options.restarts == 0) throw InvalidArgument("search needs at least one restart");
  const auto n = static_cast<Eigen::Index>(modes);
  std::vector<LocalResult> results(options.restarts);
  parallel_for(options.restarts, options.threads, [&](std::size_t r) {
    results[r] = ascend(n, objective, derive_seed(options.seed, r), options.max_iterations);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r) {
    if (results[r].value > results[best].value) best = r;
  }
  const LocalResult& winner = results[best];
  RowPair rows(winner.rows.a, winner.rows.b, 1e-10);
  std::vector<double> values(results.size());
  for (std::size_t r = 0; r < results.size(); ++r) values[r] = results[r].value;
  return SearchResult{winner.value, std::move(rows), options.restarts, winner.converged, best, std::move(values)};
}

SearchResult max_correlator_distinguishable(std::size_t modes, std::size_t photons, const SearchOptions& options) {
  if (photons < 2) throw InvalidArgument("invalid photon count: need n >= 2");
  if (modes < 2) throw InvalidArgument("invalid dimension: need N >= 2");
  const std::vector<std::size_t> columns = photon_columns(modes, photons);
  const DistinguishabilityGram s = DistinguishabilityGram::identity(columns.size());
  auto objective = [&](const ComplexVector& a, const ComplexVector& b) { return correlator_rows(a, b, s, columns); };
  return maximize_row_objective(modes, objective, options);
}

SearchResult max_correlator_indistinguishable(std::size_t photons, const SearchOptions& options) {
  if (photons < 2) throw InvalidArgument("invalid photon count: need n >= 2");
  const std::size_t modes = options.modes == 0 ? photons + 1 : options.modes;
  if (modes < photons || modes > photons + 3) {
    std::ostringstream msg;
    msg << "indistinguishable search dimension must lie in [n, n + 3], got " << modes;
    throw InvalidArgument(msg.str());
  }
  const std::vector<std::size_t> columns = first_modes(photons);
  const DistinguishabilityGram s = DistinguishabilityGram::ones(photons);
  auto objective = [&](const ComplexVector& a, const ComplexVector& b) { return correlator_rows(a, b, s, columns); };
  return maximize_row_objective(modes, objective, options);
}

double umax_profile_deviation(const RowPair& rows, std::size_t photons) {
  if (photons < 2 || rows.dim() <= photons) {
    throw InvalidArgument("profile comparison needs n >= 2 and at least n + 1 modes");
  }
  const double bulk = 1.0 / std::sqrt(2.0 * static_cast<double>(photons));
  double deviation = 0.0;
  for (const ComplexVector* row : {&rows.row_a(), &rows.row_b()}) {
    std::vector<double> mags;
    double tail = 0.0;
    for (Eigen::Index k = 0; k < row->size(); ++k) {
      if (static_cast<std::size_t>(k) < photons) {
        mags.push_back(std::abs((*row)(k)));
      } else {
        tail += std::norm((*row)(k));
      }
    }
    std::sort(mags.begin(), mags.end());
    for (double m : mags) deviation = std::max(deviation, std::abs(m - bulk));
    deviation = std::max(deviation, std::abs(tail - 0.5));
  }
  return deviation;
}

WitnessThresholds thresholds(std::size_t photons) {
  if (photons < 2) throw InvalidArgument("invalid photon count: thresholds need n >= 2");
  const double n = static_cast<double>(photons);
  auto quantum = [](double k) { return 0.25 - 1.0 / (2.0 * k); };
  return WitnessThresholds{0.0, quantum(n), quantum(n + 1.0) - quantum(n)};
}

}  // namespace witness

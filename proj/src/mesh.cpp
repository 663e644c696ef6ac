#include "witness/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "witness/error.hpp"

namespace witness {
namespace {

using std::numbers::pi;
constexpr double kTwoPi = 2.0 * pi;
constexpr double kNegligible = 1e-14;

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

// (-pi, pi]
double wrap_symmetric(double angle) {
  double w = wrap_two_pi(angle);
  if (w > pi) w -= kTwoPi;
  return w;
}

double arg_or_zero(Complex z) { return std::abs(z) > 0.0 ? std::arg(z) : 0.0; }

// Cell parameters nulling W(row, col) by W <- W T^dagger on columns (col, col + 1).
MeshCell null_from_right(const ComplexMatrix& w, Eigen::Index row, Eigen::Index col) {
  const Complex a = w(row, col);
  const Complex b = w(row, col + 1);
  MeshCell cell;
  cell.mode = static_cast<std::size_t>(col);
  if (std::abs(a) < kNegligible) {
    cell.theta = pi;
    cell.phi = pi;
  } else {
    cell.theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    cell.phi = wrap_two_pi(std::arg(a) - arg_or_zero(b) - pi);
  }
  return cell;
}

// Cell parameters nulling W(row, col) by W <- T W on rows (row - 1, row).
MeshCell null_from_left(const ComplexMatrix& w, Eigen::Index row, Eigen::Index col) {
  const Complex a = w(row - 1, col);
  const Complex b = w(row, col);
  MeshCell cell;
  cell.mode = static_cast<std::size_t>(row - 1);
  if (std::abs(b) < kNegligible) {
    cell.theta = pi;
    cell.phi = pi;
  } else {
    cell.theta = 2.0 * std::atan2(std::abs(a), std::abs(b));
    cell.phi = wrap_two_pi(std::arg(b) - arg_or_zero(a));
  }
  return cell;
}

void apply_left(ComplexMatrix& w, const MeshCell& cell, bool adjoint = false) {
  const Eigen::Matrix2cd t = adjoint ? Eigen::Matrix2cd(cell_transfer(cell.theta, cell.phi).adjoint())
                                     : cell_transfer(cell.theta, cell.phi);
  const auto m = static_cast<Eigen::Index>(cell.mode);
  const ComplexMatrix rows = w.middleRows(m, 2);
  w.middleRows(m, 2) = t * rows;
}

void apply_right_adjoint(ComplexMatrix& w, const MeshCell& cell) {
  const Eigen::Matrix2cd t = cell_transfer(cell.theta, cell.phi);
  const auto m = static_cast<Eigen::Index>(cell.mode);
  const ComplexMatrix cols = w.middleCols(m, 2);
  w.middleCols(m, 2) = cols * t.adjoint();
}

struct PhasedCell {
  double alpha = 0.0;  // output phase on the upper mode
  double beta = 0.0;   // output phase on the lower mode
  double theta = 0.0;
  double phi = 0.0;
};

// Writes a 2x2 unitary as diag(e^{i alpha}, e^{i beta}) T(theta, phi).
PhasedCell split_output_phases(const Eigen::Matrix2cd& m) {
  PhasedCell out;
  const double s = std::abs(m(0, 0));
  const double c = std::abs(m(0, 1));
  out.theta = 2.0 * std::atan2(s, c);
  const Complex g = Complex(0.0, 1.0) * std::polar(1.0, out.theta / 2.0);
  if (c >= s) {
    out.alpha = arg_or_zero(m(0, 1) / g);
    out.phi = arg_or_zero(m(0, 0) / g) - out.alpha;
    out.beta = arg_or_zero(m(1, 0) / g) - out.phi;
  } else {
    const double upper = arg_or_zero(m(0, 0) / g);  // alpha + phi
    out.beta = arg_or_zero(-m(1, 1) / g);
    out.phi = c > kNegligible ? upper - arg_or_zero(m(0, 1) / g) : pi;
    out.alpha = upper - out.phi;
  }
  out.phi = wrap_two_pi(out.phi);
  return out;
}

void assign_layers(MeshProgram& program) {
  std::vector<int> depth(program.dim, 0);
  for (auto& cell : program.cells) {
    cell.layer = std::max(depth[cell.mode], depth[cell.mode + 1]);
    depth[cell.mode] = depth[cell.mode + 1] = cell.layer + 1;
  }
  std::stable_sort(program.cells.begin(), program.cells.end(),
                   [](const MeshCell& a, const MeshCell& b) { return a.layer < b.layer; });
}

void validate(const MeshProgram& program) {
  if (program.dim == 0) throw InvalidArgument("mesh program must have dim >= 1");
  if (program.output_phases.size() != program.dim) {
    std::ostringstream msg;
    msg << "mesh program has " << program.output_phases.size() << " output phases for " << program.dim
        << " modes";
    throw InvalidArgument(msg.str());
  }
  for (const auto& cell : program.cells) {
    if (cell.mode + 1 >= program.dim) {
      std::ostringstream msg;
      msg << "cell on modes (" << cell.mode << ", " << cell.mode + 1 << ") out of range for " << program.dim
          << " modes";
      throw InvalidArgument(msg.str());
    }
  }
}

}  // namespace

Eigen::Matrix2cd cell_transfer(double theta, double phi) {
  const Complex prefactor = Complex(0.0, 1.0) * std::polar(1.0, theta / 2.0);
  const Complex phase = std::polar(1.0, phi);
  const double s = std::sin(theta / 2.0);
  const double c = std::cos(theta / 2.0);
  Eigen::Matrix2cd t;
  t << phase * s, c,
       phase * c, -s;
  return prefactor * t;
}

MeshProgram decompose(const InterferometerMatrix& u) {
  const auto n = static_cast<Eigen::Index>(u.dim());
  ComplexMatrix w = u.entries();
  std::vector<MeshCell> right;
  std::vector<MeshCell> left;

  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (i % 2 == 0) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        const MeshCell cell = null_from_right(w, n - 1 - j, i - j);
        apply_right_adjoint(w, cell);
        right.push_back(cell);
      }
    } else {
      for (Eigen::Index j = 1; j <= i + 1; ++j) {
        const MeshCell cell = null_from_left(w, n + j - i - 2, j - 1);
        apply_left(w, cell);
        left.push_back(cell);
      }
    }
  }

  // w is now diagonal: U = L_1^dag ... L_k^dag D R_m ... R_1. Move each L^dag
  // through D, innermost first: L^dag D = D' T'.
  Eigen::VectorXcd diag = w.diagonal();
  MeshProgram program;
  program.dim = u.dim();
  program.cells = right;
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    const auto m = static_cast<Eigen::Index>(it->mode);
    const Eigen::Matrix2cd block =
        cell_transfer(it->theta, it->phi).adjoint() * Eigen::Vector2cd(diag(m), diag(m + 1)).asDiagonal();
    const PhasedCell split = split_output_phases(block);
    diag(m) = std::polar(1.0, split.alpha);
    diag(m + 1) = std::polar(1.0, split.beta);
    program.cells.push_back(MeshCell{0, it->mode, split.theta, split.phi});
  }
  program.output_phases.resize(u.dim());
  for (Eigen::Index k = 0; k < n; ++k) {
    program.output_phases[static_cast<std::size_t>(k)] = wrap_symmetric(std::arg(diag(k)));
  }
  assign_layers(program);

  const double residual = (reconstruct(program).entries() - u.entries()).norm();
  if (!(residual < kUnitarityTolerance)) {
    std::ostringstream msg;
    msg << "mesh decomposition lost accuracy: ||U - reconstruct||_F = " << residual;
    throw StatisticalError(msg.str());
  }
  return program;
}

InterferometerMatrix reconstruct(const MeshProgram& program) {
  validate(program);
  const auto n = static_cast<Eigen::Index>(program.dim);
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  for (const auto& cell : program.cells) apply_left(m, cell);
  for (Eigen::Index k = 0; k < n; ++k) {
    m.row(k) *= std::polar(1.0, program.output_phases[static_cast<std::size_t>(k)]);
  }
  return InterferometerMatrix(std::move(m));
}

MeshProgram canonicalize(MeshProgram program) {
  validate(program);
  // pending[k]: phase picked up on mode k that still has to be applied
  // downstream of the cells processed so far.
  std::vector<double> pending(program.dim, 0.0);
  for (auto& cell : program.cells) {
    const std::size_t m = cell.mode;
    // T(theta, phi) diag(e^{ia}, e^{ib}) = e^{ib} T(theta, phi + a - b)
    cell.phi += pending[m] - pending[m + 1];
    pending[m] = pending[m + 1];
    double theta = wrap_two_pi(cell.theta);
    if (theta > pi) {
      // T(2 pi - t, phi) = T(-t, phi) = e^{-it} diag(1, -1) T(t, phi + pi)
      const double reflected = kTwoPi - theta;
      theta = reflected;
      cell.phi += pi;
      pending[m] -= reflected;
      pending[m + 1] += pi - reflected;
    }
    cell.theta = theta;
    cell.phi = wrap_two_pi(cell.phi);
  }
  for (std::size_t k = 0; k < program.dim; ++k) {
    program.output_phases[k] = wrap_symmetric(program.output_phases[k] + pending[k]);
  }
  return program;
}

MeshProgram perturb_phases(const MeshProgram& program, double sigma, Seed seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("phase noise sigma must be non-negative");
  validate(program);
  if (sigma == 0.0) return program;
  MeshProgram noisy = program;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (auto& cell : noisy.cells) {
    const double dtheta = normal(rng);
    const double dphi = normal(rng);
    cell.theta += dtheta;
    cell.phi += dphi;
  }
  return canonicalize(std::move(noisy));
}

double mean_noisy_fidelity(const MeshProgram& program, double sigma, std::size_t trials, Seed seed) {
  if (trials == 0) throw InvalidArgument("need at least one noise realization");
  const InterferometerMatrix clean = reconstruct(program);
  double sum = 0.0;
  for (std::size_t r = 0; r < trials; ++r) {
    sum += fidelity(clean, reconstruct(perturb_phases(program, sigma, derive_seed(seed, r))));
  }
  return sum / static_cast<double>(trials);
}

double calibrate_noise_to_fidelity(const InterferometerMatrix& u, double target_fidelity, std::size_t trials,
                                   Seed seed) {
  if (!(target_fidelity > 0.0 && target_fidelity <= 1.0)) {
    std::ostringstream msg;
    msg << "target fidelity must lie in (0, 1], got " << target_fidelity;
    throw InvalidArgument(msg.str());
  }
  if (target_fidelity == 1.0) return 0.0;
  const MeshProgram program = decompose(u);
  constexpr double kTolerance = 0.002;
  constexpr double kMaxSigma = 4.0 * pi;

  double lo = 0.0;
  double hi = 0.05;
  double f_hi = mean_noisy_fidelity(program, hi, trials, seed);
  while (f_hi > target_fidelity) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxSigma) {
      std::ostringstream msg;
      msg << "target fidelity " << target_fidelity << " is not reachable with phase noise";
      throw StatisticalError(msg.str());
    }
    f_hi = mean_noisy_fidelity(program, hi, trials, seed);
  }
  if (std::abs(f_hi - target_fidelity) <= kTolerance / 4.0) return hi;
  for (int iter = 0; iter < 100; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mean_noisy_fidelity(program, mid, trials, seed);
    if (std::abs(f_mid - target_fidelity) <= kTolerance / 4.0) return mid;
    if (f_mid > target_fidelity) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double sigma = 0.5 * (lo + hi);
  const double achieved = mean_noisy_fidelity(program, sigma, trials, seed);
  if (std::abs(achieved - target_fidelity) > kTolerance) {
    std::ostringstream msg;
    msg << "noise calibration did not converge: fidelity " << achieved << " vs target " << target_fidelity;
    throw StatisticalError(msg.str());
  }
  return sigma;
}

}  // namespace witness

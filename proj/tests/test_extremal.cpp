#include <cmath>

#include <gtest/gtest.h>

#include "witness/error.hpp"
#include "witness/extremal.hpp"

namespace witness {
namespace {

double reevaluate_indist(const SearchResult& r, std::size_t photons) {
  return correlator_rows(r.best_rows.row_a(), r.best_rows.row_b(), DistinguishabilityGram::ones(photons),
                         first_modes(photons));
}

TEST(Thresholds, Values) {
  EXPECT_DOUBLE_EQ(thresholds(3).c_quantum, 1.0 / 12.0);
  EXPECT_DOUBLE_EQ(thresholds(3).c_classical, 0.0);
  EXPECT_DOUBLE_EQ(thresholds(2).c_quantum, 0.0);
  EXPECT_NEAR(thresholds(3).certification_gap, 1.0 / 8.0 - 1.0 / 12.0, 1e-15);
  const double n = 200.0;
  EXPECT_NEAR(thresholds(200).certification_gap * 2.0 * n * n, 1.0, 0.01);
  EXPECT_THROW(thresholds(1), InvalidArgument);
}

TEST(DistinguishableSearch, FourModesThreePhotons) {
  const auto r = max_correlator_distinguishable(4, 3, {.restarts = 20, .seed = 1});
  EXPECT_NEAR(r.best_value, 0.0, 1e-9);
  EXPECT_LE(r.best_value, 1e-9);
  EXPECT_EQ(r.restart_values.size(), 20u);
}

TEST(DistinguishableSearch, TwoModes) {
  const auto r = max_correlator_distinguishable(2, 2, {.restarts = 20, .seed = 2});
  EXPECT_NEAR(r.best_value, 0.0, 1e-9);
}

TEST(DistinguishableSearch, ReportedValueReproduced) {
  const auto r = max_correlator_distinguishable(5, 3, {.restarts = 10, .seed = 3});
  const double again = correlator_rows(r.best_rows.row_a(), r.best_rows.row_b(), DistinguishabilityGram::identity(3),
                                       first_modes(3));
  EXPECT_NEAR(r.best_value, again, 1e-10);
}

TEST(IndistinguishableSearch, ThreePhotonsReachUMax) {
  const auto r = max_correlator_indistinguishable(3, {.restarts = 20, .seed = 4});
  EXPECT_NEAR(r.best_value, 1.0 / 12.0, 1e-6);
  EXPECT_LE(r.best_value, 1.0 / 12.0 + 1e-8);
  EXPECT_LT(umax_profile_deviation(r.best_rows, 3), 1e-4);
  EXPECT_NEAR(reevaluate_indist(r, 3), r.best_value, 1e-10);
}

TEST(IndistinguishableSearch, TwoPhotonsStayAtZero) {
  const auto r = max_correlator_indistinguishable(2, {.restarts = 20, .seed = 5});
  EXPECT_NEAR(r.best_value, 0.0, 1e-6);
}

TEST(IndistinguishableSearch, ExtraModesDoNotHelp) {
  const auto small = max_correlator_indistinguishable(4, {.restarts = 20, .seed = 6, .modes = 5});
  const auto large = max_correlator_indistinguishable(4, {.restarts = 20, .seed = 6, .modes = 7});
  EXPECT_NEAR(small.best_value, large.best_value, 1e-6);
  EXPECT_THROW(max_correlator_indistinguishable(4, {.restarts = 2, .modes = 8}), InvalidArgument);
}

TEST(Search, ThreadCountDoesNotChangeResult) {
  const auto a = max_correlator_indistinguishable(3, {.restarts = 8, .seed = 7, .threads = 1});
  const auto b = max_correlator_indistinguishable(3, {.restarts = 8, .seed = 7, .threads = 4});
  EXPECT_EQ(a.best_value, b.best_value);
  EXPECT_EQ(a.best_restart, b.best_restart);
  EXPECT_EQ(a.restart_values, b.restart_values);
}

TEST(Search, BestRowsAreOrthonormal) {
  const auto r = max_correlator_indistinguishable(4, {.restarts = 5, .seed = 8});
  EXPECT_NEAR(r.best_rows.row_a().norm(), 1.0, 1e-10);
  EXPECT_NEAR(r.best_rows.row_b().norm(), 1.0, 1e-10);
  EXPECT_LT(std::abs(r.best_rows.row_a().dot(r.best_rows.row_b())), 1e-10);
}

TEST(ProfileDeviation, ZeroForUMaxRows) {
  for (std::size_t n = 2; n <= 6; ++n) EXPECT_LT(umax_profile_deviation(u_max_rows(n), n), 1e-14);
  ComplexVector a = ComplexVector::Zero(4), b = ComplexVector::Zero(4);
  a(0) = 1.0;
  b(1) = 1.0;
  EXPECT_GT(umax_profile_deviation(RowPair(a, b), 3), 0.1);
}

TEST(GenericAscent, FindsKnownMaximum) {
  // |<e_0|a>|^2 peaks at 1.
  const auto r = maximize_row_objective(
      3, [](const ComplexVector& a, const ComplexVector&) { return std::norm(a(0)); }, {.restarts = 3, .seed = 1});
  EXPECT_NEAR(r.best_value, 1.0, 1e-8);
}

}  // namespace
}  // namespace witness

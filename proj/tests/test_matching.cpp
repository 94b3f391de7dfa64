#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaussrd/matching.hpp"
#include "gaussrd/rate_region.hpp"
#include "gaussrd/waterfill.hpp"
#include "test_support.hpp"

using namespace gaussrd;
namespace gt = gaussrd::testing;

TEST_CASE("max information eigenvalue") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  CHECK(max_information_eigenvalue(gt::m1(), one) ==
        doctest::Approx(3.0).epsilon(1e-12));
  Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(max_information_eigenvalue(gt::m2(), i2) ==
        doctest::Approx(5.0).epsilon(1e-12));

  SourceModel blind = gt::m2();
  blind.a.setZero();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      inverse_pd(blind.sigma_x), Eigen::EigenvaluesOnly);
  CHECK(max_information_eigenvalue(blind, i2) ==
        doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-10));
}

TEST_CASE("direction terms") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd u(2);
  u << 0.3, 0.8;
  DirectionTerms t = direction_terms(gt::m1(), one, 0, u);
  CHECK(t.eta == doctest::Approx(1.0 + u[1]).epsilon(1e-12));
  CHECK(t.chi == doctest::Approx(2.0 + u[1]).epsilon(1e-12));

  Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  t = direction_terms(gt::m2(), i2, 0, u);
  CHECK(t.eta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.chi == doctest::Approx(2.0).epsilon(1e-12));

  // zero u: only the prior term survives
  Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
  t = direction_terms(gt::m2(), i2, 1, z);
  CHECK(t.eta == doctest::Approx(1.0).epsilon(1e-12));

  SourceModel degenerate = gt::m2();
  degenerate.a.row(0).setZero();
  CHECK_THROWS_AS(direction_terms(degenerate, i2, 0, u), ZeroObservationRow);
}

TEST_CASE("eta does not depend on the indexed precision") {
  gt::Stream s(41);
  for (int trial = 0; trial < 25; ++trial) {
    int k = s.uniform_int(1, 3), l = s.uniform_int(2, 4);
    SourceModel m = gt::random_model(s, k, l);
    Eigen::MatrixXd gamma = gt::random_pd(s, k);
    Eigen::VectorXd u(l);
    for (int i = 0; i < l; ++i) u[i] = s.uniform(0.0, 1.0 / m.noise_var[i]);
    for (int i = 0; i < l; ++i) {
      DirectionTerms a = direction_terms(m, gamma, i, u);
      Eigen::VectorXd u2 = u;
      u2[i] = s.uniform(0.0, 1.0 / m.noise_var[i]);
      DirectionTerms b = direction_terms(m, gamma, i, u2);
      CHECK(a.eta == b.eta);  // exact: the i-th term is excluded
    }
  }
}

TEST_CASE("spread condition") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  Eigen::VectorXd u(2);
  u << 0.5, 0.5;
  CHECK(spread_condition_holds(gt::m1(), one, u));  // single eigenvalue

  Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd u2(2);
  u2 << 0.5, 2.0;
  CHECK_FALSE(spread_condition_holds(gt::m2(), i2, u2));
}

TEST_CASE("eigenvalue sandwich on random instances") {
  gt::Stream s(42);
  for (int trial = 0; trial < 25; ++trial) {
    int k = s.uniform_int(1, 3), l = s.uniform_int(2, 4);
    SourceModel m = gt::random_model(s, k, l);
    Eigen::MatrixXd gamma = gt::random_pd(s, k);
    Eigen::VectorXd u(l);
    for (int i = 0; i < l; ++i) u[i] = s.uniform(0.0, 1.0 / m.noise_var[i]);
    Eigen::VectorXd alphas = information_spectrum_u(m, gamma, u);
    Eigen::MatrixXd ahat = m.a * gamma.inverse();
    for (int i = 0; i < l; ++i) {
      DirectionTerms t = direction_terms(m, gamma, i, u);
      double mid = ahat.row(i).squaredNorm() * u[i] + t.eta;
      CHECK(mid >= alphas.minCoeff() - 1e-9);
      CHECK(mid <= alphas.maxCoeff() + 1e-9);
    }
  }
}

TEST_CASE("spectrum derivatives match the direction norms") {
  gt::Stream s(43);
  for (int trial = 0; trial < 20; ++trial) {
    int k = s.uniform_int(1, 3), l = s.uniform_int(2, 4);
    SourceModel m = gt::random_model(s, k, l);
    Eigen::MatrixXd gamma = gt::random_pd(s, k);
    Eigen::VectorXd u(l);
    for (int i = 0; i < l; ++i)
      u[i] = s.uniform(0.1, 0.9) / m.noise_var[i];
    Eigen::MatrixXd ahat = m.a * gamma.inverse();
    const double h = 1e-6;
    for (int i = 0; i < l; ++i) {
      Eigen::VectorXd up = u, dn = u;
      up[i] += h;
      dn[i] -= h;
      Eigen::VectorXd fp = information_spectrum_u(m, gamma, up);
      Eigen::VectorXd fm = information_spectrum_u(m, gamma, dn);
      double total = 0.0;
      for (int j = 0; j < k; ++j) {
        double deriv = (fp[j] - fm[j]) / (2.0 * h);
        CHECK(deriv >= -1e-8);
        total += deriv;
      }
      double expect = ahat.row(i).squaredNorm();
      CHECK(std::abs(total - expect) <= 1e-4 * (1.0 + expect));
    }
  }
}

TEST_CASE("monotone decrease scan") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  CHECK(monotone_decrease_scan(gt::m1(), one, 0.6).holds);

  // single observation: the decay factor always dominates once feasible
  SourceModel scalar;
  scalar.k = scalar.l = 1;
  scalar.sigma_x = Eigen::MatrixXd::Constant(1, 1, 1.0);
  scalar.a = Eigen::MatrixXd::Constant(1, 1, 1.0);
  scalar.noise_var = Eigen::VectorXd::Constant(1, 0.5);
  scalar = validate_model(scalar);
  CHECK(monotone_decrease_scan(scalar, one, 0.8).holds);

  // the second instance's trace bound is 0.7: budgets at or below it give
  // an empty feasible set
  Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(monotone_decrease_scan(gt::m2(), i2, 0.66), InfeasibleSpec);

  // regression values established by this scan
  CHECK(monotone_decrease_scan(gt::m2(), i2, 0.8).holds);
  MdScanResult broken = monotone_decrease_scan(gt::m2(), i2, 1.2);
  CHECK_FALSE(broken.holds);
  CHECK(broken.violation_axis >= 0);

  CHECK_THROWS_AS(monotone_decrease_scan(gt::m1(), one, 0.3), InfeasibleSpec);
}

TEST_CASE("sufficient matching verdicts") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  MatchReport rep = sufficient_matching(gt::m1(), one, 0.5);
  CHECK(rep.verdict == MatchReport::Verdict::Matched);
  CHECK(rep.feasible_lower == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(rep.threshold == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK(sufficient_matching(gt::m1(), one, 0.7).verdict ==
        MatchReport::Verdict::Unknown);
  CHECK(sufficient_matching(gt::m1(), one, 0.3).verdict ==
        MatchReport::Verdict::Infeasible);
}

TEST_CASE("matched verdicts imply coinciding bounds") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  for (double d : {0.45, 0.55, 0.65}) {
    MatchReport rep = sufficient_matching(gt::m1(), one, d);
    REQUIRE(rep.verdict == MatchReport::Verdict::Matched);
    SumRateResult inner = sum_rate_inner(gt::m1(), SumDistortion{one, d});
    SumRateResult outer = sum_rate_outer(gt::m1(), SumDistortion{one, d});
    CHECK(std::abs(inner.value - outer.value) <= 1e-4);
  }
}

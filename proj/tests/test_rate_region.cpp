#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gaussrd/rate_region.hpp"
#include "gaussrd/waterfill.hpp"
#include "test_support.hpp"

using namespace gaussrd;
namespace gt = gaussrd::testing;

namespace {
const SubsetMask kFull2 = 0b11;
}

TEST_CASE("lower rate bound") {
  SourceModel m = gt::m1();
  RateAllocation r = gt::half_log2_rates(2);
  CHECK(lower_rate_bound(m, kFull2, 0.5, r) ==
        doctest::Approx(0.5 * std::log(8.0)).epsilon(1e-12));
  CHECK(lower_rate_bound(m, kFull2, 1.0,
                         RateAllocation(Eigen::VectorXd::Zero(2))) == 0.0);
  CHECK(lower_rate_bound(m, 0b01, 0.5, r) ==
        doctest::Approx(0.5 * std::log(8.0 / 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(lower_rate_bound(m, 0, 0.5, r), EmptySubset);
  CHECK_THROWS_AS(lower_rate_bound(m, kFull2, 0.0, r), NonpositiveTheta);
}

TEST_CASE("upper rate bound") {
  SourceModel m = gt::m1();
  RateAllocation r = gt::half_log2_rates(2);
  CHECK(upper_rate_bound(m, kFull2, r) ==
        doctest::Approx(0.5 * std::log(8.0)).epsilon(1e-12));
  CHECK(upper_rate_bound(m, 0b01, r) ==
        doctest::Approx(0.5 * std::log(8.0 / 3.0)).epsilon(1e-12));
  // exactly zero when the subset carries no rate
  Eigen::VectorXd mixed(2);
  mixed << 0.0, 0.7;
  CHECK(upper_rate_bound(m, 0b01, RateAllocation(mixed)) == 0.0);
  CHECK_THROWS_AS(upper_rate_bound(m, 0, r), EmptySubset);
}

TEST_CASE("feasibility") {
  SourceModel m = gt::m1();
  RateAllocation r = gt::half_log2_rates(2);
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(1, 1, 0.5);
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  CHECK(feasible(m, MatrixDistortion{half}, r));
  CHECK_FALSE(feasible(m, MatrixDistortion{half},
                       RateAllocation(Eigen::VectorXd::Zero(2))));
  CHECK(feasible(m, SumDistortion{one, 0.5}, r));
}

TEST_CASE("per-allocation polyhedra") {
  SourceModel m = gt::m1();
  RateAllocation r = gt::half_log2_rates(2);
  Eigen::VectorXd v(2);
  v << 0.52, 0.52;
  CHECK(polyhedron_contains(m, RateVector(v), r, 0.5));
  v << 0.52, 0.51;
  CHECK_FALSE(polyhedron_contains(m, RateVector(v), r, 0.5));
  RateAllocation zero(Eigen::VectorXd::Zero(2));
  CHECK(polyhedron_contains(m, RateVector(Eigen::VectorXd::Zero(2)), zero, 1.0));
}

TEST_CASE("co-polymatroid laws on the unit instance") {
  SourceModel m = gt::m1();
  RateAllocation r = gt::half_log2_rates(2);
  CHECK(copolymatroid_violations(m, r, std::nullopt).empty());
  CHECK(copolymatroid_violations(m, RateAllocation(Eigen::VectorXd::Zero(2)),
                                 std::nullopt)
            .empty());
  CHECK(copolymatroid_violations(m, r, 0.5).empty());

  SubsetFunction f = subset_bounds(m, r, std::nullopt);
  CHECK(f(0b01) == doctest::Approx(0.490414626505863).epsilon(1e-9));
  CHECK(f(0b11) == doctest::Approx(1.0397207708399179).epsilon(1e-9));
}

TEST_CASE("co-polymatroid laws on random instances") {
  gt::Stream s(31);
  for (int trial = 0; trial < 30; ++trial) {
    int k = s.uniform_int(1, 3), l = s.uniform_int(2, 4);
    SourceModel m = gt::random_model(s, k, l);
    RateAllocation r = gt::random_rates(s, l);
    CHECK(copolymatroid_violations(m, r, std::nullopt).empty());
    // a budget the allocation satisfies: inflate the achieved error matrix
    Eigen::VectorXd u = scaled_noise_precisions(m, r);
    Eigen::MatrixXd err = inverse_pd(information_matrix(m, u));
    Eigen::MatrixXd sigma_d = err + gt::random_pd(s, k, 0.05);
    CHECK(copolymatroid_violations(m, r, sigma_d.determinant()).empty());
  }
}

TEST_CASE("sum rate inner") {
  SourceModel m = gt::m1();
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  SumRateResult res = sum_rate_inner(m, SumDistortion{one, 0.5});
  CHECK(res.value == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-7));
  CHECK(res.argmin.r[0] == doctest::Approx(gt::kHalfLog2).epsilon(1e-3));
  CHECK(res.argmin.r[1] == doctest::Approx(gt::kHalfLog2).epsilon(1e-3));

  CHECK(sum_rate_inner(m, SumDistortion{one, 1.0}).value == 0.0);
  CHECK(sum_rate_inner(m, SumDistortion{one, 1.5}).value == 0.0);
  CHECK_THROWS_AS(sum_rate_inner(m, SumDistortion{one, 1.0 / 3.0}),
                  InfeasibleSpec);
}

TEST_CASE("sum rate outer") {
  SourceModel m = gt::m1();
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  SumRateResult res = sum_rate_outer(m, SumDistortion{one, 0.5});
  CHECK(res.value == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-7));
  CHECK(sum_rate_outer(m, SumDistortion{one, 1.0}).value == 0.0);

  // the second instance sits exactly at the nonvoidness threshold at 0.7:
  // the strict rule reports it infeasible
  SourceModel m2 = gt::m2();
  Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(sum_rate_inner(m2, SumDistortion{i2, 0.7}), InfeasibleSpec);

  SumRateResult inner = sum_rate_inner(m2, SumDistortion{i2, 0.8});
  SumRateResult outer = sum_rate_outer(m2, SumDistortion{i2, 0.8});
  CHECK(outer.value <= inner.value + 1e-9);
}

TEST_CASE("membership certificates") {
  SourceModel m = gt::m1();
  Eigen::MatrixXd half = Eigen::MatrixXd::Constant(1, 1, 0.5);
  Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);

  Eigen::VectorXd big(2);
  big << 2.0, 2.0;
  MembershipVerdict v =
      membership_verdict(m, RateVector(big), MatrixDistortion{half});
  CHECK(v.kind == MembershipVerdict::Kind::InnerCertified);

  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  v = membership_verdict(m, RateVector(zero), MatrixDistortion{half});
  CHECK(v.kind == MembershipVerdict::Kind::ExcludedHeuristic);
  CHECK(v.margin >= gt::kHalfLog2 - 1e-9);

  v = membership_verdict(m, RateVector(zero), MatrixDistortion{one});
  CHECK(v.kind == MembershipVerdict::Kind::InnerCertified);
  CHECK(v.witness.r.cwiseAbs().maxCoeff() < 1e-9);
  // the outer polyhedron also contains the zero point at r = 0
  RateAllocation r0(Eigen::VectorXd::Zero(2));
  CHECK(polyhedron_contains(m, RateVector(zero), r0, 1.0));
}

TEST_CASE("bound ordering on random feasible instances") {
  gt::Stream s(32);
  for (int trial = 0; trial < 30; ++trial) {
    int k = s.uniform_int(1, 3), l = s.uniform_int(2, 4);
    SourceModel m = gt::random_model(s, k, l);
    RateAllocation r = gt::random_rates(s, l);
    Eigen::VectorXd u = scaled_noise_precisions(m, r);
    Eigen::MatrixXd err = inverse_pd(information_matrix(m, u));
    Eigen::MatrixXd sigma_d = err + gt::random_pd(s, k, 0.05);
    double theta = sigma_d.determinant();
    for (SubsetMask mask = 1; mask < (1u << l); ++mask) {
      CHECK(lower_rate_bound(m, mask, theta, r) <=
            upper_rate_bound(m, mask, r) + 1e-10);
    }
  }
}

TEST_CASE("relabeling invariance") {
  gt::Stream s(33);
  SourceModel m = gt::random_model(s, 2, 3);
  RateAllocation r = gt::random_rates(s, 3);
  // rotate the observations by one position
  std::vector<int> perm = {1, 2, 0};
  SourceModel pm = m;
  RateAllocation pr = r;
  for (int i = 0; i < 3; ++i) {
    pm.a.row(i) = m.a.row(perm[i]);
    pm.noise_var[i] = m.noise_var[perm[i]];
    pr.r[i] = r.r[perm[i]];
  }
  for (SubsetMask mask = 1; mask < 8; ++mask) {
    SubsetMask pmask = 0;
    for (int i = 0; i < 3; ++i)
      if (mask & (1u << perm[i])) pmask |= (1u << i);
    CHECK(upper_rate_bound(pm, pmask, pr) ==
          doctest::Approx(upper_rate_bound(m, mask, r)).epsilon(1e-10));
    CHECK(lower_rate_bound(pm, pmask, 0.9, pr) ==
          doctest::Approx(lower_rate_bound(m, mask, 0.9, r)).epsilon(1e-10));
  }
}

TEST_CASE("greedy corners lie in the inner polyhedron") {
  gt::Stream s(34);
  for (int trial = 0; trial < 15; ++trial) {
    int l = s.uniform_int(2, 4);
    SourceModel m = gt::random_model(s, 2, l);
    RateAllocation r = gt::random_rates(s, l);
    std::vector<int> order(l);
    for (int i = 0; i < l; ++i) order[i] = i;
    for (int rot = 0; rot < l; ++rot) {
      std::rotate(order.begin(), order.begin() + 1, order.end());
      RateVector corner = corner_point(m, r, order);
      CHECK(polyhedron_contains(m, corner, r, std::nullopt));
    }
  }
}

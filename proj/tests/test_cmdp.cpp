#include "rescrl/cmdp.hpp"
#include "rescrl/environments.hpp"
#include "rescrl/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace rescrl;
using namespace testing_support;

namespace {

bool mentions(const std::vector<std::string>& report, const std::string& needle) {
  return std::any_of(report.begin(), report.end(),
                     [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

Cmdp random_model(std::uint64_t seed, int S, int A, int m) {
  return gen_random_cmdp({seed, S, A, m, 0.9, 0.0});
}

}  // namespace

TEST_CASE("validate_cmdp") {
  SUBCASE("valid random model") { CHECK(validate_cmdp(random_model(3, 5, 3, 2)).empty()); }
  SUBCASE("transition row summing to 0.9 names the row") {
    Cmdp m = random_model(3, 4, 2, 1);
    m.transitions.row(m.row(2, 1)) *= 0.9;
    const auto report = validate_cmdp(m);
    REQUIRE(report.size() == 1);
    CHECK(mentions(report, "(s=2,a=1)"));
  }
  SUBCASE("zero threshold names the threshold bound") {
    Cmdp m = random_model(3, 4, 2, 1);
    m.thresholds[0] = 0.0;
    CHECK(mentions(validate_cmdp(m), "threshold 0"));
  }
  SUBCASE("stale translated utilities") {
    Cmdp m = random_model(3, 4, 2, 1);
    m.translated[0](0, 0) += 0.5;
    CHECK(mentions(validate_cmdp(m), "translated utility 0"));
  }
  SUBCASE("make_cmdp rejects invalid input") {
    CHECK_THROWS_AS(make_cmdp(0.9, Vector::Ones(1), Matrix::Constant(1, 1, 0.5),
                              Matrix::Ones(1, 1), {}, {}),
                    ConfigError);
  }
  SUBCASE("rho with zero entries is accepted") {
    Vector rho(2);
    rho << 1.0, 0.0;
    CHECK(validate_cmdp(two_state_cycle(0.5, rho)).empty());
  }
}

TEST_CASE("translate_constraints") {
  const Matrix ones = Matrix::Ones(2, 3);
  auto first = [](const std::vector<Matrix>& g) { return g.at(0); };
  CHECK(first(translate_constraints({ones}, {10.0}, 0.9)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(first(translate_constraints({0.5 * ones}, {5.0}, 0.9)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((first(translate_constraints({ones}, {1.0}, 0.9)).array() - 0.9).abs().maxCoeff() <
        1e-15);
  CHECK_THROWS_AS(translate_constraints({ones}, {0.0}, 0.9), std::domain_error);
  CHECK_THROWS_AS(translate_constraints({ones}, {10.5}, 0.9), std::domain_error);
}

TEST_CASE("evaluate_policy closed forms") {
  SUBCASE("single state geometric series") {
    const auto vb = evaluate_policy(single_state(0.9, 1.0), Policy::uniform(1, 1));
    CHECK(vb.v_reward_rho == doctest::Approx(10.0).epsilon(1e-12));
  }
  SUBCASE("two-state cycle") {
    Vector rho(2);
    rho << 1.0, 0.0;
    const auto vb = evaluate_policy(two_state_cycle(0.5, rho), Policy::uniform(2, 1));
    CHECK(std::abs(vb.v_reward(0) - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(vb.v_reward(1) - 2.0 / 3.0) < 1e-12);
  }
  SUBCASE("hand instance against the explicit 2x2 inverse") {
    const HandInstance hand;
    const HandPoint p = hand_start();
    double v[2];
    hand.values(p.pi, [&](int s, int a) { return hand.r[s][a]; }, v);
    const auto vb = evaluate_policy(hand.model(), Policy(to_matrix(p)));
    CHECK(std::abs(vb.v_reward(0) - v[0]) < 1e-13);
    CHECK(std::abs(vb.v_reward(1) - v[1]) < 1e-13);
  }
}

TEST_CASE("evaluate_policy matches power iteration on a random 5x3 model") {
  const Cmdp m = random_model(11, 5, 3, 1);
  std::mt19937_64 eng(5);
  const Matrix pi = random_policy(5, 3, eng);
  const auto vb = evaluate_policy(m, Policy(pi));
  const auto ref_r = power_iteration_values(m, pi, m.reward);
  const auto ref_g = power_iteration_values(m, pi, m.translated[0]);
  for (int s = 0; s < 5; ++s) {
    CHECK(std::abs(vb.v_reward(s) - ref_r[s]) <= 1e-9);
    CHECK(std::abs(vb.v_utils[0](s) - ref_g[s]) <= 1e-9);
  }
}

TEST_CASE("value bundle invariants") {
  std::mt19937_64 eng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Cmdp m = random_model(100 + trial, 6, 3, 2);
    const Policy pi(random_policy(6, 3, eng));
    Vector lam(2);
    lam << 0.7, 2.5;
    const auto vb = evaluate_policy(m, pi, lam);
    for (int s = 0; s < 6; ++s) {
      CHECK(std::abs(vb.v_reward(s) - pi.probs().row(s).dot(vb.q_reward.row(s))) < 1e-10);
      CHECK(std::abs(pi.probs().row(s).dot(vb.adv_reward.row(s))) < 1e-8);
    }
    CHECK(vb.v_reward_rho >= -1e-12);
    CHECK(vb.v_reward_rho <= m.horizon() + 1e-12);
    const Matrix q_sum = vb.q_reward + lam(0) * vb.q_utils[0] + lam(1) * vb.q_utils[1];
    REQUIRE(vb.scalarized.has_value());
    CHECK((vb.scalarized->q - q_sum).cwiseAbs().maxCoeff() < 1e-9);
    // Bellman consistency for the utility value as well.
    const Vector pv = m.transitions * vb.v_utils[1];
    for (int s = 0; s < 6; ++s) {
      double rhs = 0.0;
      for (int a = 0; a < 3; ++a)
        rhs += pi(s, a) * (m.translated[1](s, a) + m.gamma * pv(m.row(s, a)));
      CHECK(std::abs(vb.v_utils[1](s) - rhs) < 1e-8);
    }
  }
}

TEST_CASE("visitation") {
  SUBCASE("single self-loop") {
    const Vector d = visitation(single_state(0.9, 1.0), Policy::uniform(1, 1));
    CHECK(std::abs(d(0) - 1.0) < 1e-12);
  }
  SUBCASE("two-state cycle from s0") {
    Vector rho(2);
    rho << 1.0, 0.0;
    const Vector d = visitation(two_state_cycle(0.5, rho), Policy::uniform(2, 1));
    CHECK(std::abs(d(0) - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(d(1) - 1.0 / 3.0) < 1e-12);
  }
  SUBCASE("normalization, lower bound and occupancy identity") {
    std::mt19937_64 eng(23);
    const Cmdp m = random_model(9, 7, 4, 1);
    const Policy pi(random_policy(7, 4, eng));
    const Vector d = visitation(m, pi);
    CHECK(std::abs(d.sum() - 1.0) < 1e-10);
    CHECK(((d - (1.0 - m.gamma) * m.rho).array() >= -1e-12).all());
    const auto vb = evaluate_policy(m, pi);
    double occ_r = 0.0;
    double occ_g = 0.0;
    for (int s = 0; s < 7; ++s) {
      for (int a = 0; a < 4; ++a) {
        occ_r += d(s) * pi(s, a) * m.reward(s, a);
        occ_g += d(s) * pi(s, a) * m.translated[0](s, a);
      }
    }
    CHECK(std::abs((1.0 - m.gamma) * vb.v_reward_rho - occ_r) < 1e-8);
    CHECK(std::abs((1.0 - m.gamma) * vb.v_utils_rho(0) - occ_g) < 1e-8);
  }
}

TEST_CASE("performance difference identity") {
  std::mt19937_64 eng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const Cmdp m = random_model(200 + trial, 5, 3, 0);
    const Policy p(random_policy(5, 3, eng));
    const Policy p2(random_policy(5, 3, eng));
    const auto vb = evaluate_policy(m, p);
    const auto vb2 = evaluate_policy(m, p2);
    const Vector d2 = visitation(m, p2);
    double acc = 0.0;
    for (int s = 0; s < 5; ++s)
      for (int a = 0; a < 3; ++a) acc += d2(s) * (p2(s, a) - p(s, a)) * vb.q_reward(s, a);
    CHECK(std::abs(vb2.v_reward_rho - vb.v_reward_rho - acc / (1.0 - m.gamma)) < 1e-7);
  }
}

TEST_CASE("PolicyEvaluator reuses one factorization") {
  const Cmdp m = random_model(4, 5, 2, 1);
  const Policy pi = Policy::uniform(5, 2);
  const PolicyEvaluator ev(m, pi);
  const auto vb = evaluate_policy(m, pi);
  CHECK((ev.values(m.reward) - vb.v_reward).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((ev.q_values(m.reward, vb.v_reward) - vb.q_reward).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Policy validation") {
  Matrix bad(1, 2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(Policy{bad}, std::invalid_argument);
  bad << -0.1, 1.1;
  CHECK_THROWS_AS(Policy{bad}, std::invalid_argument);
  CHECK(Policy::uniform(3, 4)(2, 3) == doctest::Approx(0.25));
}

TEST_CASE("project_simplex") {
  auto proj = [](std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return project_simplex(v);
  };
  SUBCASE("spec examples") {
    CHECK((proj({0.5, 0.5}) - Vector::Constant(2, 0.5)).norm() < 1e-15);
    CHECK((proj({0.6, 0.6}) - Vector::Constant(2, 0.5)).norm() < 1e-15);
    const auto ref = grid_project_2(2.0, 0.0);
    const Vector p = proj({2.0, 0.0});
    CHECK(ref[0] == 1.0);
    CHECK(ref[1] == 0.0);
    CHECK(p(0) == 1.0);
    CHECK(p(1) == 0.0);
  }
  SUBCASE("agrees with a grid scan of the 2-simplex") {
    std::mt19937_64 eng(31);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 20; ++k) {
      const std::array<double, 3> x{u(eng), u(eng), u(eng)};
      const auto ref = grid_project_3(x);
      const Vector p = proj({x[0], x[1], x[2]});
      for (int i = 0; i < 3; ++i) CHECK(std::abs(p(i) - ref[i]) <= 1.5e-3);
    }
  }
  SUBCASE("idempotent, non-expansive, permutation-equivariant") {
    std::mt19937_64 eng(37);
    std::normal_distribution<double> n(0.0, 2.0);
    for (int k = 0; k < 200; ++k) {
      Vector a(5);
      Vector b(5);
      for (int i = 0; i < 5; ++i) {
        a(i) = n(eng);
        b(i) = n(eng);
      }
      const Vector pa = project_simplex(a);
      const Vector pb = project_simplex(b);
      CHECK(std::abs(pa.sum() - 1.0) < 1e-12);
      CHECK(pa.minCoeff() >= 0.0);
      CHECK((project_simplex(pa) - pa).norm() <= 1e-10);
      CHECK((pa - pb).norm() <= (a - b).norm() + 1e-10);
      const Vector rev = a.reverse();
      CHECK((project_simplex(rev) - pa.reverse()).norm() <= 1e-12);
    }
  }
  SUBCASE("empty input") { CHECK_THROWS_AS(project_simplex(Vector(0)), std::domain_error); }
}

TEST_CASE("greedy_policy") {
  Matrix q(3, 2);
  q << 1, 2, 3, 3, 0, 0;
  const Policy p = greedy_policy(q);
  CHECK(p(0, 1) == 1.0);
  CHECK(p(1, 0) == 1.0);
  CHECK(p(2, 0) == 1.0);
  const Policy flat = greedy_policy(Matrix::Constant(4, 3, 0.25));
  for (int s = 0; s < 4; ++s) CHECK(flat(s, 0) == 1.0);
}

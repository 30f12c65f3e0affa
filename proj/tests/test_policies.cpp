#include <doctest.h>

#include <cmath>
#include <random>

#include "lbm/environment.hpp"
#include "lbm/error.hpp"
#include "lbm/policies.hpp"
#include "lbm/presets.hpp"
#include "reference.hpp"

using namespace lbm;

namespace {

Trajectory play(const LbmParams& p, Agent& agent, std::int64_t horizon) {
  Environment env(p, 0);
  return simulate(env, agent, horizon);
}

Vector basis(int d, int k) {
  Vector e = Vector::Zero(d);
  e(k) = 1.0;
  return e;
}

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("greedy on the rising instance starts with e1") {
  const auto p = presets::rising_nonisotropic(2, 0.1);
  const std::vector<Vector> zero(2, Vector::Zero(2));
  const auto g = oracle_greedy_action(p, zero);
  CHECK(g.index == 0);
  CHECK((g.action - basis(2, 0)).norm() == 0.0);
  const auto ball = presets::rising_nonisotropic(2, 0.1, 0.0, true);
  CHECK((oracle_greedy_action(ball, zero).action - basis(2, 0)).norm() < 1e-12);
}

TEST_CASE("greedy ignores history when gamma = 0") {
  std::mt19937_64 rng(4);
  const Vector theta = ref::random_unit(3, rng);
  std::vector<Vector> acts;
  for (int i = 0; i < 10; ++i) acts.push_back(ref::random_unit(3, rng));
  auto p = make_params(theta, 2, 0.0, ActionSet::finite(acts));
  const auto first = oracle_greedy_action(p, std::vector<Vector>{Vector::Zero(3), Vector::Zero(3)});
  for (int t = 0; t < 20; ++t) {
    const std::vector<Vector> h{ref::random_in_ball(3, rng), ref::random_in_ball(3, rng)};
    CHECK(oracle_greedy_action(p, h).index == first.index);
  }
}

TEST_CASE("greedy on the rotting basis never takes a zero-reward action needlessly") {
  const auto p = presets::rotting_basis(3, -2.0);
  ref::for_each_tuple(p.action_set.size(), 3, [&](const std::vector<std::size_t>& idx) {
    std::vector<Vector> h;
    for (auto i : idx) h.push_back(p.action_set[i]);
    double best = -1e300;
    for (std::size_t a = 0; a < p.action_set.size(); ++a) best = std::max(best, ref::reward(p, h, p.action_set[a]));
    const auto g = oracle_greedy_action(p, h);
    const double got = ref::reward(p, h, g.action);
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
    if (best > 0.0) CHECK(got > 0.0);
  });
}

TEST_CASE("greedy on the unit ball beats random unit vectors") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 3;
    auto p = make_params(ref::random_unit(d, rng), 2, trial % 2 ? 1.5 : -2.0, ActionSet::unit_ball(d));
    const std::vector<Vector> h{ref::random_in_ball(d, rng), ref::random_in_ball(d, rng)};
    const auto g = oracle_greedy_action(p, h);
    CHECK(g.action.norm() == doctest::Approx(1.0));
    const double r = ref::reward(p, h, g.action);
    for (int k = 0; k < 100; ++k) CHECK(r >= ref::reward(p, h, ref::random_unit(d, rng)) - 1e-12);
  }
  auto zero = make_params(Vector::Zero(2), 0, 0.0, ActionSet::unit_ball(2));
  CHECK(oracle_greedy_action(zero, {}).action.norm() == 0.0);
}

TEST_CASE("cyclic replay") {
  const auto p = presets::rotting_basis(2, -1.0);
  CyclicAgent constant(make_block(p.action_set, {1}, 0, 1));
  for (const auto& s : play(p, constant, 5)) CHECK(s.index == 1);

  for (int m : {1, 2, 3}) {
    for (int l : {1, 2, 4}) {
      const auto pm = presets::rotting_basis(m, -1.0);
      const double d = m + 1.0;
      CyclicAgent basis_cycle(presets::rotting_basis_block(m, l));
      const auto traj = play(pm, basis_cycle, 2 * (m + l));
      double second = 0.0;
      for (std::size_t t = static_cast<std::size_t>(m + l); t < traj.size(); ++t) second += traj[t].expected;
      CHECK(second == doctest::Approx(l / std::sqrt(d)));
    }
    const auto pm = presets::rotting_basis(m, -1.0);
    std::vector<std::size_t> cycle;
    for (int k = 1; k <= m + 1; ++k) cycle.push_back(static_cast<std::size_t>(k));
    CyclicAgent basis_cycle(make_block(pm.action_set, cycle, m, 1));
    for (const auto& s : play(pm, basis_cycle, 4 * (m + 1)))
      CHECK(s.expected == doctest::Approx(1.0 / std::sqrt(m + 1.0)));
  }
}

TEST_CASE("cyclic rewards are periodic after the first block") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 1 + trial % 3, l = 1 + trial % 2, d = 3;
    std::vector<Vector> acts;
    for (int i = 0; i < m + l; ++i) acts.push_back(ref::random_in_ball(d, rng));
    auto p = make_params(ref::random_unit(d, rng), m, 0.7, ActionSet::unit_ball(d));
    CyclicAgent agent(make_block(acts, m, l));
    const auto traj = play(p, agent, 5 * (m + l));
    const auto period = static_cast<std::size_t>(m + l);
    for (std::size_t t = period; t + period < traj.size(); ++t)
      CHECK(traj[t].expected == doctest::Approx(traj[t + period].expected).epsilon(1e-12));
  }
}

TEST_CASE("fixed actions on the rising instance") {
  const double eps = 0.1;
  for (int m : {1, 2, 3}) {
    const auto p = presets::rising_nonisotropic(m, eps);
    FixedActionAgent pi2(p.action_set[3], 3, "pi2");
    const auto t2 = play(p, pi2, 10);
    for (std::size_t t = static_cast<std::size_t>(m); t < t2.size(); ++t)
      CHECK(t2[t].expected == doctest::Approx(m * std::sqrt(1 - eps)));
    OracleGreedyAgent greedy(p);
    const auto tg = play(p, greedy, 12);
    for (std::size_t t = static_cast<std::size_t>(m); t < tg.size(); ++t) {
      CHECK(tg[t].index == 0);
      CHECK(tg[t].expected == doctest::Approx((m + 1) * std::sqrt(eps)));
    }
  }
  std::mt19937_64 rng(2);
  const Vector theta = ref::random_unit(2, rng), a = ref::random_in_ball(2, rng);
  auto stat = make_params(theta, 2, 0.0, ActionSet::unit_ball(2));
  FixedActionAgent fixed(a, -1);
  for (const auto& s : play(stat, fixed, 6)) CHECK(s.expected == doctest::Approx(a.dot(theta)));
}

TEST_CASE("greedy is linearly worse than the basis cycle on the rotting instance") {
  for (int d : {2, 3, 4}) {
    const double expo = 2.0;
    const auto p = presets::rotting_greedy(d, expo);
    OracleGreedyAgent greedy(p);
    std::vector<Vector> basis_vecs;
    for (int k = 0; k < d; ++k) basis_vecs.push_back(basis(d, k));
    CyclicAgent cycle(make_block(basis_vecs, d - 1, 1));
    // Burn-in of 12 rounds, then 60 rounds: a whole number of periods for d = 2, 3, 4.
    const std::int64_t burn = 12, horizon = 72;
    const auto tg = play(p, greedy, horizon);
    const auto tc = play(p, cycle, horizon);
    double sg = 0.0, sc = 0.0;
    for (std::int64_t t = burn; t < horizon; ++t) {
      sg += tg[static_cast<std::size_t>(t)].expected;
      sc += tc[static_cast<std::size_t>(t)].expected;
    }
    const double per_g = sg / (horizon - burn), per_c = sc / (horizon - burn);
    CHECK(per_g == doctest::Approx(std::pow(d, -expo)).epsilon(1e-9));
    CHECK(per_c == doctest::Approx(1.0 / d).epsilon(1e-9));
    CHECK(per_c - per_g >= 1.0 / d - std::pow(d, -expo) - 1e-9);
  }
}

TEST_CASE("block construction errors") {
  const auto p = presets::rotting_basis(1, -1.0);
  CHECK_THROWS_AS(make_block(p.action_set, {0, 1, 2}, 1, 1), Error);
  try {
    make_block(p.action_set, {0, 1, 2}, 1, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLengthMismatch);
  }
  try {
    make_block(p.action_set, {0, 9}, 1, 1);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kActionOutOfSet);
  }
  Block b = make_block(std::vector<Vector>{Vector::Zero(2), Vector::Constant(2, 0.5)}, 1, 1);
  try {
    validate_block(b, p.action_set);
    FAIL("expected ActionOutOfSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kActionOutOfSet);
  }
  CHECK_NOTHROW(validate_block(b, ActionSet::unit_ball(2)));
}

}  // TEST_SUITE

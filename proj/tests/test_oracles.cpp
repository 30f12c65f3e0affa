#include <doctest.h>

#include <cmath>
#include <random>

#include "lbm/error.hpp"
#include "lbm/oful_memory.hpp"
#include "lbm/oracles.hpp"
#include "lbm/presets.hpp"
#include "reference.hpp"

using namespace lbm;

namespace {

LbmParams random_finite(int d, int k, int m, double gamma, std::mt19937_64& rng) {
  std::vector<Vector> acts;
  for (int i = 0; i < k; ++i) acts.push_back(ref::random_in_ball(d, rng));
  return make_params(ref::random_unit(d, rng), m, gamma, ActionSet::finite(acts));
}

std::vector<Vector> vectors_of(const LbmParams& p, const std::vector<std::size_t>& idx) {
  std::vector<Vector> out;
  for (auto i : idx) out.push_back(p.action_set[i]);
  return out;
}

}  // namespace

TEST_SUITE("oracles") {

TEST_CASE("OPT on the basis instance") {
  for (int m : {1, 2, 3}) {
    const auto p = presets::rotting_basis(m, -1.0);
    for (std::int64_t t : {1, 5, 12}) {
      const auto r = opt_dp(p, t);
      CHECK(r.value == doctest::Approx(t / std::sqrt(m + 1.0)).epsilon(1e-12));
      CHECK(r.sequence.size() == static_cast<std::size_t>(t));
    }
  }
}

TEST_CASE("OPT with gamma = 0 is stationary") {
  std::mt19937_64 rng(1);
  auto p = random_finite(3, 6, 2, 0.0, rng);
  double best = -1e300;
  for (const auto& a : p.action_set.actions()) best = std::max(best, a.dot(p.theta_star));
  CHECK(opt_dp(p, 17).value == doctest::Approx(17 * best).epsilon(1e-12));
}

TEST_CASE("DP matches exhaustive sequence enumeration") {
  std::mt19937_64 rng(2);
  {
    auto p = random_finite(2, 2, 1, -1.0, rng);
    CHECK(opt_dp(p, 4).value == doctest::Approx(ref::best_sequence_value(p, 4)).epsilon(1e-12));
  }
  std::uniform_real_distribution<double> g(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + trial % 3, m = trial % 3;
    std::size_t horizon = 1;
    while (std::pow(k, horizon + 1) <= 1e4 && horizon < 8) ++horizon;
    auto p = random_finite(2 + trial % 2, k, m, g(rng), rng);
    const auto r = opt_dp(p, static_cast<std::int64_t>(horizon));
    CHECK(r.value == doctest::Approx(ref::best_sequence_value(p, horizon)).epsilon(1e-10));
  }
}

TEST_CASE("replaying the DP sequence reproduces its value") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> g(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_finite(3, 5, 1 + trial % 3, g(rng), rng);
    const auto r = opt_dp(p, 40);
    const auto rewards = ref::replay(p, vectors_of(p, r.sequence));
    double total = 0.0;
    for (std::size_t t = 0; t < rewards.size(); ++t) {
      total += rewards[t];
      CHECK(std::abs(rewards[t] - r.rewards[t]) < 1e-9);
    }
    CHECK(std::abs(total - r.value) < 1e-9);
  }
}

TEST_CASE("DP state cap") {
  std::mt19937_64 rng(4);
  auto p = random_finite(3, 20, 4, -1.0, rng);
  try {
    opt_dp(p, 10);
    FAIL("expected StateSpaceTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStateSpaceTooLarge);
  }
  CHECK_THROWS_AS(opt_dp(make_params(p.theta_star, 1, 0.0, ActionSet::unit_ball(3)), 5), Error);
}

TEST_CASE("best block by enumeration") {
  for (int m : {1, 2}) {
    const auto p = presets::rotting_basis(m, -1.0);
    for (int l : {1, 2, 3}) {
      const auto b = best_block_bruteforce(p, l);
      CHECK(b.value == doctest::Approx(l / std::sqrt(m + 1.0)).epsilon(1e-12));
      for (int i = 0; i < m; ++i) CHECK(b.block.indices[static_cast<std::size_t>(i)] == 0);
    }
  }
  std::mt19937_64 rng(5);
  auto stat = random_finite(2, 4, 1, 0.0, rng);
  double best = -1e300;
  for (const auto& a : stat.action_set.actions()) best = std::max(best, a.dot(stat.theta_star));
  const auto b = best_block_bruteforce(stat, 3);
  CHECK(b.value == doctest::Approx(3 * best).epsilon(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(stat.action_set[b.block.indices[static_cast<std::size_t>(i)]].dot(stat.theta_star) == doctest::Approx(best));
  try {
    best_block_bruteforce(random_finite(2, 20, 2, 0.0, rng), 3);
    FAIL("expected SearchSpaceTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSearchSpaceTooLarge);
  }
}

TEST_CASE("best block dominates random blocks and matches exhaustive selection") {
  std::mt19937_64 rng(6);
  auto p = random_finite(2, 4, 2, 1.0, rng);
  const auto b = best_block_bruteforce(p, 2);
  CHECK(b.value == doctest::Approx(ref::block_value(p, b.block.actions, 2, p.theta_star)).epsilon(1e-12));
  std::uniform_int_distribution<std::size_t> pick(0, 3);
  for (int k = 0; k < 1000; ++k) {
    std::vector<Vector> blk;
    for (int i = 0; i < 4; ++i) blk.push_back(p.action_set[pick(rng)]);
    CHECK(ref::block_value(p, blk, 2, p.theta_star) <= b.value + 1e-12);
  }
  for (int trial = 0; trial < 10; ++trial) {
    auto q = random_finite(2, 2, 1, trial % 2 ? -1.0 : 1.5, rng);
    RidgeState s = RidgeState::init(2, 1.0, 0.1);
    s.theta_hat = q.theta_star;
    OptimizerConfig ex;
    ex.exhaustive = true;
    const auto sel = select_block(s, LearnerModel::from(q), 2, UcbVariant::kO3m, ex, rng);
    const auto bb = best_block_bruteforce(q, 2);
    CHECK(sel.block.indices == bb.block.indices);
    CHECK(sel.ucb == doctest::Approx(bb.value).epsilon(1e-12));
  }
}

TEST_CASE("approximation gap on the tight instance") {
  const auto p = presets::rotting_basis(1, -1.0);
  const auto g = approx_gap_check(p, 1, 8, 1.0 / std::sqrt(2.0), true);
  CHECK(g.opt == doctest::Approx(8.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(g.cyclic == doctest::Approx(4.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(g.gap - 4.0 / std::sqrt(2.0)) < 1e-9);
  CHECK(g.within_bound);
  CHECK(g.meets_lower);
  CHECK(*g.tight_lower == doctest::Approx(4.0 / std::sqrt(2.0)));
}

TEST_CASE("approximation gap vanishes without memory") {
  std::mt19937_64 rng(7);
  auto p = random_finite(3, 5, 0, 0.0, rng);
  for (int l : {1, 2, 3}) CHECK(std::abs(approx_gap_check(p, l, 11).gap) < 1e-9);
}

TEST_CASE("approximation gap on random instances") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> g(-2.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_finite(1 + trial % 3, 3, 1 + trial % 2, g(rng), rng);
    const auto r = approx_gap_check(p, 1 + trial % 3, 6 + trial % 7);
    CHECK(r.gap >= -1e-9);
    CHECK(r.gap <= r.bound + 1e-9);
    CHECK(r.within_bound);
    const auto cyc = cyclic_rewards(p, r.best.block, 6 + trial % 7);
    std::vector<Vector> seq;
    for (std::size_t t = 0; t < cyc.size(); ++t) seq.push_back(r.best.block.actions[t % r.best.block.size()]);
    CHECK(std::abs(ref::replay_total(p, seq) - r.cyclic) < 1e-9);
  }
}

TEST_CASE("pre-sequence sign flip") {
  std::mt19937_64 rng(9);
  const Matrix i2 = Matrix::Identity(2, 2);
  std::vector<Vector> tail{ref::random_in_ball(2, rng), ref::random_in_ball(2, rng)};
  auto block_with = [&](const Vector& pre) {
    std::vector<Vector> acts{pre};
    acts.insert(acts.end(), tail.begin(), tail.end());
    return make_block(acts, 1, 2);
  };
  const Block same = block_with(tail[0]);
  CHECK(presequence_signflip_check(same, same, ref::random_unit(2, rng), i2, 1.0));
  CHECK(presequence_signflip_check(block_with(ref::random_in_ball(2, rng)),
                                   block_with(ref::random_in_ball(2, rng)), Vector::Zero(2), i2, 1.0));
  for (int k = 0; k < 200; ++k) {
    const Vector theta = ref::random_unit(2, rng);
    const Block a = block_with(ref::random_in_ball(2, rng));
    const Block b = block_with(ref::random_in_ball(2, rng));
    CHECK(presequence_signflip_check(a, b, theta, i2, k % 2 ? 1.0 : -0.5));
  }
  std::vector<Vector> other{tail[0], tail[1], tail[0]};
  CHECK_THROWS_AS(presequence_signflip_check(block_with(tail[0]), make_block(other, 1, 2),
                                             Vector::Ones(2) * 0.5, i2, 1.0),
                  Error);
}

}  // TEST_SUITE

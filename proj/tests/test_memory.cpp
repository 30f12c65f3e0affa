#include <doctest.h>

#include <cmath>
#include <random>

#include "lbm/environment.hpp"
#include "lbm/error.hpp"
#include "lbm/memory.hpp"
#include "lbm/presets.hpp"
#include "reference.hpp"

using namespace lbm;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an lbm::Error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("memory_core") {

TEST_CASE("sym_power on closed-form inputs") {
  CHECK(sym_power(Matrix::Identity(2, 2), -3.0).isApprox(Matrix::Identity(2, 2)));
  CHECK((sym_power(diag2(2, 1), -1.0) - diag2(0.5, 1.0)).norm() < 1e-14);
  Matrix m = Matrix::Identity(2, 2);
  const Vector e1 = vec({1, 0});
  m += e1 * e1.transpose() + e1 * e1.transpose();
  CHECK((sym_power(m, 2.0) - diag2(9, 1)).norm() < 1e-12);
}

TEST_CASE("sym_power at exponents 0 and 1, and integer powers") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 4;
    const Matrix m = ref::random_psd(d, 0.5, 4.0, rng);
    CHECK((sym_power(m, 0.0) - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sym_power(m, 1.0) - m).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = -3; k <= 3; ++k)
      CHECK((sym_power(m, k) - ref::int_power(m, k)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("sym_power clamps tiny negative eigenvalues for gamma > 0") {
  Matrix m = diag2(1.0, -1e-14);
  const Matrix p = sym_power(m, 0.5);
  CHECK(p(1, 1) == doctest::Approx(0.0));
  CHECK(p(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sym_power errors") {
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1e-6;
  CHECK(code_of([&] { sym_power(asym, 1.0); }) == ErrorCode::kNonSymmetric);
  CHECK(code_of([&] { sym_power(diag2(1.0, 0.0), -1.0); }) == ErrorCode::kSingularNegativePower);
  CHECK(code_of([&] { sym_power(diag2(1.0, 1e-10), -0.5); }) == ErrorCode::kSingularNegativePower);
  Matrix rot(2, 2);
  rot << 1.0, 0.0, 0.0, 0.0;
  const Matrix q = Eigen::Rotation2D<double>(0.3).toRotationMatrix();
  CHECK(code_of([&] { sym_power(q * rot * q.transpose(), -2.0); }) ==
        ErrorCode::kSingularNegativePower);
  CHECK_NOTHROW(sym_power(diag2(1.0, 0.0), 2.0));
}

TEST_CASE("memory_matrix examples") {
  const Vector e1 = vec({1, 0}), e2 = vec({0, 1}), z = Vector::Zero(2);
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK((memory_matrix(std::vector<Vector>{e1}, i2, -1.0) - diag2(0.5, 1.0)).norm() < 1e-14);
  CHECK((memory_matrix(std::vector<Vector>{z, z}, i2, 7.0) - i2).norm() < 1e-14);
  CHECK((memory_matrix(std::vector<Vector>{e2, e2}, diag2(1, 0), 1.0) - diag2(1, 2)).norm() < 1e-14);
  CHECK((memory_matrix(std::vector<Vector>{}, i2, -2.0) - i2).norm() < 1e-14);
}

TEST_CASE("memory_matrix is symmetric PSD and bounded by (m+1)^gamma+") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> g(-3.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 4;
    const int m = trial % 5;
    const double gamma = g(rng);
    std::vector<Vector> hist;
    for (int i = 0; i < m; ++i) hist.push_back(ref::random_in_ball(d, rng));
    const Matrix a = memory_matrix(hist, Matrix::Identity(d, d), gamma);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    const double bound = std::pow(m + 1.0, positive_part(gamma));
    CHECK(es.eigenvalues().cwiseAbs().maxCoeff() <= bound + 1e-9);
    if (gamma <= 0.0) CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-9);
    // Direct eigen-solve reference.
    Matrix gram = Matrix::Identity(d, d);
    for (const auto& h : hist) gram += h * h.transpose();
    CHECK((a - ref::eig_power(gram, gamma)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("expected reward examples") {
  std::mt19937_64 rng(9);
  const Vector theta = ref::random_unit(3, rng) * 0.8;
  auto p = make_params(theta, 2, 0.0, ActionSet::unit_ball(3));
  const std::vector<Vector> hist{ref::random_in_ball(3, rng), ref::random_in_ball(3, rng)};
  CHECK(expected_reward(p, hist, theta) == doctest::Approx(theta.squaredNorm()).epsilon(1e-12));

  for (int m : {1, 2, 4}) {
    const auto rb = presets::rotting_basis(m, -1.5);
    const int d = m + 1;
    std::vector<Vector> h(static_cast<std::size_t>(m), Vector::Zero(d));
    for (int j = 1; j < m; ++j) h[static_cast<std::size_t>(j)] = rb.action_set[static_cast<std::size_t>(j + 1)];
    CHECK(expected_reward(rb, h, rb.action_set[1]) == doctest::Approx(1.0 / std::sqrt(d)));
  }

  // Rested arms: (1 + n_k)^gamma / sqrt(K).
  const int k = 4;
  for (double gamma : {-1.0, 0.5, 2.0}) {
    const auto rk = presets::rested_karms(k, 3, gamma);
    for (int n = 0; n <= 3; ++n) {
      std::vector<Vector> h;
      for (int i = 0; i < 3; ++i) h.push_back(rk.action_set[i < n ? 0 : 1 + (i % 3)]);
      CHECK(expected_reward(rk, h, rk.action_set[0]) ==
            doctest::Approx(std::pow(1.0 + n, gamma) / std::sqrt(k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("expected rewards are bounded by (m+1)^gamma+") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> g(-3.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 1 + trial % 3, m = trial % 4;
    const double gamma = g(rng);
    auto p = make_params(ref::random_in_ball(d, rng), m, gamma, ActionSet::unit_ball(d));
    std::vector<Vector> hist;
    for (int i = 0; i < m; ++i) hist.push_back(ref::random_in_ball(d, rng));
    const double r = expected_reward(p, hist, ref::random_in_ball(d, rng));
    CHECK(std::abs(r) <= std::pow(m + 1.0, positive_part(gamma)) + 1e-9);
  }
}

TEST_CASE("action membership") {
  auto p = make_params(vec({0.6, 0.8}), 0, 0.0, ActionSet::unit_ball(2));
  CHECK(code_of([&] { expected_reward(p, {}, vec({1.0, 0.1})); }) == ErrorCode::kActionOutOfSet);
  CHECK_NOTHROW(expected_reward(p, {}, vec({1.0 + 5e-10, 0.0})));
  auto f = make_params(vec({0.6, 0.8}), 0, 0.0, ActionSet::finite({vec({1, 0}), vec({0, 1})}));
  CHECK(code_of([&] { expected_reward(f, {}, vec({0.5, 0.5})); }) == ErrorCode::kActionOutOfSet);
  CHECK(expected_reward(f, {}, vec({0, 1})) == doctest::Approx(0.8));
}

TEST_CASE("parameter and action-set validation") {
  CHECK(code_of([] { ActionSet::finite({}); }) == ErrorCode::kInvalidParams);
  CHECK(code_of([] { ActionSet::finite({vec({1.1, 0})}); }) == ErrorCode::kInvalidParams);
  CHECK(code_of([] { ActionSet::finite({vec({1, 0}), vec({1, 1e-13})}); }) ==
        ErrorCode::kInvalidParams);
  CHECK(code_of([] { make_params(vec({1, 1}), 1, 0.0, ActionSet::unit_ball(2)); }) ==
        ErrorCode::kInvalidParams);
  CHECK(code_of([] { make_params(vec({1, 0}), 1, -1.0, ActionSet::unit_ball(2), 0.0, diag2(1, 0)); }) ==
        ErrorCode::kInvalidParams);
  Matrix asym = Matrix::Identity(2, 2);
  asym(1, 0) = 0.1;
  CHECK(code_of([&] { make_params(vec({1, 0}), 1, 1.0, ActionSet::unit_ball(2), 0.0, asym); }) ==
        ErrorCode::kInvalidParams);
  CHECK(code_of([] { make_params(vec({1, 0}), -1, 1.0, ActionSet::unit_ball(2)); }) ==
        ErrorCode::kInvalidParams);
  CHECK(code_of([] { make_params(vec({1, 0}), 1, 1.0, ActionSet::unit_ball(2), -0.1); }) ==
        ErrorCode::kInvalidParams);
  CHECK_NOTHROW(make_params(vec({1, 0}), 1, 1.0, ActionSet::unit_ball(2), 0.0, diag2(1, 0)));
}

TEST_CASE("environment stepping") {
  std::mt19937_64 rng(3);
  const Vector theta = ref::random_unit(3, rng);
  auto quiet = make_params(theta, 2, -1.0, ActionSet::unit_ball(3));
  Environment env(quiet, 1);
  CHECK(env.history().size() == 2);
  for (const auto& h : env.history()) CHECK(h.norm() == 0.0);
  std::vector<Vector> played;
  for (int t = 0; t < 20; ++t) {
    const Vector a = ref::random_in_ball(3, rng);
    const auto r = env.step(a);
    CHECK(r.reward == r.expected);
    played.push_back(a);
    CHECK(env.history().size() == 2);
    CHECK(env.history().back() == a);
    CHECK(env.t() == t + 1);
  }
  const auto refs = ref::replay(quiet, played);
  Environment again(quiet, 1);
  for (std::size_t t = 0; t < played.size(); ++t)
    CHECK(again.step(played[t]).expected == doctest::Approx(refs[t]).epsilon(1e-12));

  auto stat = make_params(theta, 0, 2.0, ActionSet::unit_ball(3));
  Environment s(stat, 2);
  for (int t = 0; t < 5; ++t) {
    CHECK(s.step(theta).expected == doctest::Approx(1.0));
    CHECK(s.history().empty());
  }
}

TEST_CASE("seeded noise is reproducible") {
  auto p = presets::rotting_basis(2, -1.0, 0.3);
  Environment a(p, 77), b(p, 77), c(p, 78);
  bool differs = false;
  for (int t = 0; t < 50; ++t) {
    const Vector& act = p.action_set[static_cast<std::size_t>(t % 4)];
    const double ra = a.step(act).reward;
    CHECK(ra == b.step(act).reward);
    differs = differs || ra != c.step(act).reward;
  }
  CHECK(differs);
}

TEST_CASE("gamma = 0 and m = 0 give identical reward streams") {
  std::mt19937_64 rng(8);
  const Vector theta = ref::random_unit(3, rng);
  auto g0 = make_params(theta, 3, 0.0, ActionSet::unit_ball(3), 0.1);
  auto m0 = make_params(theta, 0, 1.7, ActionSet::unit_ball(3), 0.1);
  Environment a(g0, 5), b(m0, 5);
  for (int t = 0; t < 100; ++t) {
    const Vector act = ref::random_in_ball(3, rng);
    const auto ra = a.step(act), rb = b.step(act);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.expected == rb.expected);
  }
}

}  // TEST_SUITE

#include "lbm/presets.hpp"

#include <cmath>
#include <numbers>

#include "lbm/error.hpp"

namespace lbm::presets {

namespace {

Vector basis(int d, int k) {
  Vector e = Vector::Zero(d);
  e(k) = 1.0;
  return e;
}

}  // namespace

LbmParams rotting_basis(int m, double gamma, double noise_sigma) {
  if (m < 0) throw Error(ErrorCode::kInvalidParams, "m must be nonnegative");
  if (gamma > 0.0) throw Error(ErrorCode::kInvalidParams, "rotting-basis requires gamma <= 0");
  const int d = m + 1;
  std::vector<Vector> actions{Vector::Zero(d)};
  for (int k = 0; k < d; ++k) actions.push_back(basis(d, k));
  return make_params(Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))), m, gamma,
                     ActionSet::finite(std::move(actions)), noise_sigma);
}

Block rotting_basis_block(int m, int l) {
  const int d = m + 1;
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < l; ++i) idx.push_back(static_cast<std::size_t>(1 + i % d));
  return make_block(rotting_basis(m, 0.0).action_set, std::move(idx), m, l);
}

LbmParams rotting_greedy(int d, double exponent, double noise_sigma) {
  if (d < 1 || exponent <= 0.0)
    throw Error(ErrorCode::kInvalidParams, "rotting-greedy requires d >= 1 and exponent > 0");
  return make_params(basis(d, 0), d - 1, -exponent, ActionSet::unit_ball(d), noise_sigma);
}

LbmParams rising_nonisotropic(int m, double eps, double noise_sigma, bool unit_ball) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::kInvalidParams, "eps must lie in (0, 1)");
  Matrix a0 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  Vector theta(2);
  theta << std::sqrt(eps), std::sqrt(1.0 - eps);
  if (unit_ball) return make_params(theta, m, 1.0, ActionSet::unit_ball(2), noise_sigma, a0);
  std::vector<Vector> actions;
  for (int k = 0; k < 12; ++k) {
    Vector a(2);
    if (k % 3 == 0) {
      // Exact axis directions.
      const int q = k / 3;
      a << (q == 0 ? 1.0 : q == 2 ? -1.0 : 0.0), (q == 1 ? 1.0 : q == 3 ? -1.0 : 0.0);
    } else {
      const double angle = k * std::numbers::pi / 6.0;
      a << std::cos(angle), std::sin(angle);
    }
    actions.push_back(a);
  }
  return make_params(theta, m, 1.0, ActionSet::finite(std::move(actions)), noise_sigma, a0);
}

LbmParams rested_karms(int k, int m, double gamma, double noise_sigma) {
  if (k < 1) throw Error(ErrorCode::kInvalidParams, "need at least one arm");
  std::vector<Vector> actions;
  for (int i = 0; i < k; ++i) actions.push_back(basis(k, i));
  return make_params(Vector::Constant(k, 1.0 / std::sqrt(static_cast<double>(k))), m, gamma,
                     ActionSet::finite(std::move(actions)), noise_sigma);
}

ActionSet sphere20() {
  static const double kPoints[20][3] = {
      {-0.20796320863504614, 0.12892477577226125, -0.9696028599618962},
      {0.008177526000170115, 0.9748261396878825, -0.2228163491526991},
      {-0.491665666591669, 0.4817562173085631, -0.7253797759653313},
      {0.809921687204765, 0.3636844770972248, -0.4601743818531242},
      {-0.8320794175743605, -0.5253688704811328, -0.17785216551532784},
      {-0.7241116776974263, 0.2479637307694421, -0.6435652775322159},
      {0.3272411650651953, 0.1615310320847446, -0.931032193621902},
      {-0.7151338289568662, 0.6511743979817858, -0.2540777638726985},
      {0.36906227322041146, -0.38839804748456885, 0.8443577412421568},
      {0.9300159348885401, -0.3672436034420165, -0.014230129455414397},
      {-0.9974913107330815, 0.04230133127404382, 0.05675986596568398},
      {-0.9089794762536036, -0.4160234505315468, -0.026092151263356674},
      {-0.5733923034804618, 0.4517829490813575, 0.6834569724779473},
      {-0.5168269075390247, 0.3025080554922397, -0.8008613013537067},
      {-0.6632133543357178, 0.45313492166662844, 0.5956649976261357},
      {0.2998791279052696, 0.3451379221918588, -0.8893550040967113},
      {-0.5461786431971819, -0.519369801413063, 0.6572243902164928},
      {-0.42697494907810857, 0.7165110407402321, 0.5516378534483436},
      {0.6934051492430531, 0.4615931085921264, 0.5532821171007399},
      {0.5510528771370872, 0.7765722709146955, 0.30541158236931887},
  };
  std::vector<Vector> actions;
  for (const auto& p : kPoints) {
    Vector a(3);
    a << p[0], p[1], p[2];
    actions.push_back(a);
  }
  return ActionSet::finite(std::move(actions));
}

}  // namespace lbm::presets

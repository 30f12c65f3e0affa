#include "lbm/block_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lbm/error.hpp"

namespace lbm {

namespace {

constexpr double kTieTol = 1e-12;

// True when `value` at `point` should replace the incumbent.
template <typename Point>
bool better(double value, const Point& point, double best_value, const Point& best_point) {
  if (value > best_value + kTieTol) return true;
  if (value < best_value - kTieTol) return false;
  return std::lexicographical_compare(point.begin(), point.end(), best_point.begin(),
                                      best_point.end());
}

bool lex_less(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < a[i].size(); ++j) {
      if (a[i](j) < b[i](j)) return true;
      if (a[i](j) > b[i](j)) return false;
    }
  return false;
}

void project(Vector& a) {
  const double n = a.norm();
  if (n > 1.0) a /= n;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (restarts < 1 || max_sweeps < 1 || ball_iterations < 1 || !(ball_step > 0.0) ||
      !(fd_step > 0.0))
    throw Error(ErrorCode::kInvalidConfig, "optimizer settings must be positive");
}

std::uint64_t block_count(std::size_t num_actions, std::size_t len) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < len; ++i) {
    if (num_actions != 0 && n > std::numeric_limits<std::uint64_t>::max() / num_actions)
      return std::numeric_limits<std::uint64_t>::max();
    n *= num_actions;
  }
  return n;
}

SearchResult<std::size_t> enumerate_finite(std::size_t num_actions, std::size_t len,
                                           const FiniteObjective& objective) {
  if (num_actions == 0) throw Error(ErrorCode::kInvalidConfig, "empty action set");
  std::vector<std::size_t> idx(len, 0);
  SearchResult<std::size_t> best{idx, objective(idx)};
  // Odometer with the last position fastest visits blocks in lexicographic
  // order, so a strict comparison keeps the smallest maximizer.
  while (true) {
    std::size_t pos = len;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < num_actions) break;
      idx[pos] = 0;
      if (pos == 0) return best;
    }
    if (len == 0) return best;
    const double value = objective(idx);
    if (value > best.value) best = {idx, value};
  }
}

SearchResult<std::size_t> search_finite(std::size_t num_actions, std::size_t len,
                                        const FiniteObjective& objective,
                                        const OptimizerConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  if (cfg.exhaustive && block_count(num_actions, len) <= cfg.exhaustive_cap)
    return enumerate_finite(num_actions, len, objective);

  std::uniform_int_distribution<std::size_t> pick(0, num_actions - 1);
  SearchResult<std::size_t> best;
  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<std::size_t> idx(len, 0);
    if (r > 0)
      for (auto& i : idx) i = pick(rng);
    double value = objective(idx);
    for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      bool improved = false;
      for (std::size_t pos = 0; pos < len; ++pos) {
        const std::size_t current = idx[pos];
        std::size_t best_a = current;
        double best_v = value;
        for (std::size_t a = 0; a < num_actions; ++a) {
          if (a == current) continue;
          idx[pos] = a;
          const double v = objective(idx);
          if (v > best_v || (v == best_v && a < best_a)) {
            best_v = v;
            best_a = a;
          }
        }
        idx[pos] = best_a;
        if (best_v > value + kTieTol) improved = true;
        value = best_v;
      }
      if (!improved) break;
    }
    if (!have_best || better(value, idx, best.value, best.point)) {
      best = {idx, value};
      have_best = true;
    }
  }
  return best;
}

SearchResult<Vector> search_ball(int dim, std::size_t len, const BallObjective& objective,
                                 const OptimizerConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SearchResult<Vector> best;
  bool have_best = false;
  const double h = cfg.fd_step;

  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<Vector> x(len, Vector::Zero(dim));
    for (auto& a : x) {
      for (int j = 0; j < dim; ++j) a(j) = normal(rng);
      const double n = a.norm();
      if (n > 0.0) a *= std::pow(unit(rng), 1.0 / dim) / n;
    }
    auto consider = [&](const std::vector<Vector>& point, double value) {
      if (!have_best || value > best.value + kTieTol ||
          (value >= best.value - kTieTol && lex_less(point, best.point))) {
        best = {point, value};
        have_best = true;
      }
    };
    consider(x, objective(x));

    std::vector<Vector> grad(len, Vector::Zero(dim));
    for (int k = 1; k <= cfg.ball_iterations; ++k) {
      for (std::size_t i = 0; i < len; ++i)
        for (int j = 0; j < dim; ++j) {
          const double saved = x[i](j);
          x[i](j) = saved + h;
          const double up = objective(x);
          x[i](j) = saved - h;
          const double down = objective(x);
          x[i](j) = saved;
          grad[i](j) = (up - down) / (2.0 * h);
        }
      const double step = cfg.ball_step / std::sqrt(static_cast<double>(k));
      for (std::size_t i = 0; i < len; ++i) {
        x[i] += step * grad[i];
        project(x[i]);
      }
      consider(x, objective(x));
    }
  }
  return best;
}

}  // namespace lbm

#include "surfup/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "surfup/error.hpp"

namespace surfup {

Assignment hungarian(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols())
    throw SizeMismatch("assignment cost matrix must be square");
  const auto n = static_cast<std::size_t>(cost.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based with a virtual column 0 (e-maxx formulation).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j])
          continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment out;
  out.assignment.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0)
      out.assignment[p[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i)
    out.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.assignment[i]));
  return out;
}

AuctionResult auction(std::size_t n, const std::function<double(std::size_t, std::size_t)>& cost,
                      double target_gap) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  AuctionResult res;
  if (n == 0)
    return res;

  double max_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_cost = std::max(max_cost, cost(i, (i * 7919) % n));
  for (std::size_t j = 0; j < n; ++j)
    max_cost = std::max(max_cost, cost(0, j));
  if (max_cost == 0.0)
    max_cost = 1.0;

  // Bidders minimize cost + price.
  std::vector<double> price(n, 0.0);
  std::vector<std::size_t> owner(n, none), assigned(n, none);
  double eps = max_cost / 4.0;
  const double eps_floor = 1e-9 * max_cost / static_cast<double>(n);

  while (true) {
    std::fill(owner.begin(), owner.end(), none);
    std::fill(assigned.begin(), assigned.end(), none);
    std::vector<std::size_t> queue(n);
    for (std::size_t i = 0; i < n; ++i)
      queue[i] = n - 1 - i;
    while (!queue.empty()) {
      const std::size_t i = queue.back();
      queue.pop_back();
      double best = std::numeric_limits<double>::infinity(), second = best;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const double val = cost(i, j) + price[j];
        if (val < best) {
          second = best;
          best = val;
          best_j = j;
        } else if (val < second) {
          second = val;
        }
      }
      if (!std::isfinite(second))
        second = best;
      price[best_j] += (second - best) + eps;
      if (owner[best_j] != none) {
        assigned[owner[best_j]] = none;
        queue.push_back(owner[best_j]);
      }
      owner[best_j] = i;
      assigned[i] = best_j;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      total += cost(i, assigned[i]);
    const double bound = static_cast<double>(n) * eps;
    if (bound <= target_gap * total || eps <= eps_floor) {
      res.match.assignment = assigned;
      res.match.cost = total;
      res.relative_gap = total > 0.0 ? bound / total : 0.0;
      return res;
    }
    eps = std::max(eps / 5.0, eps_floor);
  }
}

} // namespace surfup

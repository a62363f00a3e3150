#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace surfup {

/// assignment[i] = column matched to row i.
struct Assignment {
  std::vector<std::size_t> assignment;
  double cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square cost matrix
/// (shortest augmenting paths with potentials, O(n^3)).
Assignment hungarian(const Eigen::MatrixXd& cost);

struct AuctionResult {
  Assignment match;
  /// Upper bound on (cost - optimum) / cost from epsilon-complementary
  /// slackness: n * eps / cost.
  double relative_gap = 0.0;
};

/// Forward auction with epsilon scaling for an n x n problem whose costs
/// are produced on demand. Runs until n * eps <= target_gap * cost (or eps
/// reaches a floor relative to the largest cost).
AuctionResult auction(std::size_t n, const std::function<double(std::size_t, std::size_t)>& cost,
                      double target_gap = 0.01);

} // namespace surfup

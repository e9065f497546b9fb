#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "contain/matrix.hpp"

namespace contain {

enum class Role { Follower, Leader };

/// Communication graph with leader/follower roles.
///
/// Agents are stored in canonical order: followers first, then leaders, each
/// group keeping the relative order of the user's labeling. `adjacency(i, j)`
/// is 1 when agent i receives information from agent j (edge j -> i).
class Topology {
 public:
  [[nodiscard]] std::size_t n_agents() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t n_followers() const noexcept { return n_followers_; }
  [[nodiscard]] std::size_t n_leaders() const noexcept { return n_agents() - n_followers_; }

  /// Canonical-order adjacency.
  [[nodiscard]] const Matrix& adjacency() const noexcept { return adjacency_; }
  /// Canonical index -> user label.
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] Role role(std::size_t canonical) const noexcept {
    return canonical < n_followers_ ? Role::Follower : Role::Leader;
  }
  /// In-neighbors j of canonical agent i (a_ij = 1), ascending.
  [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t canonical) const noexcept {
    return neighbors_[canonical];
  }

  /// Position of canonical agent in the user's original ordering.
  [[nodiscard]] std::size_t to_user(std::size_t canonical) const noexcept { return canonical_to_user_[canonical]; }
  [[nodiscard]] std::size_t to_canonical(std::size_t user) const noexcept { return user_to_canonical_[user]; }

 private:
  friend Topology build_topology(const Matrix& adjacency, std::vector<std::string> labels);

  std::size_t n_followers_ = 0;
  Matrix adjacency_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> neighbors_;
  std::vector<std::size_t> canonical_to_user_;
  std::vector<std::size_t> user_to_canonical_;
};

/// Classifies agents by the zero-row rule and permutes followers first.
/// `adjacency` is in user order; empty `labels` defaults to "1".."N".
/// Throws BadAdjacency, NoLeader or NoFollower.
[[nodiscard]] Topology build_topology(const Matrix& adjacency, std::vector<std::string> labels = {});

struct GraphCheckReport {
  bool follower_subgraph_undirected = true;
  /// (i, j) label pairs among followers with a_ij != a_ji.
  std::vector<std::pair<std::string, std::string>> asymmetric_edges;
  /// Followers no leader can reach.
  std::vector<std::string> unreachable_followers;

  [[nodiscard]] bool passed() const noexcept {
    return follower_subgraph_undirected && unreachable_followers.empty();
  }
};

[[nodiscard]] GraphCheckReport check_graph(const Topology& t);

struct LaplacianPartition {
  Matrix laplacian;   // N x N, canonical order
  Matrix l1;          // M x M follower block
  Matrix l2;          // M x (N-M) follower-leader block
  Matrix weights;     // -L1^{-1} L2, row-stochastic
  double lambda_min_l1 = 0.0;

  [[nodiscard]] std::size_t n_followers() const noexcept { return l1.rows(); }
  [[nodiscard]] std::size_t n_leaders() const noexcept { return l2.cols(); }
};

[[nodiscard]] Matrix laplacian(const Topology& t);

/// Builds L, its blocks, W = -L1^{-1} L2 and λ_min(L1). Requires a topology that passes check_graph.
[[nodiscard]] LaplacianPartition partition_laplacian(const Topology& t);

/// W with entries in [-1e-12, 0) shown as 0; for reports only.
[[nodiscard]] Matrix clamp_for_report(const Matrix& weights);

}  // namespace contain

#include "contain/graph.hpp"

#include <deque>

#include "contain/error.hpp"
#include "contain/linalg.hpp"

namespace contain {

Topology build_topology(const Matrix& adjacency, std::vector<std::string> labels) {
  if (!adjacency.is_square() || adjacency.empty()) {
    throw Error(ErrorCode::BadAdjacency, "adjacency must be a non-empty square matrix");
  }
  const std::size_t n = adjacency.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if (a != 0.0 && a != 1.0) {
        throw Error(ErrorCode::BadAdjacency,
                    "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is not 0 or 1");
      }
    }
    if (adjacency(i, i) != 0.0) {
      throw Error(ErrorCode::BadAdjacency, "nonzero diagonal at agent " + std::to_string(i + 1));
    }
  }
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
  }
  if (labels.size() != n) throw Error(ErrorCode::BadAdjacency, "label count does not match adjacency size");

  std::vector<std::size_t> followers;
  std::vector<std::size_t> leaders;
  for (std::size_t i = 0; i < n; ++i) {
    bool has_neighbor = false;
    for (std::size_t j = 0; j < n; ++j) has_neighbor = has_neighbor || adjacency(i, j) != 0.0;
    (has_neighbor ? followers : leaders).push_back(i);
  }
  if (followers.empty()) throw Error(ErrorCode::NoFollower, "every agent has an all-zero adjacency row");
  if (leaders.empty()) throw Error(ErrorCode::NoLeader, "every agent has at least one neighbor");

  Topology t;
  t.n_followers_ = followers.size();
  t.canonical_to_user_ = followers;
  t.canonical_to_user_.insert(t.canonical_to_user_.end(), leaders.begin(), leaders.end());
  t.user_to_canonical_.assign(n, 0);
  for (std::size_t c = 0; c < n; ++c) t.user_to_canonical_[t.canonical_to_user_[c]] = c;

  t.adjacency_ = Matrix(n, n);
  t.neighbors_.assign(n, {});
  t.labels_.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    t.labels_.push_back(labels[t.canonical_to_user_[c]]);
    for (std::size_t d = 0; d < n; ++d) {
      t.adjacency_(c, d) = adjacency(t.canonical_to_user_[c], t.canonical_to_user_[d]);
      if (t.adjacency_(c, d) != 0.0) t.neighbors_[c].push_back(d);
    }
  }
  return t;
}

GraphCheckReport check_graph(const Topology& t) {
  GraphCheckReport report;
  const std::size_t m = t.n_followers();
  const std::size_t n = t.n_agents();
  const Matrix& a = t.adjacency();

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && a(i, j) != a(j, i) && a(i, j) != 0.0) {
        report.follower_subgraph_undirected = false;
        report.asymmetric_edges.emplace_back(t.labels()[i], t.labels()[j]);
      }
    }
  }

  // Information flows j -> i when a_ij = 1; sweep forward from every leader.
  std::vector<bool> reached(n, false);
  std::deque<std::size_t> frontier;
  for (std::size_t l = m; l < n; ++l) {
    reached[l] = true;
    frontier.push_back(l);
  }
  while (!frontier.empty()) {
    const std::size_t j = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < n; ++i) {
      if (!reached[i] && a(i, j) != 0.0) {
        reached[i] = true;
        frontier.push_back(i);
      }
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!reached[i]) report.unreachable_followers.push_back(t.labels()[i]);

  return report;
}

Matrix laplacian(const Topology& t) {
  const std::size_t n = t.n_agents();
  const Matrix& a = t.adjacency();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      l(i, j) = -a(i, j);
      degree += a(i, j);
    }
    l(i, i) = degree;
  }
  return l;
}

LaplacianPartition partition_laplacian(const Topology& t) {
  const std::size_t m = t.n_followers();
  const std::size_t n = t.n_agents();

  LaplacianPartition part;
  part.laplacian = laplacian(t);
  part.l1 = part.laplacian.block(0, 0, m, m);
  part.l2 = part.laplacian.block(0, m, m, n - m);
  part.weights = solve_linear(part.l1, -part.l2);
  part.lambda_min_l1 = lambda_min(part.l1);
  if (!(part.lambda_min_l1 > 0.0)) {
    throw Error(ErrorCode::Singular, "partition_laplacian: L1 is not positive definite");
  }
  return part;
}

Matrix clamp_for_report(const Matrix& weights) {
  Matrix w = weights;
  for (auto& v : w.data())
    if (v < 0.0 && v >= -1e-12) v = 0.0;
  return w;
}

}  // namespace contain

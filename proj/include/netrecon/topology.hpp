#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace netrecon {

/// Directed, unweighted interaction graph. Storage is 0-based; the text
/// formats use 1-based labels. `influences(i, k)` is true when node i is
/// driven by node k.
class Network {
 public:
  explicit Network(int n_nodes);
  static Network from_adjacency(const Eigen::MatrixXi& adjacency);

  int size() const { return static_cast<int>(adjacency_.rows()); }
  bool influences(int target, int source) const { return adjacency_(target, source) != 0; }
  void set_edge(int target, int source, bool present = true);

  int edge_count() const;
  /// (target, source) pairs, 0-based, row-major order.
  std::vector<std::pair<int, int>> edges() const;
  const Eigen::MatrixXi& adjacency() const { return adjacency_; }

  friend bool operator==(const Network& a, const Network& b) {
    return a.adjacency_.rows() == b.adjacency_.rows() && a.adjacency_ == b.adjacency_;
  }

 private:
  Eigen::MatrixXi adjacency_;
};

struct RecoveryScore {
  int false_positives = 0;
  int false_negatives = 0;

  int total() const { return false_positives + false_negatives; }
  friend bool operator==(const RecoveryScore&, const RecoveryScore&) = default;
};

/// Node 1 is the hub; every other node is driven by it.
Network make_star(int n);

enum class HubLink { AToB, BToA };

/// Two stars whose hubs are joined by a single directed link. Node 1 is hub A,
/// node 2 is hub B, then A's leaves, then B's leaves.
Network make_twin_stars(int leaves_a, int leaves_b, HubLink link = HubLink::AToB);

/// Node i+1 is driven by node i; node 1 is driven by node n.
Network make_ring(int n);

RecoveryScore compare(const Network& truth, const Network& recovered);

/// `nodes N` header followed by one `i k` line (1-based, i <- k) per edge.
std::string to_edge_list(const Network& network);
Network parse_edge_list(std::string_view text);

}  // namespace netrecon

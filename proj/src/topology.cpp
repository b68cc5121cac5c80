#include "netrecon/topology.hpp"

#include <sstream>

#include "netrecon/error.hpp"

namespace netrecon {

namespace {
constexpr const char* kStage = "topology";
}

Network::Network(int n_nodes) {
  if (n_nodes < 1) throw Error(kStage, "network needs at least one node");
  adjacency_ = Eigen::MatrixXi::Zero(n_nodes, n_nodes);
}

Network Network::from_adjacency(const Eigen::MatrixXi& adjacency) {
  if (adjacency.rows() != adjacency.cols())
    throw Error(kStage, "adjacency matrix must be square");
  Network net(static_cast<int>(adjacency.rows()));
  for (int i = 0; i < adjacency.rows(); ++i) {
    for (int k = 0; k < adjacency.cols(); ++k) {
      const int a = adjacency(i, k);
      if (a != 0 && a != 1) throw Error(kStage, "adjacency entries must be 0 or 1");
      if (a == 1) net.set_edge(i, k);
    }
  }
  return net;
}

void Network::set_edge(int target, int source, bool present) {
  if (target < 0 || source < 0 || target >= size() || source >= size())
    throw Error(kStage, "edge endpoint out of range");
  if (target == source) throw Error(kStage, "self-edges are not allowed");
  adjacency_(target, source) = present ? 1 : 0;
}

int Network::edge_count() const { return adjacency_.sum(); }

std::vector<std::pair<int, int>> Network::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int k = 0; k < size(); ++k)
      if (adjacency_(i, k) != 0) out.emplace_back(i, k);
  return out;
}

Network make_star(int n) {
  if (n < 2) throw Error(kStage, "star needs n >= 2");
  Network net(n);
  for (int i = 1; i < n; ++i) net.set_edge(i, 0);
  return net;
}

Network make_twin_stars(int leaves_a, int leaves_b, HubLink link) {
  if (leaves_a < 1 || leaves_b < 1) throw Error(kStage, "twin stars need at least one leaf per hub");
  Network net(2 + leaves_a + leaves_b);
  const int hub_a = 0;
  const int hub_b = 1;
  for (int j = 0; j < leaves_a; ++j) net.set_edge(2 + j, hub_a);
  for (int j = 0; j < leaves_b; ++j) net.set_edge(2 + leaves_a + j, hub_b);
  if (link == HubLink::AToB)
    net.set_edge(hub_b, hub_a);
  else
    net.set_edge(hub_a, hub_b);
  return net;
}

Network make_ring(int n) {
  if (n < 3) throw Error(kStage, "ring needs n >= 3");
  Network net(n);
  for (int i = 0; i < n; ++i) net.set_edge((i + 1) % n, i);
  return net;
}

RecoveryScore compare(const Network& truth, const Network& recovered) {
  if (truth.size() != recovered.size())
    throw Error(kStage, "cannot compare networks of different sizes");
  RecoveryScore score;
  const auto& t = truth.adjacency();
  const auto& r = recovered.adjacency();
  for (int i = 0; i < truth.size(); ++i) {
    for (int k = 0; k < truth.size(); ++k) {
      if (r(i, k) == 1 && t(i, k) == 0) ++score.false_positives;
      if (t(i, k) == 1 && r(i, k) == 0) ++score.false_negatives;
    }
  }
  return score;
}

std::string to_edge_list(const Network& network) {
  std::ostringstream out;
  out << "nodes " << network.size() << '\n';
  for (const auto& [target, source] : network.edges()) out << target + 1 << ' ' << source + 1 << '\n';
  return out.str();
}

Network parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string keyword;
  int n = 0;
  if (!(in >> keyword >> n) || keyword != "nodes")
    throw Error(kStage, "edge list must start with 'nodes N'");
  Network net(n);
  int target = 0;
  int source = 0;
  while (in >> target >> source) {
    if (target < 1 || source < 1 || target > n || source > n)
      throw Error(kStage, "edge label out of range in edge list");
    net.set_edge(target - 1, source - 1);
  }
  if (!in.eof()) throw Error(kStage, "malformed edge line");
  return net;
}

}  // namespace netrecon

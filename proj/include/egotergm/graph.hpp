#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace egotergm {

/// Undirected simple graph on nodes 0..n-1 with named real-valued node
/// attributes and symmetric dyad attributes. One annual slice of a network.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  int size() const { return n_; }

  bool has_edge(int i, int j) const { return adj_[index(i, j)] != 0; }
  void set_edge(int i, int j, bool on);
  void toggle(int i, int j) { set_edge(i, j, !has_edge(i, j)); }

  int degree(int i) const { return degree_[static_cast<std::size_t>(i)]; }
  int edge_count() const { return edges_; }
  std::vector<int> neighbors(int i) const;
  int common_neighbors(int i, int j) const;

  void set_node_attr(std::string name, std::vector<double> values);
  /// nullptr when the attribute is not defined on this graph.
  const std::vector<double>* node_attr(std::string_view name) const;
  const std::map<std::string, std::vector<double>, std::less<>>& node_attrs() const {
    return node_attrs_;
  }

  /// Dyad attributes are stored as dense symmetric n*n matrices; unset
  /// entries are 0.
  void set_dyad_attr(const std::string& name, int i, int j, double value);
  void ensure_dyad_attr(const std::string& name);
  const std::vector<double>* dyad_attr(std::string_view name) const;
  const std::map<std::string, std::vector<double>, std::less<>>& dyad_attrs() const {
    return dyad_attrs_;
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
  }

  void clear_edges();

  bool operator==(const Graph&) const = default;

 private:
  int n_ = 0;
  int edges_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<int> degree_;
  std::map<std::string, std::vector<double>, std::less<>> node_attrs_;
  std::map<std::string, std::vector<double>, std::less<>> dyad_attrs_;
};

}  // namespace egotergm

#include "egotergm/graph.hpp"

#include <stdexcept>

namespace egotergm {

Graph::Graph(int n)
    : n_(n),
      adj_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0),
      degree_(static_cast<std::size_t>(n), 0) {
  if (n < 0) throw std::invalid_argument("Graph: negative node count");
}

void Graph::set_edge(int i, int j, bool on) {
  if (i == j) throw std::invalid_argument("Graph: self-loops are not allowed");
  const bool was = has_edge(i, j);
  if (was == on) return;
  const std::uint8_t v = on ? 1 : 0;
  adj_[index(i, j)] = v;
  adj_[index(j, i)] = v;
  const int delta = on ? 1 : -1;
  degree_[static_cast<std::size_t>(i)] += delta;
  degree_[static_cast<std::size_t>(j)] += delta;
  edges_ += delta;
}

std::vector<int> Graph::neighbors(int i) const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(degree(i)));
  for (int k = 0; k < n_; ++k)
    if (adj_[index(i, k)]) out.push_back(k);
  return out;
}

int Graph::common_neighbors(int i, int j) const {
  const std::uint8_t* ri = &adj_[index(i, 0)];
  const std::uint8_t* rj = &adj_[index(j, 0)];
  int count = 0;
  for (int k = 0; k < n_; ++k) count += ri[k] & rj[k];
  return count;
}

void Graph::set_node_attr(std::string name, std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("Graph: node attribute '" + name + "' has wrong length");
  node_attrs_[std::move(name)] = std::move(values);
}

const std::vector<double>* Graph::node_attr(std::string_view name) const {
  auto it = node_attrs_.find(name);
  return it == node_attrs_.end() ? nullptr : &it->second;
}

void Graph::ensure_dyad_attr(const std::string& name) {
  auto& m = dyad_attrs_[name];
  if (m.empty()) m.assign(adj_.size(), 0.0);
}

void Graph::set_dyad_attr(const std::string& name, int i, int j, double value) {
  ensure_dyad_attr(name);
  auto& m = dyad_attrs_[name];
  m[index(i, j)] = value;
  m[index(j, i)] = value;
}

const std::vector<double>* Graph::dyad_attr(std::string_view name) const {
  auto it = dyad_attrs_.find(name);
  return it == dyad_attrs_.end() ? nullptr : &it->second;
}

void Graph::clear_edges() {
  std::fill(adj_.begin(), adj_.end(), 0);
  std::fill(degree_.begin(), degree_.end(), 0);
  edges_ = 0;
}

}  // namespace egotergm

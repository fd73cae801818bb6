#pragma once

#include "sigcum/json_io.hpp"
#include "sigcum/tensor.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sigcum {

// Edge into a node: the jump happens at times[depth] with conditional probability `prob`.
template <class S>
struct TreeNode {
  int id = 0;
  int parent = -1;
  int depth = 0;
  S prob = S(1);
  Tensor<S> jump{AlgebraShape(1, 0)};
  std::vector<int> children;
};

// Values of an adapted process, indexed by node position.
template <class S>
using AdaptedTensorProcess = std::vector<Tensor<S>>;

// Finite filtration tree, one layer per grid time t_0 < ... < t_M. Node 0 is the root.
template <class S>
class FiniteTreeModel {
 public:
  FiniteTreeModel(AlgebraShape shape, std::vector<double> times, std::vector<TreeNode<S>> nodes)
      : shape_(std::move(shape)), times_(std::move(times)), nodes_(std::move(nodes)) {
    validate();
    postorder_.reserve(nodes_.size());
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& ch = nodes_[static_cast<std::size_t>(v)].children;
      if (next < ch.size()) {
        const int c = ch[next++];
        stack.push_back({c, 0});
      } else {
        postorder_.push_back(v);
        stack.pop_back();
      }
    }
  }

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<double>& times() const { return times_; }
  int steps() const { return static_cast<int>(times_.size()) - 1; }
  std::size_t size() const { return nodes_.size(); }
  const TreeNode<S>& node(int v) const { return nodes_.at(static_cast<std::size_t>(v)); }
  const std::vector<TreeNode<S>>& nodes() const { return nodes_; }
  bool is_leaf(int v) const { return node(v).children.empty(); }
  double time(int v) const { return times_[static_cast<std::size_t>(node(v).depth)]; }
  // Children before parents.
  const std::vector<int>& postorder() const { return postorder_; }

  int index_of(int id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].id == id) return static_cast<int>(i);
    throw InputError("no tree node with id " + std::to_string(id));
  }

  // The same tree with every jump replaced by f(jump).
  template <class F>
  FiniteTreeModel map_jumps(F&& f) const {
    auto nodes = nodes_;
    for (std::size_t i = 1; i < nodes.size(); ++i) nodes[i].jump = f(nodes[i].jump);
    return FiniteTreeModel(shape_, times_, std::move(nodes));
  }

 private:
  void validate() const {
    if (times_.empty()) throw DomainError("tree needs at least one time");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i] > times_[i - 1])) throw DomainError("tree times must be strictly increasing");
    if (nodes_.empty() || nodes_[0].parent != -1) throw DomainError("tree node 0 must be the root");
    const int m = steps();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& n = nodes_[i];
      if (i > 0) {
        if (n.parent < 0 || n.parent >= static_cast<int>(nodes_.size()))
          throw DomainError("tree node " + std::to_string(n.id) + " has no valid parent");
        if (!(n.prob > S(0)))
          throw DomainError("tree node " + std::to_string(n.id) + ": edge probabilities must be positive");
        require_same_shape(shape_, n.jump.shape(), "tree jump");
        require_T0(n.jump, "tree jump");
      }
      if (n.children.empty() && n.depth != m)
        throw DomainError("tree leaf " + std::to_string(n.id) + " is not at the terminal layer");
      if (n.children.empty()) continue;
      S total(0);
      for (int c : n.children) total += nodes_[static_cast<std::size_t>(c)].prob;
      const bool ok = std::is_same_v<S, Rational> ? total == S(1)
                                                  : std::abs(to_double(total) - 1.0) <= 1e-12;
      if (!ok)
        throw DomainError("tree node " + std::to_string(n.id) + ": child probabilities sum to " +
                          std::to_string(to_double(total)) + ", not 1");
    }
  }

  AlgebraShape shape_;
  std::vector<double> times_;
  std::vector<TreeNode<S>> nodes_;
  std::vector<int> postorder_;
};

template <class S>
class TreeBuilder {
 public:
  TreeBuilder(AlgebraShape shape, std::vector<double> times) : shape_(std::move(shape)), times_(std::move(times)) {
    TreeNode<S> r;
    r.jump = Tensor<S>(shape_);
    nodes_.push_back(std::move(r));
  }

  int root() const { return 0; }

  int add_child(int parent, S prob, Tensor<S> jump, std::optional<int> id = std::nullopt) {
    if (parent < 0 || parent >= static_cast<int>(nodes_.size())) throw DomainError("unknown parent node");
    const int depth = nodes_[static_cast<std::size_t>(parent)].depth + 1;
    if (depth >= static_cast<int>(times_.size())) throw DomainError("tree deeper than its time grid");
    const int v = static_cast<int>(nodes_.size());
    TreeNode<S> n;
    n.id = id.value_or(v);
    n.parent = parent;
    n.depth = depth;
    n.prob = std::move(prob);
    n.jump = std::move(jump);
    nodes_.push_back(std::move(n));
    nodes_[static_cast<std::size_t>(parent)].children.push_back(v);
    return v;
  }

  void set_root_id(int id) { nodes_[0].id = id; }

  FiniteTreeModel<S> build() const { return FiniteTreeModel<S>(shape_, times_, nodes_); }

 private:
  AlgebraShape shape_;
  std::vector<double> times_;
  std::vector<TreeNode<S>> nodes_;
};

// {"times": [...], "nodes": [{"id", "parent" (null for the root), "prob", "jump": tensor}]}.
// Jumps are padded or truncated to `depth` when given; otherwise the first jump fixes N.
template <class S>
FiniteTreeModel<S> tree_from_json(const json& j, std::optional<int> depth = std::nullopt) {
  try {
    if (!j.is_object() || !j.contains("times") || !j["times"].is_array() || !j.contains("nodes") ||
        !j["nodes"].is_array())
      throw InputError("tree JSON needs 'times' and 'nodes' arrays");
    const auto times = j["times"].get<std::vector<double>>();
    const json& nodes = j["nodes"];
    // Find the root and the alphabet.
    std::optional<int> root_id;
    std::optional<AlgebraShape> shape;
    std::map<int, std::vector<std::size_t>> kids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const json& n = nodes[i];
      const int id = json_int_field(n, "id");
      const bool is_root = !n.contains("parent") || n["parent"].is_null();
      if (is_root) {
        if (root_id) throw InputError("tree JSON has more than one root");
        root_id = id;
      } else {
        kids[json_int_field(n, "parent")].push_back(i);
        if (!n.contains("jump")) throw InputError("tree node " + std::to_string(id) + " needs a 'jump'");
        const auto jt = tensor_from_json<S>(n["jump"]);
        if (!shape) shape = AlgebraShape(jt.dim(), depth.value_or(jt.depth()));
        if (jt.dim() != shape->dim()) throw InputError("tree jumps disagree on the alphabet size");
      }
    }
    if (!root_id) throw InputError("tree JSON has no root");
    if (!shape) {
      if (!j.contains("d")) throw InputError("single-node tree JSON needs 'd'");
      shape = AlgebraShape(json_int_field(j, "d"), depth.value_or(json_int_field(j, "N")));
    }
    TreeBuilder<S> b(*shape, times);
    b.set_root_id(*root_id);
    std::vector<std::pair<int, int>> queue{{*root_id, 0}};
    std::size_t seen = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto [id, v] = queue[q];
      for (std::size_t i : kids[id]) {
        const json& n = nodes[i];
        if (!n.contains("prob")) throw InputError("tree node needs 'prob'");
        auto jump = resize_depth(tensor_from_json<S>(n["jump"]), shape->depth());
        const int cid = json_int_field(n, "id");
        queue.push_back({cid, b.add_child(v, scalar_from_json<S>(n["prob"]), std::move(jump), cid)});
        ++seen;
      }
    }
    if (seen != nodes.size()) throw InputError("tree JSON has nodes not connected to the root");
    return b.build();
  } catch (const json::exception& e) {
    throw InputError(std::string("tree JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(std::string("tree JSON: ") + e.what());
  }
}

extern template class FiniteTreeModel<double>;
extern template class FiniteTreeModel<Rational>;

}  // namespace sigcum

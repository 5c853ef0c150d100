// Connes–Kreimer Hopf algebra of labelled rooted forests, truncated at N nodes.
//
// Trees and forests are kept in a canonical form (children sorted by a total
// order), so structural equality is value equality. Characters are stored by
// their values on trees; forest values follow by multiplicativity.
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace regrecon::hopf {

class Forest;

class Tree {
 public:
  Tree(int label, std::vector<Tree> children = {});

  int label() const { return label_; }
  const std::vector<Tree>& children() const { return children_; }
  int node_count() const { return nodes_; }
  Forest children_forest() const;

  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);
  friend bool operator==(const Tree& a, const Tree& b) { return (a <=> b) == 0; }

 private:
  int label_;
  int nodes_;
  std::vector<Tree> children_;
};

class Forest {
 public:
  Forest() = default;
  explicit Forest(std::vector<Tree> trees);
  Forest(const Tree& t) : trees_{t} {}  // NOLINT: a tree is a one-tree forest

  const std::vector<Tree>& trees() const { return trees_; }
  bool empty() const { return trees_.empty(); }
  int node_count() const;

  friend Forest operator*(const Forest& a, const Forest& b);
  friend std::strong_ordering operator<=>(const Forest& a, const Forest& b);
  friend bool operator==(const Forest& a, const Forest& b) { return (a <=> b) == 0; }

 private:
  std::vector<Tree> trees_;
};

// [f]_j: attach the trees of f below a new root labelled j.
Tree graft(const Forest& f, int j, int N);

std::string to_string(const Tree& t);
std::string to_string(const Forest& f);
// Accepts the printed form; ASCII spellings 'o' for the node and '.' for the
// product are accepted too.
Forest parse_forest(std::string_view text);

// All canonical trees with labels 1..d and at most N nodes, ordered by
// (node count, canonical order).
std::vector<Tree> enumerate_trees(int d, int N);
// All forests with at most N nodes including the empty forest (first).
std::vector<Forest> enumerate_forests(int d, int N);

// Δf as a map (left, right) -> coefficient; the left leg carries the pruned
// forest, the right leg the trunk.
using TensorExpansion = std::map<std::pair<Forest, Forest>, std::int64_t>;
using TripleExpansion = std::map<std::tuple<Forest, Forest, Forest>, std::int64_t>;

TensorExpansion coproduct(const Forest& f, int N);
TripleExpansion coproduct_left_twice(const Forest& f, int N);   // (Δ⊗id)Δ
TripleExpansion coproduct_right_twice(const Forest& f, int N);  // (id⊗Δ)Δ

// Index tables of the truncated algebra. Forests are indexed in the order of
// enumerate_forests, trees in the order of enumerate_trees.
class TruncatedAlgebra {
 public:
  struct Term {
    int left;   // forest index
    int right;  // forest index
    std::int64_t coef;
  };

  TruncatedAlgebra(int d, int N);

  int d() const { return d_; }
  int N() const { return N_; }
  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<Forest>& forests() const { return forests_; }
  int tree_index(const Tree& t) const;
  int forest_index(const Forest& f) const;
  // The trees of forest i as tree indices (with repetition).
  const std::vector<int>& forest_trees(int i) const { return forest_trees_[i]; }
  // Forest index of the one-tree forest for tree i.
  int tree_as_forest(int i) const { return tree_forest_[i]; }
  int forest_nodes(int i) const { return forests_[i].node_count(); }
  const std::vector<Term>& coproduct_terms(int forest) const { return terms_[forest]; }
  // Forest index of the one-tree forest [forest]_j, or -1 beyond truncation.
  int graft_index(int forest, int j) const;

 private:
  int d_, N_;
  std::vector<Tree> trees_;
  std::vector<Forest> forests_;
  std::map<Tree, int> tree_idx_;
  std::map<Forest, int> forest_idx_;
  std::vector<std::vector<int>> forest_trees_;
  std::vector<int> tree_forest_;
  std::vector<std::vector<Term>> terms_;
  std::vector<std::vector<int>> graft_;
};

std::shared_ptr<const TruncatedAlgebra> make_algebra(int d, int N);

// A character of G_N(H), determined by its values on trees.
template <class S>
class Character {
 public:
  explicit Character(std::shared_ptr<const TruncatedAlgebra> alg)
      : alg_(std::move(alg)), tree_values_(alg_->trees().size(), S(0)) {}
  Character(std::shared_ptr<const TruncatedAlgebra> alg, std::vector<S> tree_values)
      : alg_(std::move(alg)), tree_values_(std::move(tree_values)) {
    if (tree_values_.size() != alg_->trees().size())
      throw std::invalid_argument("character: wrong number of tree values");
  }

  const TruncatedAlgebra& algebra() const { return *alg_; }
  const std::shared_ptr<const TruncatedAlgebra>& algebra_ptr() const { return alg_; }
  const std::vector<S>& tree_values() const { return tree_values_; }
  S& operator[](int tree) { return tree_values_[tree]; }
  const S& operator[](int tree) const { return tree_values_[tree]; }

  S value(const Tree& t) const { return tree_values_[alg_->tree_index(t)]; }
  S forest_value(int forest) const {
    S v(1);
    for (int t : alg_->forest_trees(forest)) v *= tree_values_[t];
    return v;
  }
  S value(const Forest& f) const { return forest_value(alg_->forest_index(f)); }

 private:
  std::shared_ptr<const TruncatedAlgebra> alg_;
  std::vector<S> tree_values_;
};

template <class S>
Character<S> counit(std::shared_ptr<const TruncatedAlgebra> alg) {
  return Character<S>(std::move(alg));
}

template <class S>
Character<S> char_product(const Character<S>& g, const Character<S>& h) {
  if (g.algebra_ptr() != h.algebra_ptr() &&
      (g.algebra().d() != h.algebra().d() || g.algebra().N() != h.algebra().N()))
    throw std::invalid_argument("char_product: mismatched truncation");
  const auto& alg = g.algebra();
  Character<S> out(g.algebra_ptr());
  for (std::size_t t = 0; t < alg.trees().size(); ++t) {
    S acc(0);
    for (const auto& term : alg.coproduct_terms(alg.tree_as_forest(static_cast<int>(t))))
      acc += S(term.coef) * g.forest_value(term.left) * h.forest_value(term.right);
    out[static_cast<int>(t)] = acc;
  }
  return out;
}

// g^{-1}(τ) = -Σ_{left ≠ 1} c g(left) g^{-1}(right), by increasing node count.
template <class S>
Character<S> char_inverse(const Character<S>& g) {
  const auto& alg = g.algebra();
  Character<S> inv(g.algebra_ptr());
  for (std::size_t t = 0; t < alg.trees().size(); ++t) {
    S acc(0);
    for (const auto& term : alg.coproduct_terms(alg.tree_as_forest(static_cast<int>(t)))) {
      if (term.left == 0) continue;
      acc += S(term.coef) * g.forest_value(term.left) * inv.forest_value(term.right);
    }
    inv[static_cast<int>(t)] = -acc;
  }
  return inv;
}

// Exact checks over all forests with at most N nodes: coassociativity, both
// counit laws, and the group laws on random rational characters.
struct SelfTestReport {
  int d = 0, N = 0;
  std::vector<int> trees_by_nodes;    // [n] = number of trees with n nodes
  std::vector<int> forests_by_nodes;  // including the empty forest at n = 0
  bool coassociative = true, counit = true, associative = true, unit = true, inverse = true;
  int characters = 0;
  bool ok() const { return coassociative && counit && associative && unit && inverse; }
};
SelfTestReport self_test(int d, int N, std::uint64_t seed, int characters = 4);

}  // namespace regrecon::hopf

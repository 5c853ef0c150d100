#include "regrecon/hopf.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <functional>
#include <random>

namespace regrecon::hopf {

Tree::Tree(int label, std::vector<Tree> children)
    : label_(label), nodes_(1), children_(std::move(children)) {
  if (label < 1) throw std::invalid_argument("tree labels start at 1");
  std::sort(children_.begin(), children_.end());
  for (const auto& c : children_) nodes_ += c.nodes_;
}

Forest Tree::children_forest() const { return Forest(children_); }

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
  if (auto c = a.nodes_ <=> b.nodes_; c != 0) return c;
  if (auto c = a.label_ <=> b.label_; c != 0) return c;
  if (auto c = a.children_.size() <=> b.children_.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.children_.size(); ++i)
    if (auto c = a.children_[i] <=> b.children_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

Forest::Forest(std::vector<Tree> trees) : trees_(std::move(trees)) {
  std::sort(trees_.begin(), trees_.end());
}

int Forest::node_count() const {
  int n = 0;
  for (const auto& t : trees_) n += t.node_count();
  return n;
}

Forest operator*(const Forest& a, const Forest& b) {
  std::vector<Tree> all = a.trees_;
  all.insert(all.end(), b.trees_.begin(), b.trees_.end());
  return Forest(std::move(all));
}

std::strong_ordering operator<=>(const Forest& a, const Forest& b) {
  if (auto c = a.node_count() <=> b.node_count(); c != 0) return c;
  if (auto c = a.trees_.size() <=> b.trees_.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.trees_.size(); ++i)
    if (auto c = a.trees_[i] <=> b.trees_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

Tree graft(const Forest& f, int j, int N) {
  if (f.node_count() + 1 > N) throw std::invalid_argument("graft: exceeds truncation N");
  return Tree(j, f.trees());
}

// ---------------------------------------------------------------- text form

std::string to_string(const Tree& t) {
  std::string lab = std::to_string(t.label());
  if (t.children().empty()) return "•" + lab;
  return "[" + to_string(t.children_forest()) + "]" + lab;
}

std::string to_string(const Forest& f) {
  if (f.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < f.trees().size(); ++i) {
    if (i) s += "·";
    s += to_string(f.trees()[i]);
  }
  return s;
}

namespace {

struct Parser {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("forest parse error at byte " + std::to_string(pos) + ": " +
                                what);
  }
  bool eat(std::string_view tok) {
    if (s.substr(pos, tok.size()) == tok) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  bool eat_node() { return eat("•") || eat("o"); }
  bool eat_product() { return eat("·") || eat("."); }
  int label() {
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (start == pos) fail("expected a label");
    return std::stoi(std::string(s.substr(start, pos - start)));
  }
  Tree tree() {
    if (eat_node()) return Tree(label());
    if (eat("[")) {
      Forest inner = forest();
      if (!eat("]")) fail("expected ']'");
      return Tree(label(), inner.trees());
    }
    fail("expected a tree");
  }
  Forest forest() {
    if (eat("1")) return Forest();
    std::vector<Tree> ts{tree()};
    while (eat_product()) ts.push_back(tree());
    return Forest(std::move(ts));
  }
};

}  // namespace

Forest parse_forest(std::string_view text) {
  Parser p{text};
  Forest f = p.forest();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

// -------------------------------------------------------------- enumeration

namespace {

// Multisets of trees drawn from pool[from..] with total node count exactly n.
void multisets(const std::vector<Tree>& pool, std::size_t from, int n, std::vector<Tree>& cur,
               std::vector<std::vector<Tree>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = from; i < pool.size(); ++i) {
    if (pool[i].node_count() > n) continue;
    cur.push_back(pool[i]);
    multisets(pool, i, n - pool[i].node_count(), cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Tree> enumerate_trees(int d, int N) {
  if (d < 1 || N < 1) throw std::invalid_argument("enumerate_trees: need d >= 1, N >= 1");
  std::vector<Tree> trees;
  for (int n = 1; n <= N; ++n) {
    // Children forests of n-1 nodes built from the trees found so far.
    std::vector<std::vector<Tree>> kids;
    std::vector<Tree> cur;
    multisets(trees, 0, n - 1, cur, kids);
    std::vector<Tree> level;
    for (int j = 1; j <= d; ++j)
      for (const auto& k : kids) level.emplace_back(j, k);
    std::sort(level.begin(), level.end());
    trees.insert(trees.end(), level.begin(), level.end());
  }
  return trees;
}

std::vector<Forest> enumerate_forests(int d, int N) {
  auto trees = enumerate_trees(d, N);
  std::vector<Forest> out{Forest()};
  for (int n = 1; n <= N; ++n) {
    std::vector<std::vector<Tree>> ms;
    std::vector<Tree> cur;
    multisets(trees, 0, n, cur, ms);
    std::vector<Forest> level;
    for (auto& m : ms) level.emplace_back(std::move(m));
    std::sort(level.begin(), level.end());
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// ---------------------------------------------------------------- coproduct

namespace {

TensorExpansion multiply(const TensorExpansion& a, const TensorExpansion& b) {
  TensorExpansion out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) out[{ka.first * kb.first, ka.second * kb.second}] += ca * cb;
  return out;
}

TensorExpansion coproduct_tree(const Tree& t) {
  // Δ B_j(f) = B_j(f) ⊗ 1 + (id ⊗ B_j) Δf
  TensorExpansion out;
  out[{Forest(t), Forest()}] += 1;
  TensorExpansion inner{{{Forest(), Forest()}, 1}};
  for (const auto& c : t.children()) inner = multiply(inner, coproduct_tree(c));
  for (const auto& [k, c] : inner)
    out[{k.first, Forest(Tree(t.label(), k.second.trees()))}] += c;
  return out;
}

}  // namespace

TensorExpansion coproduct(const Forest& f, int N) {
  if (f.node_count() > N) throw std::invalid_argument("coproduct: forest exceeds truncation N");
  TensorExpansion out{{{Forest(), Forest()}, 1}};
  for (const auto& t : f.trees()) out = multiply(out, coproduct_tree(t));
  return out;
}

TripleExpansion coproduct_left_twice(const Forest& f, int N) {
  TripleExpansion out;
  for (const auto& [k, c] : coproduct(f, N))
    for (const auto& [k2, c2] : coproduct(k.first, N))
      out[{k2.first, k2.second, k.second}] += c * c2;
  return out;
}

TripleExpansion coproduct_right_twice(const Forest& f, int N) {
  TripleExpansion out;
  for (const auto& [k, c] : coproduct(f, N))
    for (const auto& [k2, c2] : coproduct(k.second, N))
      out[{k.first, k2.first, k2.second}] += c * c2;
  return out;
}

// ---------------------------------------------------------- index tables

TruncatedAlgebra::TruncatedAlgebra(int d, int N)
    : d_(d), N_(N), trees_(enumerate_trees(d, N)), forests_(enumerate_forests(d, N)) {
  for (std::size_t i = 0; i < trees_.size(); ++i) tree_idx_[trees_[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < forests_.size(); ++i)
    forest_idx_[forests_[i]] = static_cast<int>(i);
  forest_trees_.resize(forests_.size());
  for (std::size_t i = 0; i < forests_.size(); ++i)
    for (const auto& t : forests_[i].trees()) forest_trees_[i].push_back(tree_idx_.at(t));
  for (const auto& t : trees_) tree_forest_.push_back(forest_idx_.at(Forest(t)));
  terms_.resize(forests_.size());
  for (std::size_t i = 0; i < forests_.size(); ++i)
    for (const auto& [k, c] : coproduct(forests_[i], N))
      terms_[i].push_back({forest_idx_.at(k.first), forest_idx_.at(k.second), c});
  graft_.assign(forests_.size(), std::vector<int>(d + 1, -1));
  for (std::size_t i = 0; i < forests_.size(); ++i)
    if (forests_[i].node_count() + 1 <= N)
      for (int j = 1; j <= d; ++j)
        graft_[i][j] = forest_idx_.at(Forest(Tree(j, forests_[i].trees())));
}

int TruncatedAlgebra::tree_index(const Tree& t) const {
  auto it = tree_idx_.find(t);
  if (it == tree_idx_.end()) throw std::out_of_range("tree not in truncated algebra");
  return it->second;
}

int TruncatedAlgebra::forest_index(const Forest& f) const {
  auto it = forest_idx_.find(f);
  if (it == forest_idx_.end()) throw std::out_of_range("forest not in truncated algebra");
  return it->second;
}

int TruncatedAlgebra::graft_index(int forest, int j) const {
  if (j < 1 || j > d_) throw std::out_of_range("graft label out of range");
  return graft_[forest][j];
}

std::shared_ptr<const TruncatedAlgebra> make_algebra(int d, int N) {
  return std::make_shared<const TruncatedAlgebra>(d, N);
}

// ------------------------------------------------------------- self test

SelfTestReport self_test(int d, int N, std::uint64_t seed, int characters) {
  using Q = boost::rational<std::int64_t>;
  SelfTestReport rep;
  rep.d = d;
  rep.N = N;
  rep.characters = characters;
  rep.trees_by_nodes.assign(N + 1, 0);
  rep.forests_by_nodes.assign(N + 1, 0);
  for (const auto& t : enumerate_trees(d, N)) ++rep.trees_by_nodes[t.node_count()];
  const auto forests = enumerate_forests(d, N);
  for (const auto& f : forests) ++rep.forests_by_nodes[f.node_count()];

  for (const auto& f : forests) {
    if (coproduct_left_twice(f, N) != coproduct_right_twice(f, N)) rep.coassociative = false;
    TensorExpansion left_unit, right_unit;
    for (const auto& [lr, c] : coproduct(f, N)) {
      if (lr.first.empty()) left_unit[lr] = c;
      if (lr.second.empty()) right_unit[lr] = c;
    }
    const TensorExpansion want_l{{{Forest(), f}, 1}}, want_r{{{f, Forest()}, 1}};
    if (left_unit != want_l || right_unit != want_r) rep.counit = false;
  }

  auto alg = make_algebra(d, N);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  std::vector<Character<Q>> gs;
  for (int c = 0; c < characters; ++c) {
    std::vector<Q> v;
    for (std::size_t t = 0; t < alg->trees().size(); ++t) {
      const int a = num(rng);
      v.emplace_back(a, den(rng));
    }
    gs.emplace_back(alg, std::move(v));
  }
  const auto e = counit<Q>(alg);
  auto same = [](const Character<Q>& a, const Character<Q>& b) {
    return a.tree_values() == b.tree_values();
  };
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const auto& g = gs[i];
    const auto& h = gs[(i + 1) % gs.size()];
    const auto& k = gs[(i + 2) % gs.size()];
    if (!same(char_product(char_product(g, h), k), char_product(g, char_product(h, k))))
      rep.associative = false;
    if (!same(char_product(e, g), g) || !same(char_product(g, e), g)) rep.unit = false;
    const auto gi = char_inverse(g);
    if (!same(char_product(g, gi), e) || !same(char_product(gi, g), e)) rep.inverse = false;
  }
  return rep;
}

}  // namespace regrecon::hopf

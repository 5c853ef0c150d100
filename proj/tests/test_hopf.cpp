#include "regrecon/hopf.hpp"

#include <boost/rational.hpp>
#include <doctest.h>

#include <random>

using namespace regrecon::hopf;
using Q = boost::rational<std::int64_t>;

namespace {

std::vector<int> count_by_nodes(const std::vector<Tree>& ts, int N) {
  std::vector<int> c(N + 1, 0);
  for (const auto& t : ts) ++c[t.node_count()];
  return c;
}

Character<Q> random_character(const std::shared_ptr<const TruncatedAlgebra>& alg, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  Character<Q> g(alg);
  for (std::size_t t = 0; t < alg->trees().size(); ++t) g[static_cast<int>(t)] = Q(num(rng), den(rng));
  return g;
}

}  // namespace

TEST_CASE("tree counts match the rooted-tree numbers") {
  // unlabelled rooted trees: 1, 1, 2, 4, 9, 20
  CHECK(count_by_nodes(enumerate_trees(1, 6), 6) == std::vector<int>{0, 1, 1, 2, 4, 9, 20});
  // two labels: 2, 4, 14, 52
  CHECK(count_by_nodes(enumerate_trees(2, 4), 4) == std::vector<int>{0, 2, 4, 14, 52});
}

TEST_CASE("forest counts: forests with n nodes are trees with n + 1 nodes") {
  const auto fs = enumerate_forests(1, 5);
  std::vector<int> c(6, 0);
  for (const auto& f : fs) ++c[f.node_count()];
  CHECK(c == std::vector<int>{1, 1, 2, 4, 9, 20});
  CHECK(fs.front().empty());
}

TEST_CASE("printed forms round-trip") {
  for (const auto& f : enumerate_forests(2, 4)) CHECK(parse_forest(to_string(f)) == f);
  CHECK(parse_forest("[o1.o1]2") == parse_forest("[•1·•1]2"));
  CHECK_THROWS(parse_forest("[•1"));
}

TEST_CASE("coproduct of small trees") {
  const Forest dot = parse_forest("•1");
  const Forest one;
  SUBCASE("single edge") {
    const Forest t = parse_forest("[•1]1");
    const TensorExpansion want{{{t, one}, 1}, {{one, t}, 1}, {{dot, dot}, 1}};
    CHECK(coproduct(t, 4) == want);
  }
  SUBCASE("cherry") {
    const Forest t = parse_forest("[•1·•1]1");
    const TensorExpansion want{{{t, one}, 1},
                               {{one, t}, 1},
                               {{dot, parse_forest("[•1]1")}, 2},
                               {{dot * dot, dot}, 1}};
    CHECK(coproduct(t, 4) == want);
  }
  SUBCASE("ladder") {
    const Forest t = parse_forest("[[•1]1]1");
    const TensorExpansion want{{{t, one}, 1},
                               {{one, t}, 1},
                               {{dot, parse_forest("[•1]1")}, 1},
                               {{parse_forest("[•1]1"), dot}, 1}};
    CHECK(coproduct(t, 4) == want);
  }
}

TEST_CASE("coassociativity on every forest up to four nodes") {
  for (int d = 1; d <= 2; ++d)
    for (const auto& f : enumerate_forests(d, 4)) CHECK(coproduct_left_twice(f, 4) == coproduct_right_twice(f, 4));
}

TEST_CASE("graft index is the one-tree forest") {
  const auto alg = make_algebra(2, 3);
  const int empty = 0;
  CHECK(alg->forests()[alg->graft_index(empty, 2)] == parse_forest("•2"));
  const int dot = alg->forest_index(parse_forest("•1"));
  CHECK(alg->forests()[alg->graft_index(dot, 2)] == parse_forest("[•1]2"));
  CHECK(alg->graft_index(alg->forest_index(parse_forest("•1·•2·•1")), 1) == -1);
  CHECK_THROWS(alg->graft_index(dot, 3));
}

TEST_CASE("character group laws hold exactly (seeded)") {
  std::mt19937_64 rng(20241015);
  for (int d = 1; d <= 2; ++d) {
    const auto alg = make_algebra(d, 4);
    const auto e = counit<Q>(alg);
    for (int trial = 0; trial < 6; ++trial) {
      const auto g = random_character(alg, rng), h = random_character(alg, rng), k = random_character(alg, rng);
      CHECK(char_product(char_product(g, h), k).tree_values() == char_product(g, char_product(h, k)).tree_values());
      CHECK(char_product(g, e).tree_values() == g.tree_values());
      CHECK(char_product(e, g).tree_values() == g.tree_values());
      CHECK(char_product(g, char_inverse(g)).tree_values() == e.tree_values());
      CHECK(char_product(char_inverse(g), g).tree_values() == e.tree_values());
    }
  }
}

TEST_CASE("characters are multiplicative on forests") {
  std::mt19937_64 rng(7);
  const auto alg = make_algebra(2, 4);
  const auto g = random_character(alg, rng);
  const Forest a = parse_forest("[•1]2"), b = parse_forest("•2");
  CHECK(g.value(a * b) == g.value(a) * g.value(b));
  CHECK(g.forest_value(0) == Q(1));
}

TEST_CASE("self test reports all laws for d <= 2, N = 4") {
  const auto r = self_test(2, 4, 1);
  CHECK(r.ok());
  CHECK(r.trees_by_nodes == std::vector<int>{0, 2, 4, 14, 52});
  CHECK(r.forests_by_nodes[0] == 1);
}

#include "coarselab/geodesics.hpp"

#include <map>
#include <set>

#include "coarselab/cayley.hpp"
#include "doctest.h"

using namespace coarse;

namespace {

// Oracle: exhaustively list all words of length n and keep those whose
// endpoint has BFS distance exactly n. Independent of the DFS pruning.
std::set<std::vector<int>> brute_force_geodesics(const GroupModel& M, int n) {
  std::map<Elem, int> dist{{M.identity(), 0}};
  std::vector<Elem> frontier{M.identity()};
  for (int layer = 0; layer < n; ++layer) {
    std::vector<Elem> next;
    for (const Elem& x : frontier)
      for (int letter : M.generators().alphabet()) {
        Elem y = M.apply_generator(x, letter);
        if (dist.emplace(y, layer + 1).second) next.push_back(y);
      }
    frontier = std::move(next);
  }

  std::set<std::vector<int>> out;
  std::vector<std::vector<int>> words{{}};
  for (int len = 0; len < n; ++len) {
    std::vector<std::vector<int>> next;
    for (const std::vector<int>& w : words)
      for (int letter : M.generators().alphabet()) {
        std::vector<int> e = w;
        e.push_back(letter);
        next.push_back(std::move(e));
      }
    words = std::move(next);
  }
  for (const std::vector<int>& w : words) {
    Elem x = M.identity();
    for (int l : w) x = M.apply_generator(x, l);
    if (dist.count(x) && dist.at(x) == n) out.insert(w);
  }
  return out;
}

std::set<std::vector<int>> as_set(const GeodesicSet& g) {
  std::set<std::vector<int>> out;
  for (const Word& w : g.paths) out.insert(w.letters());
  return out;
}

}  // namespace

TEST_CASE("enumerate_geodesics matches closed forms and the brute-force oracle") {
  ModelPtr z = make_builtin_model(Builtin::FreeAbelian, 1);
  GeodesicSet gz = enumerate_geodesics(*z, 4);
  REQUIRE(gz.paths.size() == 2);  // a^4 and a^-4
  CHECK(gz.paths[0].letters() == std::vector<int>{1, 1, 1, 1});
  CHECK(gz.paths[1].letters() == std::vector<int>{-1, -1, -1, -1});

  ModelPtr f2 = make_builtin_model(Builtin::Free, 2);
  CHECK(enumerate_geodesics(*f2, 3).paths.size() == 36);  // 4 * 3^2

  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  GeodesicSet g2 = enumerate_geodesics(*z2, 2);
  CHECK(g2.paths.size() == 12);
  CHECK(as_set(g2) == brute_force_geodesics(*z2, 2));

  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  CHECK(as_set(enumerate_geodesics(*lamp, 4)) == brute_force_geodesics(*lamp, 4));

  // lexicographic output order
  GeodesicSet g3 = enumerate_geodesics(*z2, 3);
  for (std::size_t i = 0; i + 1 < g3.paths.size(); ++i)
    CHECK(lex_less(g3.paths[i], g3.paths[i + 1]));
}

TEST_CASE("enumerate_geodesics honors the cap with a truncated flag") {
  ModelPtr f2 = make_builtin_model(Builtin::Free, 2);
  GeodesicSet capped = enumerate_geodesics(*f2, 3, 10);
  CHECK(capped.paths.size() == 10);
  CHECK(capped.truncated);
  GeodesicSet full = enumerate_geodesics(*f2, 3, 36);
  CHECK_FALSE(full.truncated);
  CHECK(enumerate_geodesics(*f2, 0).paths.size() == 1);  // the empty word
}

TEST_CASE("truncate_geodesic cuts the last edge") {
  GeneratorSet gens({"a", "b"});
  CHECK(truncate_geodesic(parse_word(gens, "a a b")) == parse_word(gens, "a a"));
  CHECK(truncate_geodesic(parse_word(gens, "a")).empty());
  CHECK_THROWS_AS(truncate_geodesic(Word()), EmptyPath);
}

TEST_CASE("truncation maps level n into level n-1, onto for infinite models") {
  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  auto level4 = as_set(enumerate_geodesics(*z2, 4));
  auto level5 = enumerate_geodesics(*z2, 5);
  std::set<std::vector<int>> truncated;
  for (const Word& g : level5.paths) {
    Word t = truncate_geodesic(g);
    CHECK(level4.count(t.letters()) == 1);
    truncated.insert(t.letters());
  }
  CHECK(truncated == level4);  // every length-4 geodesic extends
}

TEST_CASE("extendable_prefixes matches the documented examples") {
  ModelPtr z = make_builtin_model(Builtin::FreeAbelian, 1);
  GeodesicSet both = extendable_prefixes(*z, 2, 10);
  CHECK(both.paths.size() == 2);

  ModelPtr c12 = make_builtin_model(Builtin::Cyclic, 12);
  CHECK(enumerate_geodesics(*c12, 6).paths.size() == 2);
  CHECK(extendable_prefixes(*c12, 6, 7).paths.empty());

  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  auto all3 = as_set(enumerate_geodesics(*z2, 3));
  for (int m = 4; m <= 12; ++m) {
    GeodesicSet ext = extendable_prefixes(*z2, 3, m);
    CHECK_FALSE(ext.paths.empty());
    for (const Word& g : ext.paths) CHECK(all3.count(g.letters()) == 1);
  }
}

TEST_CASE("extendable_prefixes shrinks monotonically in depth") {
  for (ModelPtr m :
       {make_builtin_model(Builtin::FreeAbelian, 2),
        make_builtin_model(Builtin::Lamplighter),
        make_builtin_model(Builtin::InfiniteDihedral),
        make_builtin_model(Builtin::Cyclic, 12)}) {
    CAPTURE(m->descriptor());
    std::set<std::vector<int>> previous;
    bool first = true;
    for (int depth = 3; depth <= 8; ++depth) {
      auto current = as_set(extendable_prefixes(*m, 3, depth));
      if (!first)
        for (const std::vector<int>& w : current) CHECK(previous.count(w) == 1);
      previous = std::move(current);
      first = false;
    }
  }
}

TEST_CASE("infinite builtin models always have extendable prefixes") {
  for (ModelPtr m :
       {make_builtin_model(Builtin::FreeAbelian, 1),
        make_builtin_model(Builtin::FreeAbelian, 2),
        make_builtin_model(Builtin::Free, 2), make_builtin_model(Builtin::Lamplighter),
        make_builtin_model(Builtin::InfiniteDihedral)}) {
    CAPTURE(m->descriptor());
    for (int n : {1, 2, 4}) {
      CHECK_FALSE(extendable_prefixes(*m, n, n + 6).paths.empty());
    }
  }
}

TEST_CASE("bi_infinite_witness passes the independent distance check") {
  ModelPtr z = make_builtin_model(Builtin::FreeAbelian, 1);
  auto wz = bi_infinite_witness(*z, 5);
  REQUIRE(wz.has_value());
  CHECK(wz->u() == "-5");  // lex-first word is a^10, re-based at its midpoint
  CHECK(wz->v() == "5");
  CHECK(wz->points[5] == "0");
  CHECK(distance(*z, wz->u(), wz->v(), 100) == 10);

  ModelPtr z2 = make_builtin_model(Builtin::FreeAbelian, 2);
  auto w2 = bi_infinite_witness(*z2, 8);
  REQUIRE(w2.has_value());
  CHECK(w2->points[8] == z2->identity());
  CHECK(distance(*z2, w2->u(), w2->v(), 100) == 16);
  CHECK(z2->exact_length(w2->u()) == 8);
  CHECK(z2->exact_length(w2->v()) == 8);

  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  auto wl = bi_infinite_witness(*lamp, 6);
  REQUIRE(wl.has_value());
  CHECK(distance(*lamp, wl->u(), wl->v(), 100) == 12);
  CHECK(wl->points[6] == lamp->identity());

  ModelPtr f2 = make_builtin_model(Builtin::Free, 2);
  auto wf = bi_infinite_witness(*f2, 10);
  REQUIRE(wf.has_value());
  CHECK(distance(*f2, wf->u(), wf->v(), 100) == 20);
}

TEST_CASE("bi_infinite_witness point chain is label-consistent") {
  ModelPtr lamp = make_builtin_model(Builtin::Lamplighter);
  auto w = bi_infinite_witness(*lamp, 5);
  REQUIRE(w.has_value());
  REQUIRE(w->points.size() == 11);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(lamp->apply_generator(w->points[i], w->labels.at(i)) == w->points[i + 1]);
  // every point sits at the right distance from both endpoints
  for (std::size_t i = 0; i < w->points.size(); ++i) {
    CHECK(distance(*lamp, w->u(), w->points[i], 100) == static_cast<long long>(i));
    CHECK(distance(*lamp, w->points[i], w->v(), 100) ==
          static_cast<long long>(10 - i));
  }
}

TEST_CASE("bi_infinite_witness reports NotFound on finite models") {
  ModelPtr c12 = make_builtin_model(Builtin::Cyclic, 12);
  CHECK(bi_infinite_witness(*c12, 7) == std::nullopt);
  ModelPtr two = std::get<ModelPtr>(complete_rewriting(parse_presentation("<a | a^2>")));
  CHECK(bi_infinite_witness(*two, 1) == std::nullopt);
}

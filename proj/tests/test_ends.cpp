#include "coarselab/ends.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "coarselab/errors.hpp"
#include "doctest.h"

using namespace coarse;

namespace {

// Independent annulus oracle: rebuild the ball as a plain hash map via raw
// model operations, then union-find the vertices with dist >= r. Shares no
// code with Ball adjacency or complement_components.
struct AnnulusCounts {
  std::size_t components = 0;
  std::size_t touching = 0;
};

AnnulusCounts annulus_oracle(const ModelPtr& M, int R, int r) {
  std::map<Elem, int> dist;
  std::vector<Elem> order{M->identity()};
  dist[M->identity()] = 0;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const Elem v = order[head];
    if (dist[v] == R) continue;
    for (int g = 1; g <= static_cast<int>(M->generators().size()); ++g) {
      for (int letter : {g, -g}) {
        Elem w = M->apply_generator(v, letter);
        if (dist.emplace(w, dist[v] + 1).second) order.push_back(std::move(w));
      }
    }
  }

  std::map<Elem, std::size_t> index;
  std::vector<Elem> kept;
  for (const auto& [key, d] : dist)
    if (d >= r) {
      index[key] = kept.size();
      kept.push_back(key);
    }
  std::vector<std::size_t> root(kept.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t a) {
    while (root[a] != a) a = root[a] = root[root[a]];
    return a;
  };
  for (const Elem& v : kept)
    for (int g = 1; g <= static_cast<int>(M->generators().size()); ++g)
      for (int letter : {g, -g}) {
        const Elem w = M->apply_generator(v, letter);
        auto it = index.find(w);
        if (it != index.end()) root[find(index[v])] = find(it->second);
      }

  std::set<std::size_t> roots;
  std::set<std::size_t> touching_roots;
  for (const Elem& v : kept) {
    const std::size_t rep = find(index[v]);
    roots.insert(rep);
    if (dist[v] == R) touching_roots.insert(rep);
  }
  return {roots.size(), touching_roots.size()};
}

void check_partition(const Ball& B, const EndsReport& rep) {
  std::size_t outside = 0;
  std::vector<std::size_t> sizes(rep.components.size(), 0);
  for (std::size_t v = 0; v < B.size(); ++v) {
    const std::size_t id = rep.component_of[v];
    if (B.dist(v) < rep.inner_radius) {
      CHECK(id == EndsReport::npos);
    } else {
      ++outside;
      REQUIRE(id < rep.components.size());
      ++sizes[id];
      // Numbering by smallest vertex index means the representative is the
      // first vertex we ever see in its component.
      CHECK(rep.components[id].representative <= v);
    }
  }
  CHECK(outside == std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  for (std::size_t id = 0; id < rep.components.size(); ++id) {
    CHECK(sizes[id] == rep.components[id].size);
    CHECK(rep.component_of[rep.components[id].representative] == id);
    CHECK(sizes[id] > 0);
  }
}

long long group_dist(const Ball& B, std::size_t a, std::size_t b) {
  return *distance(B.model(), B.key(a), B.key(b),
                   std::numeric_limits<long long>::max());
}

}  // namespace

TEST_CASE("a line splits into two half-lines") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 1);
  const Ball B = build_ball(M, 10);
  const EndsReport rep = complement_components(B, 2);
  REQUIRE(rep.components.size() == 2);
  CHECK(rep.inner_radius == 2);
  CHECK(rep.outer_radius == 10);
  CHECK(rep.components[0].touches_outer_sphere);
  CHECK(rep.components[1].touches_outer_sphere);
  CHECK(rep.components[0].size == 9);  // 2..10
  CHECK(rep.components[1].size == 9);  // -2..-10
  CHECK(B.key(rep.components[0].representative) == "2");
  CHECK(B.key(rep.components[1].representative) == "-2");
  CHECK(rep.end_count_estimate == 2);
  check_partition(B, rep);

  const AnnulusCounts oracle = annulus_oracle(M, 10, 2);
  CHECK(oracle.components == 2);
  CHECK(oracle.touching == 2);
}

TEST_CASE("the plane stays connected around a hole") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 2);
  const Ball B = build_ball(M, 12);
  const EndsReport rep = complement_components(B, 2);
  REQUIRE(rep.components.size() == 1);
  CHECK(rep.components[0].touches_outer_sphere);
  CHECK(rep.end_count_estimate == 1);
  check_partition(B, rep);

  const AnnulusCounts oracle = annulus_oracle(M, 12, 2);
  CHECK(oracle.components == 1);
  CHECK(oracle.touching == 1);
}

TEST_CASE("the tree branches four ways at radius one") {
  auto M = make_builtin_model(Builtin::Free, 2);
  const Ball B = build_ball(M, 6);
  const EndsReport rep = complement_components(B, 1);
  REQUIRE(rep.components.size() == 4);
  for (const ComponentInfo& c : rep.components) {
    CHECK(c.touches_outer_sphere);
    CHECK(c.size == 364);  // 1+3+9+27+81+243 per branch
  }
  // Representatives are the four distance-1 vertices in generator order.
  CHECK(B.key(rep.components[0].representative) == "a");
  CHECK(B.key(rep.components[1].representative) == "a^-1");
  CHECK(B.key(rep.components[2].representative) == "b");
  CHECK(B.key(rep.components[3].representative) == "b^-1");
  CHECK(rep.end_count_estimate == 4);
  check_partition(B, rep);
}

TEST_CASE("tree branch counts grow like the sphere sizes") {
  auto M = make_builtin_model(Builtin::Free, 2);
  for (const auto& [r, R, expected] :
       std::vector<std::tuple<int, int, std::size_t>>{{2, 8, 12}, {3, 10, 36}}) {
    const Ball B = build_ball(M, R);
    const EndsReport rep = complement_components(B, r);
    CHECK(rep.components.size() == expected);
    CHECK(rep.end_count_estimate == expected);
    const AnnulusCounts oracle = annulus_oracle(M, R, r);
    CHECK(oracle.components == expected);
    CHECK(oracle.touching == expected);
    check_partition(B, rep);
  }
}

TEST_CASE("lamplighter annuli agree with the oracle and stay connected") {
  auto M = make_builtin_model(Builtin::Lamplighter);
  for (const auto& [r, R] : std::vector<std::pair<int, int>>{{1, 6}, {2, 8}}) {
    const Ball B = build_ball(M, R);
    const EndsReport rep = complement_components(B, r);
    const AnnulusCounts oracle = annulus_oracle(M, R, r);
    CHECK(rep.components.size() == oracle.components);
    CHECK(rep.end_count_estimate == oracle.touching);
    CHECK(rep.end_count_estimate == 1);
    check_partition(B, rep);
  }
}

TEST_CASE("a finite group runs out of annulus") {
  auto M = make_builtin_model(Builtin::Cyclic, 12);
  const Ball B = build_ball(M, 8);
  SUBCASE("past the diameter nothing is left") {
    const EndsReport rep = complement_components(B, 7);
    CHECK(rep.components.empty());
    CHECK(rep.end_count_estimate == 0);
  }
  SUBCASE("at the diameter one antipodal speck remains, touching nothing") {
    const EndsReport rep = complement_components(B, 6);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.components[0].size == 1);
    CHECK_FALSE(rep.components[0].touches_outer_sphere);
    CHECK(rep.end_count_estimate == 0);
  }
}

TEST_CASE("complement radius must stay inside the ball") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 1);
  const Ball B = build_ball(M, 4);
  CHECK_THROWS_AS(complement_components(B, 4), RadiusOutOfRange);
  CHECK_THROWS_AS(complement_components(B, 7), RadiusOutOfRange);
  CHECK_THROWS_AS(complement_components(B, -1), RadiusOutOfRange);
  CHECK(complement_components(B, 0).components.size() == 1);
}

TEST_CASE("end-count schedules reach the expected verdicts") {
  SUBCASE("the line is stably two-ended") {
    const auto est = ends_estimate(make_builtin_model(Builtin::FreeAbelian, 1),
                                   {{1, 4}, {2, 8}, {3, 12}});
    REQUIRE(est.rows.size() == 3);
    for (const EndsCountRow& row : est.rows) CHECK(row.count == 2);
    CHECK(est.verdict == EndsVerdict::Stable);
    CHECK(est.stable_count == 2);
    CHECK(verdict_text(est) == "stable(2)");
  }
  SUBCASE("the plane is stably one-ended") {
    const auto est = ends_estimate(make_builtin_model(Builtin::FreeAbelian, 2),
                                   {{1, 8}, {2, 12}, {3, 16}});
    CHECK(est.verdict == EndsVerdict::Stable);
    CHECK(est.stable_count == 1);
  }
  SUBCASE("the lamplighter is stably one-ended") {
    const auto est = ends_estimate(make_builtin_model(Builtin::Lamplighter),
                                   {{1, 6}, {2, 8}});
    CHECK(est.verdict == EndsVerdict::Stable);
    CHECK(est.stable_count == 1);
    CHECK(verdict_text(est) == "stable(1)");
  }
  SUBCASE("the tree grows without stabilizing") {
    const auto est = ends_estimate(make_builtin_model(Builtin::Free, 2),
                                   {{1, 6}, {2, 8}, {3, 10}});
    REQUIRE(est.rows.size() == 3);
    CHECK(est.rows[0].count == 4);
    CHECK(est.rows[1].count == 12);
    CHECK(est.rows[2].count == 36);
    CHECK(est.verdict == EndsVerdict::Growing);
    CHECK(verdict_text(est) == "growing");
  }
  SUBCASE("a shrinking sequence is neither stable nor growing") {
    const auto est = ends_estimate(make_builtin_model(Builtin::Free, 2),
                                   {{3, 10}, {1, 6}});
    CHECK(est.verdict == EndsVerdict::Inconclusive);
    CHECK(verdict_text(est) == "inconclusive");
  }
  SUBCASE("one data point decides nothing") {
    const auto est =
        ends_estimate(make_builtin_model(Builtin::FreeAbelian, 1), {{2, 8}});
    CHECK(est.verdict == EndsVerdict::Inconclusive);
  }
}

TEST_CASE("schedule preconditions are enforced") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 1);
  CHECK_THROWS_AS(ends_estimate(M, {}), InvalidParameter);
  CHECK_THROWS_AS(ends_estimate(M, {{3, 5}}), InvalidParameter);  // R < 2r
  CHECK_THROWS_AS(ends_estimate(M, {{-1, 4}}), InvalidParameter);
  CHECK_THROWS_AS(ends_estimate(M, {{2, 8}}, 0), InvalidParameter);
  CHECK_NOTHROW(ends_estimate(M, {{3, 5}}, 1));  // relaxed margin admits it
}

TEST_CASE("uniform scale separates the line from the plane") {
  SUBCASE("the line is never uniformly one-ended") {
    CHECK_FALSE(
        uniform_scale(make_builtin_model(Builtin::FreeAbelian, 1), 2, 20));
  }
  SUBCASE("the tree is not uniformly one-ended either") {
    CHECK_FALSE(uniform_scale(make_builtin_model(Builtin::Free, 2), 2, 5,
                              {.max_centers = 16}));
  }
  SUBCASE("a point obstacle in the plane is trivial") {
    const auto m =
        uniform_scale(make_builtin_model(Builtin::FreeAbelian, 2), 0, 8,
                      {.max_centers = 16});
    REQUIRE(m.has_value());
    CHECK(*m == 0);
  }
  SUBCASE("small obstacles in the plane never split it") {
    const auto m =
        uniform_scale(make_builtin_model(Builtin::FreeAbelian, 2), 4, 10,
                      {.max_centers = 16});
    REQUIRE(m.has_value());
    CHECK(*m == 0);
  }
  SUBCASE("the obstacle must fit inside the probe window") {
    CHECK_THROWS_AS(
        uniform_scale(make_builtin_model(Builtin::FreeAbelian, 2), 8, 8),
        InvalidParameter);
    CHECK_THROWS_AS(
        uniform_scale(make_builtin_model(Builtin::FreeAbelian, 2), -1, 8),
        InvalidParameter);
  }
}

TEST_CASE("an arc routes around the forbidden ball in the plane") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 2);
  const Ball B = build_ball(M, 12);
  const std::size_t x = *B.index_of("6,0");
  const std::size_t y = *B.index_of("-6,0");
  const std::size_t x0 = *B.index_of("0,0");
  const auto path = avoiding_path(B, x, y, x0, 4);
  REQUIRE(path.has_value());
  CHECK(path->vertices.front() == x);
  CHECK(path->vertices.back() == y);
  CHECK(path->labels.size() >= 12);
  CHECK(path->vertices.size() == path->labels.size() + 1);
  for (const std::size_t v : path->vertices) CHECK(group_dist(B, x0, v) > 4);
  // Labels really do trace the path through the group.
  for (std::size_t i = 0; i < path->labels.size(); ++i) {
    CHECK(B.model().apply_generator(B.key(path->vertices[i]), path->labels[i]) ==
          B.key(path->vertices[i + 1]));
  }
  // BFS found the shortest avoiding arc, so a second run is identical.
  const auto again = avoiding_path(B, x, y, x0, 4);
  REQUIRE(again.has_value());
  CHECK(again->vertices == path->vertices);
  CHECK(again->labels == path->labels);
}

TEST_CASE("the ball separates the line") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 1);
  const Ball B = build_ball(M, 10);
  const auto path =
      avoiding_path(B, *B.index_of("6"), *B.index_of("-6"), *B.index_of("0"), 4);
  CHECK_FALSE(path.has_value());
}

TEST_CASE("radius zero forbids a single vertex") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 2);
  const Ball B = build_ball(M, 5);
  const auto path = avoiding_path(B, *B.index_of("2,0"), *B.index_of("-2,0"),
                                  *B.index_of("0,0"), 0);
  REQUIRE(path.has_value());
  CHECK(path->labels.size() == 6);  // the two-step detour around the origin
  CHECK_FALSE(path->geodesic);     // true distance is 4
  for (const std::size_t v : path->vertices) CHECK(B.key(v) != "0,0");
}

TEST_CASE("an unobstructed route is flagged as a geodesic") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 2);
  const Ball B = build_ball(M, 6);
  const auto path = avoiding_path(B, *B.index_of("0,3"), *B.index_of("3,0"),
                                  *B.index_of("-2,-2"), 1);
  REQUIRE(path.has_value());
  CHECK(path->labels.size() == 6);
  CHECK(path->geodesic);
}

TEST_CASE("avoiding-path preconditions are enforced") {
  auto M = make_builtin_model(Builtin::FreeAbelian, 2);
  const Ball B = build_ball(M, 6);
  const std::size_t x = *B.index_of("3,0");
  const std::size_t y = *B.index_of("-3,0");
  const std::size_t x0 = *B.index_of("0,0");
  CHECK_THROWS_AS(avoiding_path(B, x, y, x0, 3), InvalidParameter);   // x on rim
  CHECK_THROWS_AS(avoiding_path(B, x0, y, x0, 1), InvalidParameter);  // x inside
  CHECK_THROWS_AS(avoiding_path(B, x, y, x0, -1), InvalidParameter);
  CHECK_THROWS_AS(avoiding_path(B, B.size(), y, x0, 1), InvalidParameter);
}

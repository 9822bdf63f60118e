#include "coarselab/ends.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "coarselab/errors.hpp"

namespace coarse {

namespace {

long long true_distance(const Ball& B, std::size_t a, std::size_t b) {
  auto d = distance(B.model(), B.key(a), B.key(b),
                    std::numeric_limits<long long>::max());
  if (!d) throw InternalError("true_distance: uncapped distance came back unknown");
  return *d;
}

// Components of the subgraph induced on `allowed`, numbered by smallest
// vertex index. Returns component id per vertex (npos where !allowed).
std::vector<std::size_t> label_components(const Ball& B,
                                          const std::vector<char>& allowed,
                                          std::size_t& count) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(B.size(), npos);
  count = 0;
  for (std::size_t seed = 0; seed < B.size(); ++seed) {
    if (!allowed[seed] || comp[seed] != npos) continue;
    const std::size_t id = count++;
    std::queue<std::size_t> frontier;
    comp[seed] = id;
    frontier.push(seed);
    while (!frontier.empty()) {
      const std::size_t v = frontier.front();
      frontier.pop();
      for (const BallEdge& e : B.neighbors(v)) {
        if (!allowed[e.to] || comp[e.to] != npos) continue;
        comp[e.to] = id;
        frontier.push(e.to);
      }
    }
  }
  return comp;
}

}  // namespace

EndsReport complement_components(const Ball& B, int r) {
  if (r < 0 || r >= B.radius())
    throw RadiusOutOfRange("complement_components: need 0 <= r < ball radius");

  // The open ball of radius r is removed: branch counts on trees (one
  // component per sphere-r vertex's subtree) depend on keeping dist == r.
  std::vector<char> allowed(B.size());
  for (std::size_t v = 0; v < B.size(); ++v) allowed[v] = B.dist(v) >= r;

  EndsReport report;
  report.inner_radius = r;
  report.outer_radius = B.radius();
  std::size_t count = 0;
  report.component_of = label_components(B, allowed, count);
  report.components.resize(count);
  std::vector<char> seen(count, 0);
  for (std::size_t v = 0; v < B.size(); ++v) {
    const std::size_t id = report.component_of[v];
    if (id == EndsReport::npos) continue;
    ComponentInfo& info = report.components[id];
    if (!seen[id]) {
      seen[id] = 1;
      info.representative = v;
    }
    info.size += 1;
    if (B.dist(v) == B.radius()) info.touches_outer_sphere = true;
  }
  for (const ComponentInfo& info : report.components)
    if (info.touches_outer_sphere) report.end_count_estimate += 1;
  return report;
}

std::string verdict_text(const EndsEstimateResult& e) {
  switch (e.verdict) {
    case EndsVerdict::Stable:
      return "stable(" + std::to_string(e.stable_count) + ")";
    case EndsVerdict::Growing:
      return "growing";
    case EndsVerdict::Inconclusive:
      return "inconclusive";
  }
  throw InternalError("verdict_text: bad enum value");
}

EndsEstimateResult ends_estimate(ModelPtr M,
                                 const std::vector<EndsScheduleEntry>& schedule,
                                 int margin, const BallBudget& budget) {
  if (schedule.empty())
    throw InvalidParameter("ends_estimate: schedule must be nonempty");
  if (margin < 1) throw InvalidParameter("ends_estimate: margin must be >= 1");

  EndsEstimateResult result;
  for (const EndsScheduleEntry& entry : schedule) {
    if (entry.r < 0 || entry.R <= entry.r || entry.R < margin * entry.r)
      throw InvalidParameter("ends_estimate: schedule entry violates R >= margin*r > r >= 0");
    const Ball ball = build_ball(M, entry.R, budget);
    const EndsReport report = complement_components(ball, entry.r);
    result.rows.push_back({entry.r, entry.R, report.end_count_estimate});
  }

  if (result.rows.size() >= 2) {
    bool all_equal = true;
    bool strictly_increasing = true;
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
      all_equal &= result.rows[i].count == result.rows[0].count;
      strictly_increasing &= result.rows[i].count > result.rows[i - 1].count;
    }
    if (all_equal) {
      result.verdict = EndsVerdict::Stable;
      result.stable_count = result.rows[0].count;
    } else if (strictly_increasing) {
      result.verdict = EndsVerdict::Growing;
    }
  }
  return result;
}

std::optional<int> uniform_scale(ModelPtr M, int n, int R,
                                 const UniformScaleOptions& options,
                                 const BallBudget& budget) {
  if (n < 0 || n >= R)
    throw InvalidParameter("uniform_scale: need 0 <= n < R");
  if (options.max_centers == 0)
    throw InvalidParameter("uniform_scale: max_centers must be positive");

  const Ball ball = build_ball(M, R, budget);
  const int obstacle_radius = n / 2;
  const int center_limit = R - n;

  // Obstacle centers: every vertex within R-n when that fits the cap,
  // otherwise a per-shell prefix so every distance stratum stays sampled.
  std::vector<std::size_t> centers;
  for (std::size_t v = 0; v < ball.size(); ++v)
    if (ball.dist(v) <= center_limit) centers.push_back(v);
  if (centers.size() > options.max_centers) {
    const std::size_t shells = static_cast<std::size_t>(center_limit) + 1;
    const std::size_t per_shell = std::max<std::size_t>(1, options.max_centers / shells);
    std::vector<std::size_t> sampled;
    std::vector<std::size_t> taken(shells, 0);
    for (std::size_t v : centers) {
      std::size_t& used = taken[static_cast<std::size_t>(ball.dist(v))];
      if (used < per_shell) {
        ++used;
        sampled.push_back(v);
      }
    }
    centers = std::move(sampled);
  }
  if (centers.empty()) return std::nullopt;

  // A single m must give exactly one component of diameter > m for every
  // obstacle, so m lives in [second-largest diameter, largest) for each.
  // Diameters are in the ambient group metric; inverses are hoisted out of
  // the quadratic scans.
  const GroupModel& G = ball.model();
  long long lo = 0;
  long long hi = std::numeric_limits<long long>::max();
  std::vector<char> allowed(ball.size());
  for (const std::size_t c : centers) {
    const Elem c_inv = G.invert(ball.key(c));
    for (std::size_t v = 0; v < ball.size(); ++v)
      allowed[v] = G.exact_length(G.multiply(c_inv, ball.key(v))) > obstacle_radius;
    std::size_t count = 0;
    const std::vector<std::size_t> comp = label_components(ball, allowed, count);
    if (count == 0) return std::nullopt;

    std::vector<std::vector<std::size_t>> members(count);
    for (std::size_t v = 0; v < ball.size(); ++v)
      if (comp[v] != EndsReport::npos) members[comp[v]].push_back(v);
    long long largest = -1, second = -1;
    for (const std::vector<std::size_t>& piece : members) {
      long long diameter = 0;
      for (std::size_t i = 0; i < piece.size(); ++i) {
        const Elem inv_i = G.invert(ball.key(piece[i]));
        for (std::size_t j = i + 1; j < piece.size(); ++j)
          diameter = std::max(
              diameter, G.exact_length(G.multiply(inv_i, ball.key(piece[j]))));
      }
      if (diameter > largest) {
        second = largest;
        largest = diameter;
      } else {
        second = std::max(second, diameter);
      }
    }
    lo = std::max(lo, std::max<long long>(second, 0));
    hi = std::min(hi, largest);
  }

  if (lo >= hi || lo > R) return std::nullopt;
  return static_cast<int>(lo);
}

std::optional<PathInBall> avoiding_path(const Ball& B, std::size_t x, std::size_t y,
                                        std::size_t x0, int N) {
  if (x >= B.size() || y >= B.size() || x0 >= B.size())
    throw InvalidParameter("avoiding_path: vertex index out of range");
  if (N < 0) throw InvalidParameter("avoiding_path: N must be >= 0");
  if (true_distance(B, x0, x) <= N || true_distance(B, x0, y) <= N)
    throw InvalidParameter("avoiding_path: endpoints must lie outside the closed ball");

  std::vector<char> allowed(B.size());
  for (std::size_t v = 0; v < B.size(); ++v)
    allowed[v] = true_distance(B, x0, v) > N;

  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(B.size(), npos);
  std::vector<int> via(B.size(), 0);
  std::vector<char> visited(B.size(), 0);
  std::queue<std::size_t> frontier;
  visited[x] = 1;
  frontier.push(x);
  while (!frontier.empty() && !visited[y]) {
    const std::size_t v = frontier.front();
    frontier.pop();
    for (const BallEdge& e : B.neighbors(v)) {
      if (!allowed[e.to] || visited[e.to]) continue;
      visited[e.to] = 1;
      parent[e.to] = v;
      via[e.to] = e.label;
      frontier.push(e.to);
    }
  }
  if (!visited[y]) return std::nullopt;

  PathInBall path;
  for (std::size_t v = y; v != x; v = parent[v]) {
    path.vertices.push_back(v);
    path.labels.push_back(via[v]);
  }
  path.vertices.push_back(x);
  std::reverse(path.vertices.begin(), path.vertices.end());
  std::reverse(path.labels.begin(), path.labels.end());
  path.geodesic =
      static_cast<long long>(path.labels.size()) == true_distance(B, x, y);
  return path;
}

}  // namespace coarse

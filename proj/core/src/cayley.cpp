#include "coarselab/cayley.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

#include "coarselab/errors.hpp"
#include "json.hpp"

namespace coarse {

Ball::Ball(ModelPtr model, int radius, std::vector<Elem> vertices,
           std::vector<int> dist, std::vector<std::vector<BallEdge>> adjacency)
    : model_(std::move(model)),
      radius_(radius),
      vertices_(std::move(vertices)),
      dist_(std::move(dist)),
      adjacency_(std::move(adjacency)) {
  if (!model_) throw InvalidParameter("ball requires a model");
  if (vertices_.size() != dist_.size() || vertices_.size() != adjacency_.size())
    throw InvalidParameter("ball arrays disagree in length");
  index_.reserve(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!index_.emplace(vertices_[i], i).second)
      throw InvalidParameter("duplicate vertex key '" + vertices_[i] + "'");
  }
}

std::optional<std::size_t> Ball::index_of(const Elem& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Ball build_ball(ModelPtr M, int radius, const BallBudget& budget) {
  if (!M) throw InvalidParameter("build_ball requires a model");
  if (radius < 0) throw InvalidParameter("radius must be nonnegative");

  const std::vector<int> alphabet = M->generators().alphabet();
  std::vector<Elem> vertices{M->identity()};
  std::vector<int> dist{0};
  std::unordered_map<std::string, std::size_t> index{{vertices[0], 0}};

  for (std::size_t head = 0; head < vertices.size(); ++head) {
    if (dist[head] == radius) continue;
    for (int letter : alphabet) {
      Elem next = M->apply_generator(vertices[head], letter);
      if (index.emplace(next, vertices.size()).second) {
        if (vertices.size() >= budget.max_vertices)
          throw BudgetExceeded("ball exceeds the vertex budget",
                               static_cast<long long>(vertices.size() + 1));
        vertices.push_back(std::move(next));
        dist.push_back(dist[head] + 1);
      }
    }
  }

  std::vector<std::vector<BallEdge>> adjacency(vertices.size());
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    for (int letter : alphabet) {
      Elem next = M->apply_generator(vertices[v], letter);
      auto it = index.find(next);
      if (it != index.end()) adjacency[v].push_back({letter, it->second});
    }
  }

  return Ball(std::move(M), radius, std::move(vertices), std::move(dist),
              std::move(adjacency));
}

std::vector<std::size_t> sphere(const Ball& B, int n) {
  if (n < 0 || n > B.radius())
    throw RadiusOutOfRange("sphere radius " + std::to_string(n) +
                           " outside ball radius " + std::to_string(B.radius()));
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < B.size(); ++v)
    if (B.dist(v) == n) out.push_back(v);
  return out;
}

std::optional<long long> distance(const GroupModel& M, const Elem& u, const Elem& v,
                                  long long cap) {
  if (cap < 0) throw InvalidParameter("distance cap must be nonnegative");
  long long len = M.exact_length(M.multiply(M.invert(u), v));
  if (len > cap) return std::nullopt;
  return len;
}

std::optional<PathInBall> geodesic_between(const Ball& B, std::size_t u,
                                           std::size_t v) {
  if (u >= B.size() || v >= B.size())
    throw InvalidParameter("vertex index outside the ball");

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(B.size(), kNone);
  std::vector<int> via_label(B.size(), 0);
  std::deque<std::size_t> queue{u};
  parent[u] = u;
  while (!queue.empty() && parent[v] == kNone) {
    std::size_t x = queue.front();
    queue.pop_front();
    for (const BallEdge& e : B.neighbors(x)) {
      if (parent[e.to] != kNone) continue;
      parent[e.to] = x;
      via_label[e.to] = e.label;
      queue.push_back(e.to);
    }
  }
  if (parent[v] == kNone) return std::nullopt;

  PathInBall path;
  for (std::size_t x = v; x != u; x = parent[x]) {
    path.vertices.push_back(x);
    path.labels.push_back(via_label[x]);
  }
  path.vertices.push_back(u);
  std::reverse(path.vertices.begin(), path.vertices.end());
  std::reverse(path.labels.begin(), path.labels.end());

  long long len = static_cast<long long>(path.labels.size());
  path.geodesic = distance(B.model(), B.key(u), B.key(v), len) == len;
  return path;
}

// --- cache ---------------------------------------------------------------

namespace {
constexpr int kBallFormatVersion = 1;
}

void save_ball(const Ball& B, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format_version"] = kBallFormatVersion;
  j["model_descriptor"] = B.model().descriptor();
  j["radius"] = B.radius();
  j["vertices"] = B.vertices();
  nlohmann::json dist = nlohmann::json::array();
  nlohmann::json adjacency = nlohmann::json::array();
  for (std::size_t v = 0; v < B.size(); ++v) {
    dist.push_back(B.dist(v));
    nlohmann::json edges = nlohmann::json::array();
    for (const BallEdge& e : B.neighbors(v))
      edges.push_back(nlohmann::json::array({e.label, e.to}));
    adjacency.push_back(std::move(edges));
  }
  j["dist"] = std::move(dist);
  j["adjacency"] = std::move(adjacency);

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << j.dump(1) << '\n';
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move cache into place at '" + path.string() + "'");
}

Ball load_ball(ModelPtr M, const std::filesystem::path& path) {
  if (!M) throw InvalidParameter("load_ball requires a model");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed ball cache '" + path.string() + "': " + e.what());
  }

  auto fail = [&](const std::string& why) -> IoError {
    return IoError("ball cache '" + path.string() + "' is invalid: " + why);
  };

  try {
    if (j.at("format_version").get<int>() != kBallFormatVersion)
      throw fail("unsupported format_version");
    if (j.at("model_descriptor").get<std::string>() != M->descriptor())
      throw fail("model descriptor mismatch");
    int radius = j.at("radius").get<int>();
    auto vertices = j.at("vertices").get<std::vector<Elem>>();
    auto dist = j.at("dist").get<std::vector<int>>();
    std::vector<std::vector<BallEdge>> adjacency;
    for (const nlohmann::json& edges : j.at("adjacency")) {
      std::vector<BallEdge> row;
      for (const nlohmann::json& e : edges)
        row.push_back({e.at(0).get<int>(), e.at(1).get<std::size_t>()});
      adjacency.push_back(std::move(row));
    }

    Ball ball(M, radius, std::move(vertices), std::move(dist), std::move(adjacency));

    // Revalidate everything a fresh build would guarantee.
    if (ball.size() == 0 || ball.key(0) != M->identity() || ball.dist(0) != 0)
      throw fail("identity vertex is wrong");
    const std::vector<int> alphabet = M->generators().alphabet();
    for (std::size_t v = 0; v < ball.size(); ++v) {
      if (ball.dist(v) < 0 || ball.dist(v) > radius)
        throw fail("distance out of range at vertex " + std::to_string(v));
      std::vector<BallEdge> expected;
      for (int letter : alphabet) {
        Elem next = M->apply_generator(ball.key(v), letter);
        if (auto to = ball.index_of(next)) expected.push_back({letter, *to});
        else if (ball.dist(v) < radius)
          throw fail("interior vertex " + std::to_string(v) + " misses a neighbor");
      }
      if (expected != ball.neighbors(v))
        throw fail("adjacency mismatch at vertex " + std::to_string(v));
      bool has_parent = v == 0;
      for (const BallEdge& e : ball.neighbors(v)) {
        if (std::abs(ball.dist(v) - ball.dist(e.to)) > 1)
          throw fail("edge skips a distance level at vertex " + std::to_string(v));
        if (ball.dist(e.to) == ball.dist(v) - 1) has_parent = true;
      }
      if (!has_parent)
        throw fail("vertex " + std::to_string(v) + " has no parent towards identity");
    }
    return ball;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed ball cache '" + path.string() + "': " + e.what());
  } catch (const InvalidParameter& e) {
    throw IoError("ball cache '" + path.string() + "' is invalid: " + e.what());
  }
}

std::string ball_cache_name(const GroupModel& M, int radius) {
  std::string tag = M.descriptor();
  for (char& c : tag)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  return "ball_" + tag + "_r" + std::to_string(radius) + ".json";
}

}  // namespace coarse

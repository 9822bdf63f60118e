#pragma once

#include <filesystem>
#include <optional>
#include <unordered_map>
#include <vector>

#include "coarselab/models.hpp"

namespace coarse {

struct BallBudget {
  std::size_t max_vertices = 4'000'000;
};

struct BallEdge {
  int label;
  std::size_t to;
  bool operator==(const BallEdge&) const = default;
};

/// The radius-R portion of a Cayley graph with exact distances from the
/// identity. Vertex 0 is the identity; indices are BFS discovery order with
/// the generator rank order as tie-break, which all determinism relies on.
class Ball {
 public:
  Ball(ModelPtr model, int radius, std::vector<Elem> vertices,
       std::vector<int> dist, std::vector<std::vector<BallEdge>> adjacency);

  const GroupModel& model() const noexcept { return *model_; }
  const ModelPtr& model_ptr() const noexcept { return model_; }
  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<Elem>& vertices() const noexcept { return vertices_; }
  const Elem& key(std::size_t v) const { return vertices_.at(v); }
  std::optional<std::size_t> index_of(const Elem& key) const;
  int dist(std::size_t v) const { return dist_.at(v); }
  const std::vector<BallEdge>& neighbors(std::size_t v) const {
    return adjacency_.at(v);
  }

 private:
  ModelPtr model_;
  int radius_;
  std::vector<Elem> vertices_;
  std::vector<int> dist_;
  std::vector<std::vector<BallEdge>> adjacency_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Exact breadth-first ball of radius R. Edges are listed for every vertex
/// but only towards in-ball endpoints; vertices closer than R carry all
/// their generator edges.
Ball build_ball(ModelPtr M, int radius, const BallBudget& budget = {});

/// Vertices at distance exactly n, in index order.
std::vector<std::size_t> sphere(const Ball& B, int n);

/// Exact d(u,v) when ≤ cap, std::nullopt (Unknown) otherwise. Uses the
/// translation d(u,v) = d(e, u⁻¹v) and the model's exact length oracle.
std::optional<long long> distance(const GroupModel& M, const Elem& u, const Elem& v,
                                  long long cap);

struct PathInBall {
  std::vector<std::size_t> vertices;
  std::vector<int> labels;
  bool geodesic = false;
};

/// Shortest path inside the ball, or std::nullopt when u and v are not
/// connected within it. The geodesic flag is set only when the length
/// equals the true group distance.
std::optional<PathInBall> geodesic_between(const Ball& B, std::size_t u,
                                           std::size_t v);

/// JSON cache. Loading revalidates every structural invariant against the
/// model before returning a Ball.
void save_ball(const Ball& B, const std::filesystem::path& path);
Ball load_ball(ModelPtr M, const std::filesystem::path& path);

/// Deterministic cache file name for (model descriptor, radius).
std::string ball_cache_name(const GroupModel& M, int radius);

}  // namespace coarse

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coarselab/cayley.hpp"

namespace coarse {

struct ComponentInfo {
  std::size_t size = 0;
  bool touches_outer_sphere = false;
  std::size_t representative = 0;  // smallest vertex index in the component
};

/// Connected components of B(e,R) minus the open ball of radius r (the
/// induced subgraph on vertices with dist >= r), numbered by smallest
/// vertex index. "Unbounded" is proxied by touching the outer sphere.
struct EndsReport {
  int inner_radius = 0;
  int outer_radius = 0;
  std::vector<ComponentInfo> components;
  std::size_t end_count_estimate = 0;  // components touching the outer sphere
  /// Per ball vertex: component id, or npos for vertices with dist < r.
  std::vector<std::size_t> component_of;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

EndsReport complement_components(const Ball& B, int r);

struct EndsScheduleEntry {
  int r = 0;
  int R = 0;
};

struct EndsCountRow {
  int r = 0;
  int R = 0;
  std::size_t count = 0;
};

enum class EndsVerdict { Stable, Growing, Inconclusive };

struct EndsEstimateResult {
  std::vector<EndsCountRow> rows;
  EndsVerdict verdict = EndsVerdict::Inconclusive;
  std::size_t stable_count = 0;  // meaningful when verdict == Stable
};

/// Render as "stable(2)", "growing", or "inconclusive".
std::string verdict_text(const EndsEstimateResult& e);

/// End-count estimates over a schedule of (r, R) windows. Each entry must
/// satisfy R >= margin * r. The verdict is an estimate, never a proof.
EndsEstimateResult ends_estimate(ModelPtr M,
                                 const std::vector<EndsScheduleEntry>& schedule,
                                 int margin = 2, const BallBudget& budget = {});

struct UniformScaleOptions {
  std::size_t max_centers = 64;  // stratified sample cap for obstacle centers
};

/// Smallest m such that for every sampled obstacle K = B(c, n/2) exactly one
/// component of B(e,R) - K has group diameter > m; std::nullopt when no
/// single m works (the finite-window "not uniformly one-ended" signal).
std::optional<int> uniform_scale(ModelPtr M, int n, int R,
                                 const UniformScaleOptions& options = {},
                                 const BallBudget& budget = {});

/// Shortest path from x to y through vertices at group distance > N from
/// x0, or std::nullopt when the forbidden ball separates x from y in this
/// window. Endpoints must lie strictly outside B(x0, N).
std::optional<PathInBall> avoiding_path(const Ball& B, std::size_t x, std::size_t y,
                                        std::size_t x0, int N);

}  // namespace coarse

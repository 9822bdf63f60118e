#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coarselab/cayley.hpp"

namespace coarse {

/// A family of vertex sets covering a ball, each carrying a class label in
/// 0..n. Declared d (scale) and D (diameter bound) travel with it; checkers
/// report realized values next to the declared ones.
struct Cover {
  const Ball* ball = nullptr;  // not owned
  std::vector<std::vector<std::size_t>> pieces;  // ascending vertex indices
  std::vector<int> classes;                      // one label per piece
  int d = 0;
  int D = 0;
};

/// Validating constructor: pieces nonempty, indices in range, union covers
/// the ball, one class label per piece, labels in 0..max. Sorts and dedups
/// piece members.
Cover make_cover(const Ball& B, std::vector<std::vector<std::size_t>> pieces,
                 std::vector<int> classes, int d, int D);

/// Exact min group distance between two vertex sets / max within one.
long long piece_distance(const Ball& B, const std::vector<std::size_t>& a,
                         const std::vector<std::size_t>& b);
long long piece_diameter(const Ball& B, const std::vector<std::size_t>& piece);

struct CoverViolation {
  enum class Kind { Oversized, TooClose } kind = Kind::Oversized;
  std::size_t piece_a = 0;
  std::size_t piece_b = 0;  // == piece_a for Oversized
  std::size_t vertex_a = 0;
  std::size_t vertex_b = 0;
  long long distance = 0;  // exact group distance of the witness pair
};

struct CheckReport {
  bool pass = false;
  long long realized_diameter = 0;  // max piece diameter, exact
  std::optional<CoverViolation> violation;
};

/// Definition-1 check: every piece has diameter <= D and distinct pieces in
/// the same class sit at distance >= d. Violations carry a concrete vertex
/// pair with its exact distance.
CheckReport check_definition1(const Cover& C, int d, int D);

struct MultiplicityReport {
  int d = 0;
  std::size_t multiplicity = 0;
  std::size_t argmax_vertex = 0;            // smallest witness index
  std::vector<std::size_t> meeting_pieces;  // ids meeting B(argmax, d)
};

/// Definition-2 quantity: exact max over ball vertices x of the number of
/// pieces within group distance d of x.
MultiplicityReport multiplicity(const Cover& C, int d);

struct ProximityGraph {
  std::size_t nodes = 0;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted, symmetric
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j
};

/// Edge between pieces at group distance < d.
ProximityGraph proximity_graph(const Cover& C, int d);

struct ColoringReport {
  Cover recolored;  // same pieces, classes replaced by the coloring
  std::size_t color_count = 0;
  bool exact = false;  // true when branch-and-bound ran (<= exact_limit nodes)
  ProximityGraph graph;
};

/// Proper coloring of the proximity graph: exact chromatic number by
/// branch-and-bound up to exact_limit pieces, greedy largest-degree-first
/// (ties by piece id) beyond it.
ColoringReport proximity_color(const Cover& C, int d,
                               std::size_t exact_limit = 12);

/// Voronoi cells of a greedy maximal net (pairwise distance > D/2, chosen
/// in vertex-index order; ties to the smaller net index). Pieces come out
/// with diameter <= D, all in class 0.
Cover net_partition(const Ball& B, int D);

struct AsdimEstimate {
  std::size_t n = 0;  // colors - 1
  Cover cover;        // net partition re-classed by the proximity coloring
  long long realized_diameter = 0;
  bool exact_coloring = false;
  bool scale_warning = false;  // set when D < d
};

/// Finite-scale upper estimate: net partition at D, proximity coloring at
/// d, n = colors - 1. The result passes check_definition1(d, realized D').
AsdimEstimate asdim_at_scale(const Ball& B, int d, int D,
                             std::size_t exact_limit = 12);

/// Intervals [kL, (k+1)L) on the line, class k mod 2, declared (d=L, D=L).
Cover make_interval_cover_Z(const Ball& B, int L);

/// L-by-L squares with alternate rows offset by L/2, four classes by row
/// and column parity, declared (d=L, D=2L).
Cover make_brick_cover_Z2(const Ball& B, int L);

/// Pieces P(k, sigma): cursor in [kL, (k+1)L) and lamp pattern outside the
/// d-enlarged window [kL-d, (k+1)L-1+d] equal to sigma; class k mod 2,
/// declared (d, D = 3L+4d).
Cover make_lamplighter_cover(const Ball& B, int L, int d);

struct PathCoverReport {
  std::vector<std::size_t> piece_ids;  // sorted, pieces meeting the path
  /// ceil((length+1)/(D+1)), present when the path is a known geodesic.
  std::optional<std::size_t> pigeonhole_lower_bound;
};

/// Exact set of pieces containing at least one path vertex.
PathCoverReport pieces_meeting_path(const Cover& C, const PathInBall& p);

/// JSON round-trip; loading revalidates against the supplied ball.
void save_cover(const Cover& C, const std::filesystem::path& path);
Cover load_cover(const Ball& B, const std::filesystem::path& path);

}  // namespace coarse

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "coarselab/models.hpp"
#include "coarselab/presentation.hpp"

namespace coarse {

struct Dart {
  int label = 0;            // signed letter
  std::size_t from = 0;     // source vertex
  std::size_t inverse = 0;  // paired dart, same edge walked backwards
  bool operator==(const Dart&) const = default;
};

/// A planar combinatorial map: darts with an involutive pairing plus an
/// anticlockwise rotation of outgoing darts at every vertex. Faces are the
/// orbits of "next = rotation-successor of the inverse"; planarity is the
/// Euler count V - E + F = 2, checked at construction, never assumed.
class Diagram {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// base_dart is the first dart of the anticlockwise boundary walk and
  /// must leave base_vertex (npos allowed only for the dartless diagram).
  Diagram(std::vector<Dart> darts,
          std::vector<std::vector<std::size_t>> rotation,
          std::size_t base_vertex, std::size_t base_dart);

  std::size_t vertex_count() const noexcept { return rotation_.size(); }
  std::size_t edge_count() const noexcept { return darts_.size() / 2; }
  std::size_t face_count() const noexcept { return faces_.size(); }
  std::size_t inner_face_count() const noexcept { return faces_.size() - 1; }
  const std::vector<Dart>& darts() const noexcept { return darts_; }
  const std::vector<std::vector<std::size_t>>& rotation() const noexcept {
    return rotation_;
  }
  std::size_t base_vertex() const noexcept { return base_vertex_; }
  std::size_t base_dart() const noexcept { return base_dart_; }
  const std::vector<std::vector<std::size_t>>& faces() const noexcept {
    return faces_;
  }
  std::size_t outer_face() const noexcept { return outer_face_; }
  std::size_t face_of(std::size_t dart) const { return face_of_.at(dart); }
  std::size_t to(std::size_t dart) const {
    return darts_.at(darts_.at(dart).inverse).from;
  }
  /// Labels of a face cycle, starting from its smallest dart id.
  Word face_word(std::size_t face) const;

 private:
  std::vector<Dart> darts_;
  std::vector<std::vector<std::size_t>> rotation_;
  std::size_t base_vertex_ = 0;
  std::size_t base_dart_ = npos;
  std::vector<std::vector<std::size_t>> faces_;
  std::vector<std::size_t> face_of_;
  std::size_t outer_face_ = 0;
};

/// Anticlockwise boundary label from the base dart; the diagram's defining
/// word.
Word boundary_word(const Diagram& D);

/// Every inner face must spell a cyclic conjugate of a relator or inverse
/// relator of P; throws InternalError otherwise.
void check_faces_against(const Diagram& D, const Presentation& P);

struct ConjugateFactor {
  Word conjugator;
  Word relator;
  int sign = 1;  // +1 for the relator, -1 for its inverse
};

struct DecompositionBounds {
  std::size_t max_factors = 8;
  std::size_t max_conjugator = 4;
  std::size_t max_nodes = 2'000'000;
};

/// Writes free_reduce(w) as a product of conjugated relators, minimal in
/// factor count among those found within the bounds; std::nullopt when the
/// search is exhausted. Iterative deepening over factor count.
std::optional<std::vector<ConjugateFactor>> conjugate_decomposition(
    const Presentation& P, const GroupModel& M, const Word& w,
    const DecompositionBounds& bounds = {});

/// Fold a wedge of conjugated-relator lollipops into a diagram whose
/// boundary is exactly w.
Diagram build_diagram(const Presentation& P,
                      const std::vector<ConjugateFactor>& decomposition,
                      const Word& w);

/// Direct lattice filler for words over the two-generator commutator
/// presentation: one face per unit cell of nonzero winding. Handles spurs
/// and slits; rejects windings of magnitude >= 2 (NonPlanarAssembly).
Diagram build_grid_diagram(const Word& w);

/// Dispatcher: grid filler for the commutator presentation of the plane,
/// otherwise decomposition search (BudgetExceeded when it comes up empty).
Diagram build_diagram(const Presentation& P, const GroupModel& M,
                      const Word& w, const DecompositionBounds& bounds = {});

/// Cancel mirror-image face pairs until none remain. Boundary preserved,
/// inner face count decreases by two per cancellation.
Diagram reduce_diagram(const Diagram& D);

struct LipschitzReport {
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;  // diagram distance < group distance
};

struct DiagramMap {
  std::vector<Elem> element;  // per diagram vertex
  std::size_t base = 0;
  LipschitzReport lipschitz;
};

/// The unique label-respecting map into the group with base -> v. Checks
/// the non-expansion inequality on all vertex pairs, or a deterministic
/// 1000-pair sample on large diagrams.
DiagramMap diagram_map(const Diagram& D, const GroupModel& M, const Elem& v);

struct AreaReport {
  std::optional<long long> faces;  // least filling found, if any
  std::optional<long long> winding_bound;  // plane presentations only
  bool exact = false;  // faces == winding_bound
};

/// Dehn-area probe for identity words.
AreaReport area(const Presentation& P, const GroupModel& M, const Word& w,
                const DecompositionBounds& bounds = {});

/// JSON round-trip with full revalidation on load.
void save_diagram(const Diagram& D, const std::filesystem::path& path);
Diagram load_diagram(const std::filesystem::path& path);

/// Deterministic SVG drawing of the planar embedding: outer face on a
/// circle, interior vertices harmonically relaxed, inner faces shaded.
std::string diagram_svg(const Diagram& D, const GeneratorSet& generators);
void save_diagram_svg(const Diagram& D, const GeneratorSet& generators,
                      const std::filesystem::path& path);

}  // namespace coarse

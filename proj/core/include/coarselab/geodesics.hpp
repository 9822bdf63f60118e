#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "coarselab/models.hpp"

namespace coarse {

/// All (or the first `cap`) geodesic label words of length n from the
/// identity, in lexicographic order.
struct GeodesicSet {
  int n = 0;
  std::vector<Word> paths;
  bool truncated = false;
};

struct SearchBudget {
  std::size_t max_nodes = 10'000'000;
};

/// Every length-n word w with exact_length(evaluate(w)) == n, lex order.
GeodesicSet enumerate_geodesics(const GroupModel& M, int n,
                                std::size_t cap = static_cast<std::size_t>(-1),
                                const SearchBudget& budget = {});

/// Cut off the last edge; the prefix of a geodesic is a geodesic.
Word truncate_geodesic(const Word& g);

/// The length-n geodesics that extend to at least one length-m geodesic.
GeodesicSet extendable_prefixes(const GroupModel& M, int n, int m,
                                std::size_t cap = static_cast<std::size_t>(-1),
                                const SearchBudget& budget = {});

/// A geodesic segment of length 2n through the identity: the identity sits
/// at position n, both endpoints are at distance n from it, and
/// d(u,v) = 2n. The finite-depth stand-in for a bi-infinite geodesic.
struct BiInfiniteWitness {
  int n = 0;
  Word labels;               // 2n letters, read from u to v
  std::vector<Elem> points;  // 2n+1 canonical keys; points[n] is the identity
  const Elem& u() const { return points.front(); }
  const Elem& v() const { return points.back(); }
};

/// First witness in lexicographic label order, or std::nullopt when no
/// length-2n geodesic exists (finite models).
std::optional<BiInfiniteWitness> bi_infinite_witness(const GroupModel& M, int n,
                                                     const SearchBudget& budget = {});

}  // namespace coarse

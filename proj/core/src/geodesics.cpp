#include "coarselab/geodesics.hpp"

#include <algorithm>

#include "coarselab/errors.hpp"

namespace coarse {

namespace {

// Shared lexicographic depth-first walk over geodesic label words: a prefix
// is kept only while exact_length(element) == prefix length. `emit` is
// called at target depth; returning false stops the whole search.
class GeodesicWalk {
 public:
  GeodesicWalk(const GroupModel& M, const SearchBudget& budget)
      : model_(M), alphabet_(M.generators().alphabet()), budget_(budget) {}

  template <typename Emit>
  bool run(int depth, Emit&& emit) {
    prefix_.clear();
    return step(model_.identity(), depth, emit);
  }

 private:
  template <typename Emit>
  bool step(const Elem& x, int remaining, Emit& emit) {
    if (++nodes_ > budget_.max_nodes)
      throw BudgetExceeded("geodesic search exceeded its node budget",
                           static_cast<long long>(nodes_));
    if (remaining == 0) return emit(prefix_, x);
    long long here = static_cast<long long>(prefix_.size());
    for (int letter : alphabet_) {
      Elem y = model_.apply_generator(x, letter);
      if (model_.exact_length(y) != here + 1) continue;
      prefix_.push_back(letter);
      bool keep_going = step(y, remaining - 1, emit);
      prefix_.pop_back();
      if (!keep_going) return false;
    }
    return true;
  }

  const GroupModel& model_;
  std::vector<int> alphabet_;
  SearchBudget budget_;
  std::vector<int> prefix_;
  std::size_t nodes_ = 0;
};

}  // namespace

GeodesicSet enumerate_geodesics(const GroupModel& M, int n, std::size_t cap,
                                const SearchBudget& budget) {
  if (n < 0) throw InvalidParameter("geodesic length must be nonnegative");
  GeodesicSet out;
  out.n = n;
  GeodesicWalk walk(M, budget);
  walk.run(n, [&](const std::vector<int>& labels, const Elem&) {
    if (out.paths.size() == cap) {
      out.truncated = true;
      return false;
    }
    out.paths.emplace_back(labels);
    return true;
  });
  return out;
}

Word truncate_geodesic(const Word& g) {
  if (g.empty()) throw EmptyPath("truncate_geodesic");
  return g.prefix(g.size() - 1);
}

GeodesicSet extendable_prefixes(const GroupModel& M, int n, int m, std::size_t cap,
                                const SearchBudget& budget) {
  if (n < 0 || m < n) throw InvalidParameter("need 0 <= n <= m");
  GeodesicSet out;
  out.n = n;
  GeodesicSet at_n = enumerate_geodesics(M, n, static_cast<std::size_t>(-1), budget);

  for (const Word& g : at_n.paths) {
    // depth-first from the endpoint of g, early exit at the first
    // extension certifying depth m
    Elem end = evaluate_word(M, g);
    bool extends = false;
    std::vector<std::pair<Elem, int>> stack{{end, static_cast<int>(g.size())}};
    std::size_t nodes = 0;
    std::vector<int> alphabet = M.generators().alphabet();
    while (!stack.empty() && !extends) {
      auto [x, len] = stack.back();
      stack.pop_back();
      if (++nodes > budget.max_nodes)
        throw BudgetExceeded("extendability search exceeded its node budget",
                             static_cast<long long>(nodes));
      if (len == m) {
        extends = true;
        break;
      }
      for (int letter : alphabet) {
        Elem y = M.apply_generator(x, letter);
        if (M.exact_length(y) == len + 1) stack.emplace_back(std::move(y), len + 1);
      }
    }
    if (extends) {
      if (out.paths.size() == cap) {
        out.truncated = true;
        return out;
      }
      out.paths.push_back(g);
    }
  }
  return out;
}

std::optional<BiInfiniteWitness> bi_infinite_witness(const GroupModel& M, int n,
                                                     const SearchBudget& budget) {
  if (n < 1) throw InvalidParameter("half-length must be at least 1");

  // Any geodesic label word of length 2n re-based at its midpoint works:
  // prefixes and suffixes of geodesics are geodesics, so both halves have
  // length exactly n and the endpoints are 2n apart.
  std::optional<Word> labels;
  GeodesicWalk walk(M, budget);
  walk.run(2 * n, [&](const std::vector<int>& found, const Elem&) {
    labels = Word(found);
    return false;  // first hit in lex order
  });
  if (!labels) return std::nullopt;

  BiInfiniteWitness w;
  w.n = n;
  w.labels = *labels;
  Elem u = M.invert(evaluate_word(M, labels->prefix(static_cast<std::size_t>(n))));
  w.points.push_back(u);
  Elem x = u;
  for (int letter : labels->letters()) {
    x = M.apply_generator(x, letter);
    w.points.push_back(x);
  }
  if (w.points[static_cast<std::size_t>(n)] != M.identity())
    throw InternalError("bi-infinite witness midpoint is not the identity");
  return w;
}

}  // namespace coarse

#include "coarselab/vankampen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include "coarselab/errors.hpp"
#include "json.hpp"

namespace coarse {

namespace {

constexpr std::size_t kNpos = Diagram::npos;

Word word_of(std::vector<int> letters) { return Word(std::move(letters)); }

// --- mutable combinatorial map used by the builders ----------------------

struct MapBuilder {
  struct BDart {
    int label = 0;
    std::size_t from = 0;
    std::size_t inverse = 0;
    bool alive = true;
  };

  std::vector<BDart> darts;
  std::vector<std::vector<std::size_t>> rot;  // cyclic, alive darts only
  std::vector<char> valive;

  std::size_t new_vertex() {
    rot.emplace_back();
    valive.push_back(1);
    return rot.size() - 1;
  }

  // Creates the dart pair for an edge; rotation entries are the caller's job.
  std::size_t add_edge(std::size_t u, std::size_t v, int label) {
    const std::size_t d = darts.size();
    darts.push_back({label, u, d + 1, true});
    darts.push_back({-label, v, d, true});
    return d;
  }

  std::size_t alpha(std::size_t d) const { return darts[d].inverse; }
  std::size_t to(std::size_t d) const { return darts[alpha(d)].from; }

  static void remove_from(std::vector<std::size_t>& list, std::size_t x) {
    const auto it = std::find(list.begin(), list.end(), x);
    if (it == list.end()) throw InternalError("fold: dart missing from rotation");
    list.erase(it);
  }

  static std::vector<std::size_t> cyclic_after(
      const std::vector<std::size_t>& list, std::size_t x) {
    const auto it = std::find(list.begin(), list.end(), x);
    if (it == list.end()) throw InternalError("fold: dart missing from rotation");
    std::vector<std::size_t> out;
    out.insert(out.end(), it + 1, list.end());
    out.insert(out.end(), list.begin(), it);
    return out;
  }

  // Glues the edge of e onto the edge of d, where e follows d along a face
  // cycle (the boundary is the outer face's cycle, so it folds the same way).
  // The darts of e die and alias onto the survivors: e -> alpha(d), alpha(e)
  // -> d; tracking any outside references is the caller's job.
  void fold(std::size_t d, std::size_t e) {
    const std::size_t ad = alpha(d), ae = alpha(e);
    if (e == d || e == ad) throw InternalError("fold: bad dart pair");
    const std::size_t u = darts[d].from, v = darts[e].from, z = darts[ae].from;
    if (darts[ad].from != v) throw InternalError("fold: darts not adjacent");
    if (z != u) {
      const auto xs = cyclic_after(rot[z], ae);
      const auto ys = cyclic_after(rot[u], d);
      std::vector<std::size_t> merged;
      merged.reserve(1 + xs.size() + ys.size());
      merged.push_back(d);
      merged.insert(merged.end(), ys.begin(), ys.end());
      merged.insert(merged.end(), xs.begin(), xs.end());
      for (const std::size_t t : rot[z]) darts[t].from = u;
      rot[u] = std::move(merged);
      rot[z].clear();
      valive[z] = 0;
    } else {
      remove_from(rot[u], ae);
    }
    remove_from(rot[v], e);
    darts[e].alive = darts[ae].alive = false;
  }

  // Removes a dead-end edge traversed out and straight back.
  void spur(std::size_t d) {
    const std::size_t ad = alpha(d);
    const std::size_t u = darts[d].from, v = darts[ad].from;
    remove_from(rot[u], d);
    remove_from(rot[v], ad);
    darts[d].alive = darts[ad].alive = false;
    if (rot[v].empty()) valive[v] = 0;
    if (rot[u].empty()) valive[u] = 0;
  }

  Diagram finish(std::size_t base_vertex, std::size_t base_dart) const {
    std::vector<std::size_t> vmap(rot.size(), kNpos), dmap(darts.size(), kNpos);
    std::vector<std::vector<std::size_t>> out_rot;
    for (std::size_t v = 0; v < rot.size(); ++v)
      if (valive[v] || v == base_vertex) {
        vmap[v] = out_rot.size();
        out_rot.emplace_back();
      }
    std::vector<Dart> out_darts;
    for (std::size_t d = 0; d < darts.size(); ++d)
      if (darts[d].alive) {
        dmap[d] = out_darts.size();
        out_darts.push_back({darts[d].label, vmap[darts[d].from], 0});
      }
    for (std::size_t d = 0; d < darts.size(); ++d)
      if (darts[d].alive) out_darts[dmap[d]].inverse = dmap[darts[d].inverse];
    for (std::size_t v = 0; v < rot.size(); ++v)
      if (vmap[v] != kNpos)
        for (const std::size_t d : rot[v]) out_rot[vmap[v]].push_back(dmap[d]);
    return Diagram(std::move(out_darts), std::move(out_rot), vmap[base_vertex],
                   base_dart == kNpos ? kNpos : dmap[base_dart]);
  }
};

// --- wedge of conjugated relator lollipops --------------------------------

struct Wedge {
  MapBuilder mb;
  std::vector<std::size_t> boundary;  // the anticlockwise boundary walk
  std::size_t base = 0;
};

Wedge build_wedge(const std::vector<ConjugateFactor>& factors) {
  Wedge w;
  w.base = w.mb.new_vertex();
  struct Hook {
    std::size_t depart, ret;  // first and last boundary dart of the factor
  };
  std::vector<Hook> hooks;
  for (const ConjugateFactor& f : factors) {
    const Word cyc = f.sign >= 0 ? f.relator : f.relator.inverse();
    if (cyc.empty()) throw InvalidParameter("decomposition factor has an empty relator");
    std::vector<std::size_t> stem, ring;
    std::size_t cur = w.base;
    for (const int s : f.conjugator.letters()) {
      const std::size_t nv = w.mb.new_vertex();
      const std::size_t d = w.mb.add_edge(cur, nv, s);
      if (cur != w.base)  // interior stem vertex: forward after backward
        w.mb.rot[cur] = {d, w.mb.alpha(stem.back())};
      stem.push_back(d);
      cur = nv;
    }
    const std::size_t anchor = cur;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      const std::size_t nxt =
          (i + 1 == cyc.size()) ? anchor : w.mb.new_vertex();
      const std::size_t d = w.mb.add_edge(cur, nxt, cyc.at(i));
      if (i > 0 && cur != anchor) w.mb.rot[cur] = {d, w.mb.alpha(ring.back())};
      ring.push_back(d);
      cur = nxt;
    }
    if (anchor != w.base) {
      // ring departure, ring return, then toward base: the order that closes
      // the ring into one inner face and routes the boundary around it.
      w.mb.rot[anchor] = {ring.front(), w.mb.alpha(ring.back()),
                          w.mb.alpha(stem.back())};
    }
    for (const std::size_t d : stem) w.boundary.push_back(d);
    for (const std::size_t d : ring) w.boundary.push_back(d);
    for (auto it = stem.rbegin(); it != stem.rend(); ++it)
      w.boundary.push_back(w.mb.alpha(*it));
    hooks.push_back(stem.empty()
                        ? Hook{ring.front(), ring.back()}
                        : Hook{stem.front(), w.mb.alpha(stem.front())});
  }
  // Base rotation: factor departures in order, each stemless factor preceded
  // by its returning ring dart's inverse (face closure).
  const std::size_t k = hooks.size();
  for (std::size_t j = k; j-- > 0;) {
    w.mb.rot[w.base].push_back(hooks[(j + 1) % k].depart);
    const std::size_t g = w.mb.alpha(hooks[j].ret);
    if (g != hooks[j].depart) w.mb.rot[w.base].push_back(g);
  }
  std::reverse(w.mb.rot[w.base].begin(), w.mb.rot[w.base].end());
  return w;
}

// Replays the free reduction of w in reverse, growing a spur at each
// cancelled pair so the boundary becomes w verbatim.
void unreduce_boundary(MapBuilder& mb, std::vector<std::size_t>& B,
                       std::size_t base, const Word& w) {
  std::vector<std::pair<std::size_t, int>> steps;  // (position, first letter)
  std::vector<int> cur = w.letters();
  for (;;) {
    std::size_t i = 0;
    while (i + 1 < cur.size() && cur[i] != -cur[i + 1]) ++i;
    if (i + 1 >= cur.size()) break;
    steps.push_back({i, cur[i]});
    cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(i),
              cur.begin() + static_cast<std::ptrdiff_t>(i) + 2);
  }
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const auto [i, letter] = *it;
    const std::size_t L = B.size();
    const std::size_t attach = L ? mb.darts[B[i % L]].from : base;
    const std::size_t tip = mb.new_vertex();
    const std::size_t p = mb.add_edge(attach, tip, letter);
    mb.rot[tip] = {mb.alpha(p)};
    if (L) {
      auto& r = mb.rot[attach];
      const auto pos = std::find(r.begin(), r.end(), B[i % L]);
      if (pos == r.end()) throw InternalError("unreduce: anchor dart missing");
      r.insert(pos, p);
    } else {
      mb.rot[attach] = {p};
    }
    B.insert(B.begin() + static_cast<std::ptrdiff_t>(i), {p, mb.alpha(p)});
  }
}

// --- plane-specific machinery ---------------------------------------------

bool is_plane_presentation(const Presentation& P) {
  if (P.generators().size() != 2 || P.relators().size() != 1) return false;
  const auto conj = cyclic_conjugates(word_of({1, 2, -1, -2}));
  return std::find(conj.begin(), conj.end(), P.relators().front()) != conj.end();
}

using Cell = std::pair<long long, long long>;

struct GridTrace {
  std::vector<Cell> points;               // |w| + 1 lattice points
  std::map<Cell, long long> winding;      // nonzero cells only
};

GridTrace trace_grid(const Word& w) {
  GridTrace t;
  t.points.push_back({0, 0});
  std::map<long long, std::vector<std::pair<long long, int>>> rows;
  long long x = 0, y = 0;
  for (const int s : w.letters()) {
    switch (s) {
      case 1: ++x; break;
      case -1: --x; break;
      case 2: rows[y].push_back({x, +1}); ++y; break;
      case -2: --y; rows[y].push_back({x, -1}); break;
      default:
        throw InvalidParameter("grid filler: word must use exactly two generators");
    }
    t.points.push_back({x, y});
  }
  if (x != 0 || y != 0)
    throw NotIdentityError("word does not evaluate to the identity");
  for (auto& [row, events] : rows) {
    std::sort(events.begin(), events.end());
    std::vector<long long> xs;
    std::vector<long long> sums;
    for (const auto& [ex, sign] : events) {
      if (xs.empty() || xs.back() != ex) {
        xs.push_back(ex);
        sums.push_back(0);
      }
      sums.back() += sign;
    }
    std::vector<long long> suffix(xs.size() + 1, 0);
    for (std::size_t i = xs.size(); i-- > 0;) suffix[i] = suffix[i + 1] + sums[i];
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const long long val = suffix[i + 1];
      if (val == 0) continue;
      for (long long cx = xs[i]; cx < xs[i + 1]; ++cx)
        t.winding[{cx, row}] = val;
    }
  }
  return t;
}

long long winding_area(const GridTrace& t) {
  long long total = 0;
  for (const auto& [cell, n] : t.winding) total += n < 0 ? -n : n;
  return total;
}

// Number of adjacent (second-generator, first-generator) inversions: the
// face count of the staircase filling that sorts the word one swap at a time.
long long staircase_swaps(const Word& w) {
  long long b_seen = 0, swaps = 0;
  for (const int s : w.letters()) {
    if (s == 2 || s == -2) ++b_seen;
    else swaps += b_seen;
  }
  return swaps;
}

// Factor for swapping adjacent letters (s, t) = (second-gen, first-gen):
// s t = t s * conj(r^sign); found once by brute force over short conjugators.
std::pair<Word, int> commutation_conjugate(const Presentation& P, int s, int t) {
  const Word target = word_of({s, t, -s, -t});
  const auto alphabet = P.generators().alphabet();
  std::vector<Word> stubs{Word{}};
  for (std::size_t i = 0; i < stubs.size() && stubs[i].size() <= 3; ++i) {
    const Word c = stubs[i];  // copy: push_back below reallocates
    for (const int sign : {1, -1}) {
      const Word r = sign > 0 ? P.relators().front() : P.relators().front().inverse();
      if (free_reduce(c * r * c.inverse()) == target) return {c, sign};
    }
    if (c.size() < 3)
      for (const int a : alphabet) stubs.push_back(c.appended(a));
  }
  throw InternalError("no short conjugate realizes the commutation relation");
}

std::vector<ConjugateFactor> staircase_decomposition(const Presentation& P,
                                                     const Word& w_red) {
  std::map<std::pair<int, int>, std::pair<Word, int>> cache;
  std::vector<ConjugateFactor> out;
  std::vector<int> cur = w_red.letters();
  for (;;) {
    std::size_t i = cur.size();
    for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
      const bool sb = cur[j] == 2 || cur[j] == -2;
      const bool ta = cur[j + 1] == 1 || cur[j + 1] == -1;
      if (sb && ta) {
        i = j;
        break;
      }
    }
    if (i == cur.size()) break;
    const int s = cur[i], t = cur[i + 1];
    auto it = cache.find({s, t});
    if (it == cache.end())
      it = cache.emplace(std::pair{s, t}, commutation_conjugate(P, s, t)).first;
    ConjugateFactor f;
    f.conjugator = word_of(std::vector<int>(cur.begin(),
                                            cur.begin() + static_cast<std::ptrdiff_t>(i))) *
                   it->second.first;
    f.relator = P.relators().front();
    f.sign = it->second.second;
    out.push_back(std::move(f));
    std::swap(cur[i], cur[i + 1]);
  }
  return out;
}

Word factor_word(const ConjugateFactor& f) {
  const Word body = f.sign >= 0 ? f.relator : f.relator.inverse();
  return free_reduce(f.conjugator * body * f.conjugator.inverse());
}

}  // namespace

// --- Diagram ---------------------------------------------------------------

Diagram::Diagram(std::vector<Dart> darts,
                 std::vector<std::vector<std::size_t>> rotation,
                 std::size_t base_vertex, std::size_t base_dart)
    : darts_(std::move(darts)),
      rotation_(std::move(rotation)),
      base_vertex_(base_vertex),
      base_dart_(base_dart) {
  const std::size_t nd = darts_.size(), nv = rotation_.size();
  if (nv == 0) throw NonPlanarAssembly("diagram needs at least one vertex");
  if (base_vertex_ >= nv) throw NonPlanarAssembly("base vertex out of range");
  if (nd % 2 != 0) throw NonPlanarAssembly("darts must come in inverse pairs");
  if (nd == 0) {
    if (nv != 1)
      throw NonPlanarAssembly("a diagram without darts must be a single vertex");
    if (base_dart_ != npos)
      throw NonPlanarAssembly("base dart on a diagram without darts");
    faces_.emplace_back();
    outer_face_ = 0;
    return;
  }
  if (base_dart_ >= nd) throw NonPlanarAssembly("base dart out of range");
  if (darts_[base_dart_].from != base_vertex_)
    throw NonPlanarAssembly("base dart must leave the base vertex");
  for (std::size_t d = 0; d < nd; ++d) {
    const Dart& dd = darts_[d];
    if (dd.label == 0) throw NonPlanarAssembly("dart without a label");
    if (dd.from >= nv || dd.inverse >= nd || dd.inverse == d)
      throw NonPlanarAssembly("dart pairing out of range");
    if (darts_[dd.inverse].inverse != d)
      throw NonPlanarAssembly("dart pairing is not an involution");
    if (darts_[dd.inverse].label != -dd.label)
      throw NonPlanarAssembly("paired darts must carry inverse labels");
  }
  std::vector<char> seen(nd, 0);
  for (std::size_t v = 0; v < nv; ++v)
    for (const std::size_t d : rotation_[v]) {
      if (d >= nd || darts_[d].from != v || seen[d])
        throw NonPlanarAssembly("rotation must list each dart once at its source");
      seen[d] = 1;
    }
  for (const char s : seen)
    if (!s) throw NonPlanarAssembly("rotation must list each dart once at its source");

  // connectivity over the 1-skeleton
  std::vector<char> reached(nv, 0);
  std::queue<std::size_t> q;
  reached[base_vertex_] = 1;
  q.push(base_vertex_);
  std::size_t count = 1;
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (const std::size_t d : rotation_[v]) {
      const std::size_t u = to(d);
      if (!reached[u]) {
        reached[u] = 1;
        ++count;
        q.push(u);
      }
    }
  }
  if (count != nv) throw NonPlanarAssembly("diagram is not connected");

  // faces: orbits of next(d) = rotation-successor of inverse(d)
  std::vector<std::size_t> rnext(nd);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& r = rotation_[v];
    for (std::size_t i = 0; i < r.size(); ++i)
      rnext[r[i]] = r[(i + 1) % r.size()];
  }
  face_of_.assign(nd, npos);
  for (std::size_t d = 0; d < nd; ++d) {
    if (face_of_[d] != npos) continue;
    std::vector<std::size_t> cycle;
    std::size_t cur = d;
    while (face_of_[cur] == npos) {
      face_of_[cur] = faces_.size();
      cycle.push_back(cur);
      cur = rnext[darts_[cur].inverse];
    }
    if (cur != d) throw NonPlanarAssembly("face orbit failed to close");
    faces_.push_back(std::move(cycle));
  }
  const long long euler = static_cast<long long>(nv) -
                          static_cast<long long>(nd / 2) +
                          static_cast<long long>(faces_.size());
  if (euler != 2)
    throw NonPlanarAssembly("assembly is not planar: V - E + F = " +
                            std::to_string(euler));
  outer_face_ = face_of_[base_dart_];
}

Word Diagram::face_word(std::size_t face) const {
  const auto& cycle = faces_.at(face);
  if (cycle.empty()) return Word{};
  const std::size_t start = static_cast<std::size_t>(
      std::min_element(cycle.begin(), cycle.end()) - cycle.begin());
  std::vector<int> letters;
  letters.reserve(cycle.size());
  for (std::size_t i = 0; i < cycle.size(); ++i)
    letters.push_back(darts_[cycle[(start + i) % cycle.size()]].label);
  return word_of(std::move(letters));
}

Word boundary_word(const Diagram& D) {
  if (D.darts().empty()) return Word{};
  const std::size_t nd = D.darts().size();
  std::vector<std::size_t> rnext(nd);
  for (const auto& r : D.rotation())
    for (std::size_t i = 0; i < r.size(); ++i)
      rnext[r[i]] = r[(i + 1) % r.size()];
  std::vector<int> letters;
  std::size_t cur = D.base_dart();
  do {
    letters.push_back(D.darts()[cur].label);
    if (letters.size() > nd) throw InternalError("boundary walk failed to close");
    cur = rnext[D.darts()[cur].inverse];
  } while (cur != D.base_dart());
  return word_of(std::move(letters));
}

void check_faces_against(const Diagram& D, const Presentation& P) {
  std::set<std::vector<int>> allowed;
  for (const Word& r : P.relators())
    for (const Word& c : cyclic_conjugates(r)) allowed.insert(c.letters());
  for (std::size_t f = 0; f < D.face_count(); ++f) {
    if (f == D.outer_face()) continue;
    const Word fw = D.face_word(f);
    bool ok = false;
    for (std::size_t rot = 0; rot < std::max<std::size_t>(fw.size(), 1); ++rot) {
      std::vector<int> cand;
      for (std::size_t i = 0; i < fw.size(); ++i)
        cand.push_back(fw.at((rot + i) % fw.size()));
      if (allowed.count(cand)) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw InternalError("inner face label is not a relator conjugate: " +
                          render_word(P.generators(), fw));
  }
}

// --- decomposition search ---------------------------------------------------

std::optional<std::vector<ConjugateFactor>> conjugate_decomposition(
    const Presentation& P, const GroupModel& M, const Word& w,
    const DecompositionBounds& bounds) {
  if (evaluate_word(M, w) != M.identity())
    throw NotIdentityError("word does not evaluate to the identity");
  const Word target = free_reduce(w);
  if (target.empty()) return std::vector<ConjugateFactor>{};

  // Candidate factors: short reduced conjugators, relators in order, both
  // signs; first spelling of each distinct reduced factor wins.
  std::vector<Word> conjugators{Word{}};
  for (std::size_t i = 0; i < conjugators.size(); ++i) {
    if (conjugators[i].size() >= bounds.max_conjugator) continue;
    for (const int a : P.generators().alphabet()) {
      if (!conjugators[i].empty() &&
          conjugators[i].at(conjugators[i].size() - 1) == -a)
        continue;
      conjugators.push_back(conjugators[i].appended(a));
    }
  }
  std::stable_sort(conjugators.begin(), conjugators.end(), shortlex_less);
  std::vector<std::pair<Word, ConjugateFactor>> cands;
  std::set<std::vector<int>> dedup;
  std::size_t max_len = 0;
  for (const Word& u : conjugators)
    for (std::size_t ri = 0; ri < P.relators().size(); ++ri)
      for (const int sign : {1, -1}) {
        ConjugateFactor f{u, P.relators()[ri], sign};
        Word val = factor_word(f);
        if (val.empty() || !dedup.insert(val.letters()).second) continue;
        max_len = std::max(max_len, val.size());
        cands.push_back({std::move(val), std::move(f)});
      }
  if (cands.empty()) return std::nullopt;

  std::size_t nodes = 0;
  std::vector<ConjugateFactor> chosen;
  // Iterative deepening on the factor count keeps the first solution minimal.
  std::function<bool(const Word&, std::size_t)> dfs =
      [&](const Word& rem, std::size_t left) -> bool {
    if (rem.empty()) return true;
    if (left == 0) return false;
    if (rem.size() > max_len * left) return false;
    for (const auto& [val, f] : cands) {
      if (++nodes > bounds.max_nodes)
        throw BudgetExceeded("decomposition search budget exhausted",
                             static_cast<long long>(nodes));
      const Word next = free_reduce(val.inverse() * rem);
      chosen.push_back(f);
      if (dfs(next, left - 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  try {
    for (std::size_t k = 1; k <= bounds.max_factors; ++k) {
      chosen.clear();
      nodes = 0;
      if (dfs(target, k)) return chosen;
    }
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
  return std::nullopt;
}

// --- builders ---------------------------------------------------------------

Diagram build_diagram(const Presentation& P,
                      const std::vector<ConjugateFactor>& decomposition,
                      const Word& w) {
  const Word target = free_reduce(w);
  Word product;
  std::size_t wedge_size = 0;
  for (const ConjugateFactor& f : decomposition) {
    if (f.sign != 1 && f.sign != -1)
      throw InvalidParameter("decomposition sign must be +1 or -1");
    if (std::find(P.relators().begin(), P.relators().end(), f.relator) ==
        P.relators().end())
      throw InvalidParameter("decomposition factor uses an unknown relator");
    product = free_reduce(product * factor_word(f));
    wedge_size += 2 * f.conjugator.size() + f.relator.size();
  }
  if (product != target)
    throw InvalidParameter("decomposition does not multiply to the word");
  if (wedge_size > 500'000)
    throw BudgetExceeded("wedge would be too large to fold",
                         static_cast<long long>(wedge_size));

  // Adjacent factors that cancel as free words contribute nothing to the
  // boundary and can only pinch spheres while folding; drop them first.
  std::vector<ConjugateFactor> kept;
  for (const ConjugateFactor& f : decomposition) {
    if (!kept.empty() &&
        free_reduce(factor_word(kept.back()) * factor_word(f)).empty())
      kept.pop_back();
    else
      kept.push_back(f);
  }

  Wedge wedge;
  if (kept.empty())
    wedge.base = wedge.mb.new_vertex();
  else
    wedge = build_wedge(kept);
  MapBuilder& mb = wedge.mb;
  std::vector<std::size_t>& B = wedge.boundary;
  std::size_t base = wedge.base;

  // Fold the boundary down to the freely reduced word.
  while (B.size() > target.size()) {
    std::size_t i = B.size();
    for (std::size_t j = 0; j + 1 < B.size(); ++j)
      if (mb.darts[B[j]].label == -mb.darts[B[j + 1]].label) {
        i = j;
        break;
      }
    if (i == B.size())
      throw InternalError("boundary stopped reducing before reaching the word");
    const std::size_t d = B[i], e = B[i + 1];
    if (e == mb.alpha(d)) {
      mb.spur(d);
      B.erase(B.begin() + static_cast<std::ptrdiff_t>(i),
              B.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else {
      const std::size_t ae = mb.alpha(e);
      const std::size_t z = mb.darts[ae].from;
      const std::size_t u = mb.darts[d].from;
      mb.fold(d, e);
      if (z != u && base == z) base = u;
      B.erase(B.begin() + static_cast<std::ptrdiff_t>(i),
              B.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      // remaining traversals of the killed edge alias onto the kept one
      for (std::size_t& b : B) {
        if (b == e) b = mb.alpha(d);
        else if (b == ae) b = d;
      }
    }
  }
  for (std::size_t j = 0; j < B.size(); ++j)
    if (mb.darts[B[j]].label != target.at(j))
      throw InternalError("folded boundary differs from the reduced word");
  if (B.empty())
    for (const auto& dd : mb.darts)
      if (dd.alive)
        throw NonPlanarAssembly("factors close into a sphere with no boundary");

  unreduce_boundary(mb, B, base, w);

  const std::size_t base_dart = B.empty() ? kNpos : B.front();
  if (!B.empty() && mb.darts[B.front()].from != base)
    base = mb.darts[B.front()].from;
  Diagram D = mb.finish(base, base_dart);
  if (boundary_word(D) != w)
    throw NonPlanarAssembly(
        "folding pinched the assembly; its boundary no longer spells the word");
  check_faces_against(D, P);
  return D;
}

Diagram build_grid_diagram(const Word& w) {
  const GridTrace t = trace_grid(w);
  if (w.empty()) {
    std::vector<std::vector<std::size_t>> rot(1);
    return Diagram({}, std::move(rot), 0, kNpos);
  }
  bool pos = false, neg = false;
  for (const auto& [cell, n] : t.winding) {
    if (n > 1 || n < -1)
      throw NonPlanarAssembly("winding magnitude exceeds one cell layer");
    (n > 0 ? pos : neg) = true;
  }
  if (pos && neg)
    throw NonPlanarAssembly("mixed winding signs admit no flat filling");
  const bool mirror = neg;

  // Edge bookkeeping: key (x, y, kind), kind 0 horizontal to (x+1,y),
  // kind 1 vertical to (x,y+1).
  struct EdgeUse {
    int fwd = 0, bwd = 0, filled = 0;
  };
  std::map<std::tuple<long long, long long, int>, EdgeUse> edges;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto [x, y] = t.points[i];
    switch (w.at(i)) {
      case 1: edges[{x, y, 0}].fwd++; break;
      case -1: edges[{x - 1, y, 0}].bwd++; break;
      case 2: edges[{x, y, 1}].fwd++; break;
      case -2: edges[{x, y - 1, 1}].bwd++; break;
      default: break;
    }
  }
  for (const auto& [cell, n] : t.winding) {
    const auto [cx, cy] = cell;
    edges[{cx, cy, 0}].filled++;      // bottom
    edges[{cx, cy + 1, 0}].filled++;  // top
    edges[{cx, cy, 1}].filled++;      // left
    edges[{cx + 1, cy, 1}].filled++;  // right
  }
  std::set<Cell> pts{{0, 0}};
  for (const auto& [key, use] : edges) {
    const auto [x, y, kind] = key;
    const int t2 = use.fwd + use.bwd;
    if (t2 > 2 || (t2 == 2 && use.fwd != 1) || t2 + use.filled != 2)
      throw NonPlanarAssembly("path and filling disagree along a lattice edge");
    pts.insert({x, y});
    pts.insert(kind == 0 ? Cell{x + 1, y} : Cell{x, y + 1});
  }
  std::map<Cell, std::size_t> vid;
  for (const Cell& p : pts) vid.emplace(p, vid.size());

  std::vector<Dart> darts;
  std::map<std::tuple<long long, long long, int>, std::size_t> first_dart;
  for (const auto& [key, use] : edges) {
    const auto [x, y, kind] = key;
    const std::size_t a = vid.at({x, y});
    const std::size_t b = vid.at(kind == 0 ? Cell{x + 1, y} : Cell{x, y + 1});
    first_dart[key] = darts.size();
    const int label = kind == 0 ? 1 : 2;
    darts.push_back({label, a, darts.size() + 1});
    darts.push_back({-label, b, darts.size() - 1});
  }

  std::vector<std::vector<std::size_t>> rot(vid.size());
  for (const auto& [p, v] : vid) {
    const auto [x, y] = p;
    std::optional<std::size_t> E, N, W, S;
    if (auto it = first_dart.find({x, y, 0}); it != first_dart.end())
      E = it->second;
    if (auto it = first_dart.find({x, y, 1}); it != first_dart.end())
      N = it->second;
    if (auto it = first_dart.find({x - 1, y, 0}); it != first_dart.end())
      W = it->second + 1;
    if (auto it = first_dart.find({x, y - 1, 1}); it != first_dart.end())
      S = it->second + 1;
    const auto order = mirror ? std::vector<std::optional<std::size_t>>{E, S, W, N}
                              : std::vector<std::optional<std::size_t>>{E, N, W, S};
    for (const auto& d : order)
      if (d) rot[v].push_back(*d);
  }

  std::size_t base_dart = kNpos;
  {
    const auto [x, y] = t.points[0];
    switch (w.at(0)) {
      case 1: base_dart = first_dart.at({x, y, 0}); break;
      case -1: base_dart = first_dart.at({x - 1, y, 0}) + 1; break;
      case 2: base_dart = first_dart.at({x, y, 1}); break;
      case -2: base_dart = first_dart.at({x, y - 1, 1}) + 1; break;
      default: break;
    }
  }
  Diagram D(std::move(darts), std::move(rot), vid.at({0, 0}), base_dart);
  if (boundary_word(D) != w)
    throw NonPlanarAssembly("pinched path order does not match a flat embedding");
  if (D.inner_face_count() != t.winding.size())
    throw InternalError("grid filler face count mismatch");
  return D;
}

Diagram build_diagram(const Presentation& P, const GroupModel& M, const Word& w,
                      const DecompositionBounds& bounds) {
  if (evaluate_word(M, w) != M.identity())
    throw NotIdentityError("word does not evaluate to the identity");
  const bool plane = is_plane_presentation(P);
  if (plane) {
    try {
      return build_grid_diagram(w);
    } catch (const NonPlanarAssembly&) {
      // mixed winding: fall through to the decomposition routes
    }
  }
  if (w.size() <= 16) {
    const auto dec = conjugate_decomposition(P, M, w, bounds);
    if (dec) return build_diagram(P, *dec, w);
  }
  if (plane) return build_diagram(P, staircase_decomposition(P, free_reduce(w)), w);
  throw BudgetExceeded("no relator decomposition found within bounds",
                       static_cast<long long>(w.size()));
}

// --- reduction ---------------------------------------------------------------

namespace {

struct LiveFaces {
  std::vector<std::vector<std::size_t>> cycles;
  std::vector<std::size_t> face_of;
  std::size_t outer = 0;
};

LiveFaces live_faces(const MapBuilder& mb, std::size_t base_dart) {
  LiveFaces lf;
  lf.face_of.assign(mb.darts.size(), kNpos);
  std::vector<std::size_t> rnext(mb.darts.size(), kNpos);
  for (const auto& r : mb.rot)
    for (std::size_t i = 0; i < r.size(); ++i)
      rnext[r[i]] = r[(i + 1) % r.size()];
  for (std::size_t d = 0; d < mb.darts.size(); ++d) {
    if (!mb.darts[d].alive || lf.face_of[d] != kNpos) continue;
    std::vector<std::size_t> cycle;
    std::size_t cur = d;
    while (lf.face_of[cur] == kNpos) {
      lf.face_of[cur] = lf.cycles.size();
      cycle.push_back(cur);
      cur = rnext[mb.darts[cur].inverse];
      if (cur == kNpos) throw InternalError("reduce: face orbit broke");
    }
    lf.cycles.push_back(std::move(cycle));
  }
  lf.outer = lf.face_of[base_dart];
  return lf;
}

}  // namespace

Diagram reduce_diagram(const Diagram& D) {
  if (D.darts().empty()) return D;
  MapBuilder mb;
  for (const Dart& d : D.darts()) mb.darts.push_back({d.label, d.from, d.inverse, true});
  mb.rot = D.rotation();
  mb.valive.assign(D.vertex_count(), 1);
  std::size_t base = D.base_vertex();
  std::size_t base_dart = D.base_dart();

  for (;;) {
    const LiveFaces lf = live_faces(mb, base_dart);
    // find a cancellable mirror pair: inner faces F1 != F2 sharing an edge,
    // with boundary labels from the shared darts mutually inverse
    std::size_t found = kNpos;
    for (std::size_t d = 0; d < mb.darts.size() && found == kNpos; ++d) {
      if (!mb.darts[d].alive) continue;
      const std::size_t f1 = lf.face_of[d], f2 = lf.face_of[mb.alpha(d)];
      if (f1 == f2 || f1 == lf.outer || f2 == lf.outer) continue;
      const auto& c1raw = lf.cycles[f1];
      const auto& c2raw = lf.cycles[f2];
      if (c1raw.size() != c2raw.size()) continue;
      const std::size_t m = c1raw.size();
      auto rotate_to = [](const std::vector<std::size_t>& c, std::size_t d0) {
        const std::size_t p = static_cast<std::size_t>(
            std::find(c.begin(), c.end(), d0) - c.begin());
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < c.size(); ++i)
          out.push_back(c[(p + i) % c.size()]);
        return out;
      };
      const auto c1 = rotate_to(c1raw, d);
      const auto c2 = rotate_to(c2raw, mb.alpha(d));
      bool mirror = true;
      for (std::size_t k = 1; k < m; ++k)
        if (mb.darts[c2[k]].label != -mb.darts[c1[m - k]].label) {
          mirror = false;
          break;
        }
      if (!mirror) continue;
      // cancel: delete the shared edge, then zip the merged hole shut
      std::vector<std::size_t> hole;
      for (std::size_t k = 1; k < m; ++k) hole.push_back(c1[k]);
      for (std::size_t k = 1; k < m; ++k) hole.push_back(c2[k]);
      MapBuilder::remove_from(mb.rot[mb.darts[d].from], d);
      MapBuilder::remove_from(mb.rot[mb.darts[mb.alpha(d)].from], mb.alpha(d));
      mb.darts[d].alive = mb.darts[mb.alpha(d)].alive = false;
      std::size_t seam = m >= 2 ? m - 2 : 0;  // last of c1's tail
      while (!hole.empty()) {
        const std::size_t a = hole[seam], b = hole[(seam + 1) % hole.size()];
        if (mb.darts[a].label != -mb.darts[b].label)
          throw InternalError("reduce: zip seam does not cancel");
        if (b == mb.alpha(a)) {
          mb.spur(a);
        } else {
          const std::size_t z = mb.darts[mb.alpha(b)].from;
          const std::size_t u = mb.darts[a].from;
          mb.fold(a, b);
          if (z != u && base == z) base = u;
          if (base_dart == b) base_dart = mb.alpha(a);
          else if (base_dart == mb.alpha(b)) base_dart = a;
          for (std::size_t& h : hole)
            if (!mb.darts[h].alive) h = (h == b) ? mb.alpha(a) : a;
        }
        // remove the zipped pair (positions seam, seam+1 cyclically)
        const std::size_t p2 = (seam + 1) % hole.size();
        if (p2 > seam) {
          hole.erase(hole.begin() + static_cast<std::ptrdiff_t>(seam),
                     hole.begin() + static_cast<std::ptrdiff_t>(seam) + 2);
        } else {
          hole.erase(hole.begin() + static_cast<std::ptrdiff_t>(seam));
          hole.erase(hole.begin());
        }
        if (seam > 0) --seam;
        if (!hole.empty() && seam + 1 >= hole.size()) seam = hole.size() - 1;
      }
      found = d;
    }
    if (found == kNpos) break;
  }
  Diagram out = mb.finish(base, base_dart);
  if (boundary_word(out) != boundary_word(D))
    throw InternalError("reduction changed the boundary word");
  return out;
}

// --- the map to the group ----------------------------------------------------

DiagramMap diagram_map(const Diagram& D, const GroupModel& M, const Elem& v) {
  DiagramMap out;
  out.base = D.base_vertex();
  out.element.assign(D.vertex_count(), Elem{});
  std::vector<char> have(D.vertex_count(), 0);
  out.element[out.base] = v;
  have[out.base] = 1;
  std::queue<std::size_t> q;
  q.push(out.base);
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    for (const std::size_t d : D.rotation()[x]) {
      const std::size_t y = D.to(d);
      const Elem img = M.apply_generator(out.element[x], D.darts()[d].label);
      if (!have[y]) {
        out.element[y] = img;
        have[y] = 1;
        q.push(y);
      } else if (out.element[y] != img) {
        throw InternalError("diagram labels are inconsistent with the group");
      }
    }
  }

  // non-expansion: diagram distance dominates group distance
  const std::size_t n = D.vertex_count();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t x = 0; x < n; ++x)
    for (const std::size_t d : D.rotation()[x]) adj[x].push_back(D.to(d));
  auto bfs_from = [&](std::size_t s) {
    std::vector<long long> dist(n, -1);
    std::queue<std::size_t> bq;
    dist[s] = 0;
    bq.push(s);
    while (!bq.empty()) {
      const std::size_t x = bq.front();
      bq.pop();
      for (const std::size_t y : adj[x])
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          bq.push(y);
        }
    }
    return dist;
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (n * (n - 1) / 2 <= 1000) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  } else {
    std::mt19937 rng(1729);
    while (pairs.size() < 1000) {
      const std::size_t i = rng() % n, j = rng() % n;
      if (i != j) pairs.push_back({std::min(i, j), std::max(i, j)});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::size_t cur_src = kNpos;
  std::vector<long long> dist;
  for (const auto& [i, j] : pairs) {
    if (i != cur_src) {
      cur_src = i;
      dist = bfs_from(i);
    }
    const Elem diff = M.multiply(M.invert(out.element[i]), out.element[j]);
    const long long group_d = M.exact_length(diff);
    ++out.lipschitz.pairs_checked;
    if (dist[j] < 0 || dist[j] < group_d) ++out.lipschitz.violations;
  }
  return out;
}

// --- area ---------------------------------------------------------------------

AreaReport area(const Presentation& P, const GroupModel& M, const Word& w,
                const DecompositionBounds& bounds) {
  if (evaluate_word(M, w) != M.identity())
    throw NotIdentityError("word does not evaluate to the identity");
  AreaReport rep;
  if (is_plane_presentation(P)) {
    const GridTrace t = trace_grid(w);
    const long long wb = winding_area(t);
    rep.winding_bound = wb;
    bool flat = true;
    for (const auto& [cell, n] : t.winding)
      if (n > 1 || n < -1) flat = false;
    bool sign_pos = false, sign_neg = false;
    for (const auto& [cell, n] : t.winding) (n > 0 ? sign_pos : sign_neg) = true;
    if (flat && !(sign_pos && sign_neg)) {
      try {
        build_grid_diagram(w);
        rep.faces = wb;
        rep.exact = true;
        return rep;
      } catch (const NonPlanarAssembly&) {
      }
    }
    long long best = staircase_swaps(free_reduce(w));
    if (best > wb && w.size() <= 16) {
      const auto dec = conjugate_decomposition(P, M, w, bounds);
      if (dec) best = std::min(best, static_cast<long long>(dec->size()));
    }
    rep.faces = best;
    rep.exact = best == wb;
    return rep;
  }
  const auto dec = conjugate_decomposition(P, M, w, bounds);
  if (dec) rep.faces = static_cast<long long>(dec->size());
  return rep;
}

// --- io -------------------------------------------------------------------------

void save_diagram(const Diagram& D, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["vertices"] = D.vertex_count();
  j["base"] = D.base_vertex();
  j["base_dart"] = D.base_dart() == kNpos ? -1
                                          : static_cast<long long>(D.base_dart());
  nlohmann::json darts = nlohmann::json::array();
  for (const Dart& d : D.darts())
    darts.push_back({{"label", d.label}, {"from", d.from}, {"inverse", d.inverse}});
  j["darts"] = std::move(darts);
  j["rotation"] = D.rotation();

  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << j.dump(1) << '\n';
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("failed to move " + tmp.string() + " into place");
}

Diagram load_diagram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format_version").get<int>() != 1)
      throw IoError("unsupported diagram file version");
    std::vector<Dart> darts;
    for (const auto& jd : j.at("darts"))
      darts.push_back({jd.at("label").get<int>(),
                       jd.at("from").get<std::size_t>(),
                       jd.at("inverse").get<std::size_t>()});
    auto rotation = j.at("rotation").get<std::vector<std::vector<std::size_t>>>();
    if (rotation.size() != j.at("vertices").get<std::size_t>())
      throw IoError("diagram vertex count disagrees with the rotation table");
    const long long bd = j.at("base_dart").get<long long>();
    return Diagram(std::move(darts), std::move(rotation),
                   j.at("base").get<std::size_t>(),
                   bd < 0 ? kNpos : static_cast<std::size_t>(bd));
  } catch (const IoError&) {
    throw;
  } catch (const NonPlanarAssembly& e) {
    throw IoError("diagram file is inconsistent: " + std::string(e.what()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("diagram file is malformed: " + std::string(e.what()));
  }
}

// --- svg ------------------------------------------------------------------------

namespace {

std::string fmt2(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v,
                               std::chars_format::fixed, 2);
  if (ec != std::errc{}) throw InternalError("svg: number formatting failed");
  return std::string(buf, p);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string diagram_svg(const Diagram& D, const GeneratorSet& generators) {
  const std::size_t nv = D.vertex_count();
  // outer face on the unit circle, pinned at first occurrence
  std::vector<double> x(nv, 0.0), y(nv, 0.0);
  std::vector<char> pinned(nv, 0);
  const auto& outer = D.faces()[D.outer_face()];
  const double pi = 3.14159265358979323846;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const std::size_t v = D.darts()[outer[i]].from;
    if (pinned[v]) continue;
    const double t = 2.0 * pi * static_cast<double>(i) /
                     static_cast<double>(outer.size());
    x[v] = std::cos(t);
    y[v] = std::sin(t);
    pinned[v] = 1;
  }
  if (outer.empty()) pinned[D.base_vertex()] = 1;  // dartless diagram
  // harmonic relaxation of the interior (Tutte barycentric embedding)
  for (int pass = 0; pass < 4000; ++pass) {
    double delta = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      if (pinned[v] || D.rotation()[v].empty()) continue;
      double sx = 0.0, sy = 0.0;
      for (const std::size_t d : D.rotation()[v]) {
        sx += x[D.to(d)];
        sy += y[D.to(d)];
      }
      const double n = static_cast<double>(D.rotation()[v].size());
      delta = std::max({delta, std::abs(sx / n - x[v]), std::abs(sy / n - y[v])});
      x[v] = sx / n;
      y[v] = sy / n;
    }
    if (delta < 1e-9) break;
  }

  const double S = 220.0, C = 256.0;  // scale and center in px
  auto px = [&](std::size_t v) { return C + S * x[v]; };
  auto py = [&](std::size_t v) { return C - S * y[v]; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 512 512\">\n";
  svg += "<rect width=\"512\" height=\"512\" fill=\"white\"/>\n";
  static const char* palette[] = {"#9ecae1", "#a1d99b", "#fdae6b",
                                  "#bcbddc", "#fc9272", "#c7e9c0"};
  for (std::size_t f = 0; f < D.face_count(); ++f) {
    if (f == D.outer_face() || D.faces()[f].empty()) continue;
    svg += "<polygon points=\"";
    for (const std::size_t d : D.faces()[f]) {
      const std::size_t v = D.darts()[d].from;
      svg += fmt2(px(v)) + "," + fmt2(py(v)) + " ";
    }
    svg.pop_back();
    svg += "\" fill=\"";
    svg += palette[f % (sizeof palette / sizeof *palette)];
    svg += "\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
  }
  // parallel edges bow outward so multi-edges stay visible
  std::map<std::pair<std::size_t, std::size_t>, int> multi, seen_par;
  for (std::size_t d = 0; d < D.darts().size(); ++d)
    if (D.darts()[d].label > 0)
      multi[std::minmax(D.darts()[d].from, D.to(d))]++;
  for (std::size_t d = 0; d < D.darts().size(); ++d) {
    if (D.darts()[d].label < 0) continue;  // one stroke per edge
    const std::size_t u = D.darts()[d].from, v = D.to(d);
    const std::size_t g = static_cast<std::size_t>(D.darts()[d].label) - 1;
    const std::string name =
        g < generators.size() ? generators.name(g) : std::to_string(g + 1);
    if (u == v) {
      svg += "<circle cx=\"" + fmt2(px(u) + 12) + "\" cy=\"" + fmt2(py(u)) +
             "\" r=\"12\" fill=\"none\" stroke=\"#333333\"/>\n";
      svg += "<text x=\"" + fmt2(px(u) + 27) + "\" y=\"" + fmt2(py(u)) +
             "\" font-size=\"11\" fill=\"#555555\">" + xml_escape(name) +
             "</text>\n";
      continue;
    }
    const auto key = std::minmax(u, v);
    const int k = multi[key], i = seen_par[key]++;
    double mx = (px(u) + px(v)) / 2, my = (py(u) + py(v)) / 2;
    if (k > 1) {
      const double dx = px(v) - px(u), dy = py(v) - py(u);
      const double len = std::hypot(dx, dy);
      const double off = 28.0 * (i - (k - 1) / 2.0) / std::max(len, 1.0);
      const double cx = mx - dy * off, cy = my + dx * off;
      svg += "<path d=\"M " + fmt2(px(u)) + " " + fmt2(py(u)) + " Q " +
             fmt2(cx) + " " + fmt2(cy) + " " + fmt2(px(v)) + " " + fmt2(py(v)) +
             "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
      mx = (mx + cx) / 2;
      my = (my + cy) / 2;
    } else {
      svg += "<line x1=\"" + fmt2(px(u)) + "\" y1=\"" + fmt2(py(u)) +
             "\" x2=\"" + fmt2(px(v)) + "\" y2=\"" + fmt2(py(v)) +
             "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n";
    }
    svg += "<text x=\"" + fmt2(mx + 3) + "\" y=\"" + fmt2(my - 3) +
           "\" font-size=\"11\" fill=\"#555555\">" + xml_escape(name) +
           "</text>\n";
  }
  for (std::size_t v = 0; v < nv; ++v) {
    svg += "<circle cx=\"" + fmt2(px(v)) + "\" cy=\"" + fmt2(py(v)) +
           "\" r=\"3\" fill=\"";
    svg += v == D.base_vertex() ? "#d62728" : "#333333";
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void save_diagram_svg(const Diagram& D, const GeneratorSet& generators,
                      const std::filesystem::path& path) {
  const std::string svg = diagram_svg(D, generators);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << svg;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("failed to move " + tmp.string() + " into place");
}

}  // namespace coarse

#include "coarselab/refuter.hpp"

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "coarselab/ends.hpp"
#include "coarselab/errors.hpp"

namespace coarse {

namespace {

using bigint = boost::multiprecision::cpp_int;

constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::string join_ids(const std::vector<std::size_t>& ids) {
  std::ostringstream out;
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
  return out.str();
}

/// piece ids containing each ball vertex, ascending
std::vector<std::vector<std::size_t>> pieces_at_vertex(const Cover& C,
                                                       std::size_t n_vertices) {
  std::vector<std::vector<std::size_t>> at(n_vertices);
  for (std::size_t p = 0; p < C.pieces.size(); ++p)
    for (const std::size_t v : C.pieces[p]) at[v].push_back(p);
  return at;
}

bool has_id(const std::vector<std::size_t>& sorted, std::size_t id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

}  // namespace

PaperConstants paper_constants(const Presentation& P, long long D,
                               const DeskOverrides& desk,
                               const BallBudget& budget) {
  if (P.relators().empty()) throw NoRelators();
  if (D < 1) throw InvalidParameter("paper_constants: D must be >= 1");
  if (desk.d_used < 1 || desk.N_used < 1 || desk.R_used < 1)
    throw InvalidParameter("paper_constants: desk parameters must be >= 1");

  PaperConstants out;
  out.D = D;
  for (const Word& r : P.relators())
    out.M = std::max(out.M, static_cast<long long>(r.size()));
  out.d_threshold = 100 * out.M + 100;

  const bigint N =
      std::max(bigint(100) * boost::multiprecision::pow(bigint(D), 100),
               bigint(300) * bigint(out.M));
  out.N = N.str();
  out.N_fits_ball_budget = N <= bigint(budget.max_vertices);

  out.d_used = desk.d_used;
  out.N_used = desk.N_used;
  out.R_used = desk.R_used;
  if (out.d_used <= out.d_threshold)
    out.overrides.push_back("d_used=" + std::to_string(out.d_used) +
                            " is not above the required threshold d > " +
                            std::to_string(out.d_threshold));
  if (bigint(out.N_used) < N)
    out.overrides.push_back("N_used=" + std::to_string(out.N_used) +
                            " falls short of N (" +
                            std::to_string(out.N.size()) + " digits)");
  out.overrides.push_back("R_used=" + std::to_string(out.R_used) +
                          " restricts the infinite group to a finite window");
  return out;
}

bool verify_witness(const Cover& C, const RefutationWitness& W) {
  if (C.ball == nullptr) return false;
  const Ball& B = *C.ball;
  const std::size_t n = C.pieces.size();
  auto member = [&](std::size_t piece, std::size_t v) {
    return piece < n && v < B.size() &&
           std::binary_search(C.pieces[piece].begin(), C.pieces[piece].end(),
                              v);
  };

  switch (W.kind) {
    case WitnessKind::MultiplicityBall: {
      const auto* p = std::get_if<MultiplicityBallPayload>(&W.payload);
      if (p == nullptr || p->center >= B.size() || W.d < 0) return false;
      const std::set<std::size_t> ids(p->pieces.begin(), p->pieces.end());
      if (ids.size() != p->pieces.size() || ids.size() < 3) return false;
      for (const std::size_t piece : ids) {
        if (piece >= n) return false;
        if (piece_distance(B, {p->center}, C.pieces[piece]) > W.d)
          return false;
      }
      return true;
    }
    case WitnessKind::ProximityPair: {
      const auto* p = std::get_if<ProximityPairPayload>(&W.payload);
      if (p == nullptr || p->piece_a >= n || p->piece_b >= n) return false;
      if (p->piece_a == p->piece_b) return false;
      if (C.classes[p->piece_a] != C.classes[p->piece_b]) return false;
      if (!member(p->piece_a, p->vertex_a) || !member(p->piece_b, p->vertex_b))
        return false;
      if (piece_distance(B, {p->vertex_a}, {p->vertex_b}) != p->distance)
        return false;
      return p->distance < W.d;
    }
    case WitnessKind::TriplePoint: {
      const auto* p = std::get_if<TriplePointPayload>(&W.payload);
      if (p == nullptr || p->vertex >= B.size()) return false;
      if (B.key(p->vertex) != p->element) return false;
      const std::set<std::size_t> ids(p->pieces.begin(), p->pieces.end());
      if (ids.size() != p->pieces.size() || ids.size() != 3) return false;
      for (const std::size_t piece : ids)
        if (!member(piece, p->vertex)) return false;
      return true;
    }
    case WitnessKind::SinglePieceForced: {
      const auto* p = std::get_if<SinglePiecePayload>(&W.payload);
      if (p == nullptr || n != 1 || p->piece != 0) return false;
      if (piece_diameter(B, C.pieces[0]) != p->diameter) return false;
      return p->diameter >= B.radius();
    }
  }
  return false;
}

RefutationWitness zero_dim_refute(const Ball& B, const Cover& partition,
                                  int d) {
  if (partition.ball != &B)
    throw InvalidParameter(
        "zero_dim_refute: cover was built on a different ball");
  if (d < 2)
    throw InvalidParameter("zero_dim_refute: need scale d >= 2");
  for (const int c : partition.classes)
    if (c != partition.classes.front())
      throw InvalidParameter(
          "zero_dim_refute: all pieces must carry one class");

  RefutationWitness w;
  w.d = d;
  w.trace.push_back("claim: one class of pieces pairwise >= " +
                    std::to_string(d) + " apart covers the window");
  w.trace.push_back("pieces: " + std::to_string(partition.pieces.size()));

  if (partition.pieces.size() == 1) {
    SinglePiecePayload payload;
    payload.piece = 0;
    payload.diameter = piece_diameter(B, partition.pieces[0]);
    w.kind = WitnessKind::SinglePieceForced;
    w.payload = payload;
    w.trace.push_back("single piece forced: its diameter " +
                      std::to_string(payload.diameter) +
                      " grows with the window radius " +
                      std::to_string(B.radius()));
  } else {
    // smallest piece containing each vertex; a second owner is an overlap
    std::vector<std::size_t> owner(B.size(), npos);
    std::optional<ProximityPairPayload> hit;
    for (std::size_t p = 0; p < partition.pieces.size() && !hit; ++p)
      for (const std::size_t v : partition.pieces[p]) {
        if (owner[v] == npos) {
          owner[v] = p;
        } else {
          ProximityPairPayload payload;
          payload.piece_a = owner[v];
          payload.piece_b = p;
          payload.vertex_a = v;
          payload.vertex_b = v;
          payload.distance = 0;
          hit = payload;
          break;
        }
      }
    if (!hit) {
      for (std::size_t v = 0; v < B.size() && !hit; ++v)
        for (const BallEdge& e : B.neighbors(v))
          if (owner[e.to] != owner[v]) {
            ProximityPairPayload payload;
            payload.piece_a = owner[v];
            payload.piece_b = owner[e.to];
            payload.vertex_a = v;
            payload.vertex_b = e.to;
            payload.distance = 1;
            hit = payload;
            break;
          }
    }
    if (!hit)
      throw InternalError(
          "zero_dim_refute: connected window admitted no crossing edge");
    w.kind = WitnessKind::ProximityPair;
    w.payload = *hit;
    w.trace.push_back("pieces " + std::to_string(hit->piece_a) + " and " +
                      std::to_string(hit->piece_b) + " meet at distance " +
                      std::to_string(hit->distance) + " < " +
                      std::to_string(d));
  }

  if (!verify_witness(partition, w))
    throw InternalError("zero_dim_refute: witness failed re-verification");
  return w;
}

TestLoop build_test_loop(const GroupModel& M, const Ball& B, std::size_t x0,
                         int n, int N_used, const SearchBudget& budget) {
  if (&B.model() != &M)
    throw InvalidParameter(
        "build_test_loop: ball was built on a different model");
  if (x0 >= B.size())
    throw InvalidParameter("build_test_loop: x0 lies outside the window");
  if (N_used < 1 || n <= N_used)
    throw InvalidParameter("build_test_loop: need n > N_used >= 1");

  TestLoop out;
  out.x0 = x0;
  out.n = n;
  out.N_used = N_used;

  const auto witness = bi_infinite_witness(M, n, budget);
  if (!witness)
    throw NoAvoidingPath("no length-" + std::to_string(2 * n) +
                         " geodesic segment exists in this model");
  out.witness = *witness;

  const Elem base = B.key(x0);
  out.segment.reserve(out.witness.points.size());
  for (const Elem& p : out.witness.points) {
    const auto idx = B.index_of(M.multiply(base, p));
    if (!idx)
      throw BudgetExceeded(
          "translated geodesic segment leaves the window; a larger ball "
          "radius is needed",
          static_cast<long long>(B.radius()) + n);
    out.segment.push_back(*idx);
  }
  out.x = out.segment.front();
  out.y = out.segment.back();
  out.trace.push_back("geodesic segment of length " + std::to_string(2 * n) +
                      " through the base vertex");

  const auto path = avoiding_path(B, out.x, out.y, x0, N_used);
  if (!path)
    throw NoAvoidingPath("B(x0, " + std::to_string(N_used) +
                         ") separates the segment endpoints in this window");
  out.avoiding = *path;
  out.trace.push_back("avoiding path of length " +
                      std::to_string(path->labels.size()) +
                      " stays outside B(x0, " + std::to_string(N_used) + ")");

  std::vector<int> letters = out.witness.labels.letters();
  for (auto it = out.avoiding.labels.rbegin(); it != out.avoiding.labels.rend();
       ++it)
    letters.push_back(-*it);
  out.word = Word(std::move(letters));
  out.geodesic_prefix = static_cast<std::size_t>(2 * n);
  if (evaluate_word(M, out.word) != M.identity())
    throw InternalError("build_test_loop: assembled loop fails to close");
  out.trace.push_back("loop length " + std::to_string(out.word.size()) +
                      " (geodesic prefix " +
                      std::to_string(out.geodesic_prefix) + ")");
  return out;
}

namespace {

/// Outer-face dart cycle rotated to start at the base dart, so position i
/// carries the i-th boundary letter and leaves the i-th boundary vertex.
std::vector<std::size_t> boundary_cycle(const Diagram& D) {
  const auto& orbit = D.faces().at(D.outer_face());
  const auto it = std::find(orbit.begin(), orbit.end(), D.base_dart());
  if (it == orbit.end())
    throw InternalError("boundary walk: base dart missing from outer face");
  std::vector<std::size_t> cycle(it, orbit.end());
  cycle.insert(cycle.end(), orbit.begin(), it);
  return cycle;
}

struct FaceInfo {
  std::vector<std::size_t> verts;        // diagram vertices, sorted unique
  bool mapped = false;                   // all vertices land in the window
  std::vector<std::size_t> full_pieces;  // pieces containing every vertex
};

struct ComponentPick {
  std::vector<std::size_t> faces;  // sorted
  int a = 0;
  int b = 0;
  int span() const { return b - a; }
};

}  // namespace

RefutationOutcome find_violation(const Presentation& P, const GroupModel& M,
                                 const Ball& B, const Cover& C,
                                 const RefuteParams& params) {
  if (&B.model() != &M)
    throw InvalidParameter(
        "find_violation: ball was built on a different model");
  if (C.ball != &B)
    throw InvalidParameter(
        "find_violation: cover was built on a different ball");
  if (params.d_used < 1)
    throw InvalidParameter("find_violation: need d_used >= 1");
  if (params.N_used < 1 || params.n <= params.N_used)
    throw InvalidParameter("find_violation: need n > N_used >= 1");

  const GroupModel& G = B.model();
  std::vector<std::string> trace;
  trace.push_back("window: " + std::to_string(B.size()) +
                  " vertices at radius " + std::to_string(B.radius()) +
                  "; d_used=" + std::to_string(params.d_used) + ", N_used=" +
                  std::to_string(params.N_used) + ", n=" +
                  std::to_string(params.n));

  auto inconclusive = [&trace](int stepno, std::string step,
                               std::string diagnostics) {
    trace.push_back("step " + std::to_string(stepno) +
                    ": inconclusive: " + step);
    Inconclusive inc;
    inc.step = std::move(step);
    inc.diagnostics = std::move(diagnostics);
    inc.trace = trace;
    return RefutationOutcome(std::move(inc));
  };
  auto refuted = [&trace, &C](int stepno, RefutationWitness w,
                              const std::string& what) {
    trace.push_back("step " + std::to_string(stepno) + ": refuted: " + what);
    w.trace = trace;
    if (!verify_witness(C, w))
      throw InternalError("find_violation: witness failed re-verification");
    return RefutationOutcome(std::move(w));
  };

  const std::vector<std::vector<std::size_t>> pieces_at =
      pieces_at_vertex(C, B.size());

  // step 1: a vertex whose d-ball meets three pieces kills multiplicity <= 2
  {
    std::size_t max_seen = 0;
    std::optional<MultiplicityBallPayload> hit;
    for (std::size_t x = 0; x < B.size() && !hit; ++x) {
      const Elem inv = G.invert(B.key(x));
      std::vector<std::size_t> meeting;
      for (std::size_t p = 0; p < C.pieces.size(); ++p)
        for (const std::size_t v : C.pieces[p])
          if (G.exact_length(G.multiply(inv, B.key(v))) <= params.d_used) {
            meeting.push_back(p);
            break;
          }
      max_seen = std::max(max_seen, meeting.size());
      if (meeting.size() >= 3) hit = MultiplicityBallPayload{x, meeting};
    }
    if (hit) {
      trace.push_back("step 1: multiplicity scan at d=" +
                      std::to_string(params.d_used) + ": vertex " +
                      std::to_string(hit->center) + " meets pieces {" +
                      join_ids(hit->pieces) + "}");
      RefutationWitness w;
      w.kind = WitnessKind::MultiplicityBall;
      w.d = params.d_used;
      w.payload = *hit;
      return refuted(1, std::move(w),
                     "multiplicity " + std::to_string(hit->pieces.size()) +
                         " exceeds 2");
    }
    trace.push_back("step 1: multiplicity scan at d=" +
                    std::to_string(params.d_used) + ": max " +
                    std::to_string(max_seen) + ", claim holds");
  }

  // step 2: same-class pieces closer than d violate the separation claim
  {
    const CheckReport report =
        check_definition1(C, params.d_used, std::numeric_limits<int>::max());
    if (report.violation &&
        report.violation->kind == CoverViolation::Kind::TooClose) {
      const CoverViolation& v = *report.violation;
      trace.push_back(
          "step 2: same-class proximity scan: pieces " +
          std::to_string(v.piece_a) + " and " + std::to_string(v.piece_b) +
          " at distance " + std::to_string(v.distance) + " < " +
          std::to_string(params.d_used));
      RefutationWitness w;
      w.kind = WitnessKind::ProximityPair;
      w.d = params.d_used;
      ProximityPairPayload payload;
      payload.piece_a = v.piece_a;
      payload.piece_b = v.piece_b;
      payload.vertex_a = v.vertex_a;
      payload.vertex_b = v.vertex_b;
      payload.distance = v.distance;
      w.payload = payload;
      return refuted(2, std::move(w), "pieces in one class sit too close");
    }
    trace.push_back("step 2: same-class proximity scan at d=" +
                    std::to_string(params.d_used) + ": claim holds");
  }

  // step 3: every relator loop inside the window must lie in one piece;
  // the main argument silently assumes this reduction
  if (P.relators().empty()) {
    trace.push_back("step 3: relator containment: no relators to check");
  } else {
    std::size_t checked = 0;
    std::size_t clipped = 0;
    for (std::size_t g = 0; g < B.size(); ++g) {
      for (std::size_t ri = 0; ri < P.relators().size(); ++ri) {
        const Word& r = P.relators()[ri];
        std::vector<std::size_t> loop{g};
        Elem cur = B.key(g);
        bool inside = true;
        for (const int letter : r.letters()) {
          cur = G.apply_generator(cur, letter);
          const auto idx = B.index_of(cur);
          if (!idx) {
            inside = false;
            break;
          }
          loop.push_back(*idx);
        }
        if (!inside) {
          ++clipped;
          continue;
        }
        if (cur != B.key(g))
          throw InternalError(
              "find_violation: relator fails to close in the model");
        ++checked;
        std::vector<std::size_t> common = pieces_at[loop[0]];
        for (std::size_t i = 1; i < loop.size() && !common.empty(); ++i) {
          std::vector<std::size_t> next;
          std::set_intersection(common.begin(), common.end(),
                                pieces_at[loop[i]].begin(),
                                pieces_at[loop[i]].end(),
                                std::back_inserter(next));
          common = std::move(next);
        }
        if (common.empty()) {
          trace.push_back("step 3: relator " + std::to_string(ri) +
                          " traced from vertex " + std::to_string(g) +
                          " lies in no single piece");
          return inconclusive(
              3, "WLOG assumption fails",
              "the relator loop at vertex " + B.key(g) +
                  " splits across pieces; the argument needs every relator "
                  "path inside one piece");
        }
      }
    }
    trace.push_back("step 3: relator containment: " + std::to_string(checked) +
                    " loops checked (" + std::to_string(clipped) +
                    " clipped by the window), each inside a piece");
  }

  // step 4: geodesic segment through the base point plus an avoiding path
  TestLoop loop;
  try {
    loop = build_test_loop(G, B, 0, params.n, params.N_used, params.geodesic);
  } catch (const NoAvoidingPath& e) {
    trace.push_back(std::string("step 4: no test loop: ") + e.what());
    return inconclusive(4, "one-ended hypothesis fails (no avoiding path)",
                        e.what());
  }
  for (const std::string& line : loop.trace)
    trace.push_back("step 4: " + line);
  {
    const long long need = 200LL * C.D;
    const bool met = static_cast<long long>(loop.word.size()) > need;
    trace.push_back("step 4: paper checkpoint length(w) > 200*D: " +
                    std::to_string(loop.word.size()) + " vs " +
                    std::to_string(need) + ": " + (met ? "met" : "not met") +
                    " (recorded, not gated)");
  }

  // step 5: fill the loop with a reduced diagram
  std::optional<Diagram> diagram;
  try {
    diagram.emplace(build_diagram(P, G, loop.word, params.diagram));
  } catch (const NonPlanarAssembly& e) {
    trace.push_back(std::string("step 5: filling failed: ") + e.what());
    return inconclusive(5, "diagram filling failed", e.what());
  } catch (const BudgetExceeded& e) {
    trace.push_back(std::string("step 5: filling budget exhausted: ") +
                    e.what());
    return inconclusive(5, "diagram filling failed", e.what());
  }
  const Diagram& D = *diagram;
  trace.push_back("step 5: filled diagram: " +
                  std::to_string(D.vertex_count()) + " vertices, " +
                  std::to_string(D.edge_count()) + " edges, " +
                  std::to_string(D.inner_face_count()) + " cells");
  const DiagramMap fmap = diagram_map(D, G, B.key(loop.x));

  // step 6: pull the cover back through the diagram and walk the frontier
  trace.push_back(
      "step 6: convention: a component qualifies when its boundary trace "
      "interval [a,b] contains the base position; singleton traces give "
      "[a,a]; empty traces are excluded");

  const std::vector<std::size_t> cycle = boundary_cycle(D);
  const std::size_t len = cycle.size();
  if (len != loop.word.size())
    throw InternalError("find_violation: boundary length mismatch");
  std::vector<std::size_t> pos_vertex(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (D.darts()[cycle[i]].label != loop.word.at(i))
      throw InternalError("find_violation: boundary spells the wrong word");
    pos_vertex[i] = D.darts()[cycle[i]].from;
  }
  const int two_n = 2 * params.n;
  const int base_pos = params.n;

  // diagram vertex -> window vertex (npos when the image leaves the ball)
  std::vector<std::size_t> vert_ball(D.vertex_count(), npos);
  for (std::size_t v = 0; v < D.vertex_count(); ++v)
    if (const auto idx = B.index_of(fmap.element[v])) vert_ball[v] = *idx;

  const std::size_t n_faces = D.face_count();
  std::vector<FaceInfo> faces(n_faces);
  for (std::size_t f = 0; f < n_faces; ++f) {
    if (f == D.outer_face()) continue;
    FaceInfo& info = faces[f];
    for (const std::size_t dart : D.faces()[f])
      info.verts.push_back(D.darts()[dart].from);
    std::sort(info.verts.begin(), info.verts.end());
    info.verts.erase(std::unique(info.verts.begin(), info.verts.end()),
                     info.verts.end());
    info.mapped = std::all_of(info.verts.begin(), info.verts.end(),
                              [&](std::size_t v) { return vert_ball[v] != npos; });
    if (!info.mapped) continue;
    info.full_pieces = pieces_at[vert_ball[info.verts[0]]];
    for (std::size_t i = 1; i < info.verts.size() && !info.full_pieces.empty();
         ++i) {
      std::vector<std::size_t> next;
      const auto& other = pieces_at[vert_ball[info.verts[i]]];
      std::set_intersection(info.full_pieces.begin(), info.full_pieces.end(),
                            other.begin(), other.end(),
                            std::back_inserter(next));
      info.full_pieces = std::move(next);
    }
  }

  // face adjacency across shared edges, inner faces only
  std::vector<std::vector<std::size_t>> fadj(n_faces);
  for (std::size_t d = 0; d < D.darts().size(); ++d) {
    const std::size_t f = D.face_of(d);
    const std::size_t g = D.face_of(D.darts()[d].inverse);
    if (f == D.outer_face() || g == D.outer_face() || f == g) continue;
    fadj[f].push_back(g);
  }

  auto components = [&](const std::vector<char>& member) {
    std::vector<std::vector<std::size_t>> comps;
    std::vector<char> seen(n_faces, 0);
    for (std::size_t f = 0; f < n_faces; ++f) {
      if (!member[f] || seen[f]) continue;
      std::vector<std::size_t> comp{f};
      seen[f] = 1;
      for (std::size_t head = 0; head < comp.size(); ++head)
        for (const std::size_t g : fadj[comp[head]])
          if (member[g] && !seen[g]) {
            seen[g] = 1;
            comp.push_back(g);
          }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
    return comps;
  };
  auto trace_interval = [&](const std::vector<std::size_t>& comp)
      -> std::optional<std::pair<int, int>> {
    std::vector<char> on(D.vertex_count(), 0);
    for (const std::size_t f : comp)
      for (const std::size_t v : faces[f].verts) on[v] = 1;
    int a = -1;
    int b = -1;
    for (int i = 0; i <= two_n; ++i)
      if (on[pos_vertex[static_cast<std::size_t>(i)]]) {
        if (a < 0) a = i;
        b = i;
      }
    if (a < 0) return std::nullopt;
    return std::make_pair(a, b);
  };

  // U: pieces with a cell component whose boundary trace spans the base
  std::vector<std::size_t> candidate_pieces;
  for (std::size_t f = 0; f < n_faces; ++f)
    if (f != D.outer_face())
      candidate_pieces.insert(candidate_pieces.end(),
                              faces[f].full_pieces.begin(),
                              faces[f].full_pieces.end());
  std::sort(candidate_pieces.begin(), candidate_pieces.end());
  candidate_pieces.erase(
      std::unique(candidate_pieces.begin(), candidate_pieces.end()),
      candidate_pieces.end());

  std::vector<std::pair<std::size_t, ComponentPick>> U;
  for (const std::size_t p : candidate_pieces) {
    std::vector<char> member(n_faces, 0);
    for (std::size_t f = 0; f < n_faces; ++f)
      member[f] = f != D.outer_face() && has_id(faces[f].full_pieces, p);
    std::optional<ComponentPick> best;
    for (const auto& comp : components(member)) {
      const auto interval = trace_interval(comp);
      if (!interval) continue;
      if (interval->first > base_pos || interval->second < base_pos) continue;
      ComponentPick pick;
      pick.faces = comp;
      pick.a = interval->first;
      pick.b = interval->second;
      if (!best || pick.span() > best->span()) best = std::move(pick);
    }
    if (best) {
      trace.push_back("step 6: C(piece " + std::to_string(p) +
                      "): a component spans the base position, interval [" +
                      std::to_string(best->a) + "," + std::to_string(best->b) +
                      "]");
      U.emplace_back(p, std::move(*best));
    }
  }
  if (U.empty())
    return inconclusive(6, "no piece component spans the base position",
                        "U is empty: no piece admits a cell component whose "
                        "boundary trace contains the base position");
  {
    std::vector<std::size_t> ids;
    for (const auto& [p, pick] : U) ids.push_back(p);
    trace.push_back("step 6: U = {" + join_ids(ids) + "}");
  }

  std::size_t B1 = U.front().first;
  const ComponentPick* pick1 = &U.front().second;
  for (const auto& [p, pick] : U)
    if (pick.span() > pick1->span()) {
      B1 = p;
      pick1 = &pick;
    }
  trace.push_back("step 6: B1 = piece " + std::to_string(B1) +
                  " with interval [" + std::to_string(pick1->a) + "," +
                  std::to_string(pick1->b) + "]");

  if (pick1->a == 0)
    return inconclusive(6, "interval reaches the geodesic endpoint",
                        "the maximal interval starts at position 0, so no "
                        "edge lies beyond it on the geodesic");

  // the boundary edge just beyond the interval and the cell it borders
  const std::size_t beyond_dart = cycle[static_cast<std::size_t>(pick1->a) - 1];
  const std::size_t r_face = D.face_of(D.darts()[beyond_dart].inverse);
  trace.push_back("step 6: edge beyond a1 joins positions " +
                  std::to_string(pick1->a - 1) + "-" +
                  std::to_string(pick1->a));
  if (r_face == D.outer_face())
    return inconclusive(6, "edge beyond a1 borders no cell",
                        "both sides of the edge lie on the outer face");
  std::vector<std::size_t> r_pieces = faces[r_face].full_pieces;
  r_pieces.erase(std::remove(r_pieces.begin(), r_pieces.end(), B1),
                 r_pieces.end());
  if (r_pieces.empty())
    return inconclusive(6, "cell beyond a1 lies in no piece other than B1",
                        "the adjacent cell's vertices share no piece besides "
                        "possibly B1");
  const std::size_t B2 = r_pieces.front();
  const auto u_entry =
      std::find_if(U.begin(), U.end(),
                   [&](const auto& e) { return e.first == B2; });
  if (u_entry == U.end()) {
    trace.push_back("step 6: B2 = piece " + std::to_string(B2) +
                    ", outside U");
    return inconclusive(6, "maximality step: B2 outside U",
                        "the cell beyond a1 lies in piece " +
                            std::to_string(B2) +
                            ", which has no component spanning the base "
                            "position, so d(B1) and d(B2) are incomparable");
  }
  trace.push_back("step 6: B2 = piece " + std::to_string(B2) +
                  ", in U with interval [" +
                  std::to_string(u_entry->second.a) + "," +
                  std::to_string(u_entry->second.b) + "]; d(B2)=" +
                  std::to_string(u_entry->second.span()) +
                  " <= d(B1)=" + std::to_string(pick1->span()));

  // C = cells with every vertex in B1 u B2; K its component at the base
  std::vector<char> in_union(n_faces, 0);
  for (std::size_t f = 0; f < n_faces; ++f) {
    if (f == D.outer_face() || !faces[f].mapped) continue;
    in_union[f] =
        std::all_of(faces[f].verts.begin(), faces[f].verts.end(),
                    [&](std::size_t v) {
                      const auto& ids = pieces_at[vert_ball[v]];
                      return has_id(ids, B1) || has_id(ids, B2);
                    });
  }
  const std::size_t x0_vertex = pos_vertex[static_cast<std::size_t>(base_pos)];
  std::size_t seed = npos;
  for (const std::size_t dart : D.rotation()[x0_vertex]) {
    const std::size_t f = D.face_of(dart);
    if (f != D.outer_face() && in_union[f]) seed = std::min(seed, f);
  }
  if (seed == npos)
    return inconclusive(6, "x0 lies in no cell of C(B1 u B2)",
                        "no cell at the base position has all vertices "
                        "inside B1 u B2");
  std::vector<char> in_K(n_faces, 0);
  {
    std::vector<std::size_t> queue{seed};
    in_K[seed] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (const std::size_t g : fadj[queue[head]])
        if (in_union[g] && !in_K[g]) {
          in_K[g] = 1;
          queue.push_back(g);
        }
    trace.push_back("step 6: K = component of C(B1 u B2) at the base, " +
                    std::to_string(queue.size()) + " cells");
  }

  // the paper needs C clear of the avoiding path and of the whole diagram
  std::vector<char> k_vertex(D.vertex_count(), 0);
  for (std::size_t f = 0; f < n_faces; ++f)
    if (in_K[f])
      for (const std::size_t v : faces[f].verts) k_vertex[v] = 1;
  for (std::size_t pos = 0; pos < len; ++pos) {
    if (pos != 0 && pos < static_cast<std::size_t>(two_n)) continue;
    if (k_vertex[pos_vertex[pos]]) {
      trace.push_back("step 6: K touches the avoiding path at position " +
                      std::to_string(pos));
      return inconclusive(6, "C reaches the avoiding path",
                          "a cell of K has a vertex on the avoiding path at "
                          "boundary position " +
                              std::to_string(pos) +
                              "; the separation d(x0, p) >= N fails at desk "
                              "scale");
    }
  }
  {
    std::size_t k_count = 0;
    std::size_t inner = 0;
    for (std::size_t f = 0; f < n_faces; ++f) {
      if (f == D.outer_face()) continue;
      ++inner;
      if (in_K[f]) ++k_count;
    }
    if (k_count == inner)
      return inconclusive(6, "the whole diagram lies in C(B1 u B2)",
                          "K exhausts every cell, leaving no frontier");
  }

  // frontier of K: edges with exactly one side in K
  struct FrontierEdge {
    std::size_t kface = 0;
    bool b1 = false;
    bool b2 = false;
  };
  std::vector<FrontierEdge> frontier;
  std::vector<std::vector<std::size_t>> incident(D.vertex_count());
  std::size_t b1_side = 0;
  std::size_t b2_side = 0;
  std::size_t straddling = 0;
  for (std::size_t d = 0; d < D.darts().size(); ++d) {
    if (D.darts()[d].inverse < d) continue;  // one dart per edge
    const std::size_t f = D.face_of(d);
    const std::size_t g = D.face_of(D.darts()[d].inverse);
    const bool fk = f != D.outer_face() && in_K[f];
    const bool gk = g != D.outer_face() && in_K[g];
    if (fk == gk) continue;
    FrontierEdge e;
    e.kface = fk ? f : g;
    e.b1 = has_id(faces[e.kface].full_pieces, B1);
    e.b2 = has_id(faces[e.kface].full_pieces, B2);
    if (e.b1) ++b1_side;
    if (e.b2) ++b2_side;
    if (!e.b1 && !e.b2) ++straddling;
    const std::size_t id = frontier.size();
    frontier.push_back(e);
    incident[D.darts()[d].from].push_back(id);
    incident[D.to(d)].push_back(id);
  }
  trace.push_back("step 6: frontier of K: " + std::to_string(frontier.size()) +
                  " edges (B1-side " + std::to_string(b1_side) +
                  ", B2-side " + std::to_string(b2_side) + ", straddling " +
                  std::to_string(straddling) + ")");

  // a vertex joining a B1-side edge to a B2-side edge, with a third cell
  // outside C, is a triple point
  for (std::size_t v = 0; v < D.vertex_count(); ++v) {
    const auto& edges = incident[v];
    bool found = false;
    for (std::size_t i = 0; i < edges.size() && !found; ++i)
      for (std::size_t j = 0; j < edges.size() && !found; ++j)
        found = i != j && frontier[edges[i]].b1 && frontier[edges[j]].b2;
    if (!found) continue;
    for (const std::size_t dart : D.rotation()[v]) {
      const std::size_t c = D.face_of(dart);
      if (c == D.outer_face() || in_union[c]) continue;
      if (faces[c].full_pieces.empty()) continue;
      const std::size_t B3 = faces[c].full_pieces.front();
      // a cell outside C(B1 u B2) cannot lie wholly in B1 or B2
      TriplePointPayload payload;
      payload.vertex = vert_ball[v];
      payload.element = B.key(payload.vertex);
      payload.pieces = {B1, B2, B3};
      std::sort(payload.pieces.begin(), payload.pieces.end());
      RefutationWitness w;
      w.kind = WitnessKind::TriplePoint;
      w.d = params.d_used;
      w.payload = payload;
      trace.push_back("step 6: triple point at diagram vertex " +
                      std::to_string(v) + " -> window vertex " +
                      std::to_string(payload.vertex) + ", pieces {" +
                      join_ids(payload.pieces) + "}");
      return refuted(6, std::move(w),
                     "three pieces share the frontier corner");
    }
  }
  return inconclusive(6, "frontier scan finds no adjacent mixed pair",
                      "no vertex joins a B1-side frontier edge, a B2-side "
                      "frontier edge, and a cell outside C(B1 u B2)");
}

}  // namespace coarse

#include "coarselab/covers.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>

#include "coarselab/errors.hpp"
#include "json.hpp"

namespace coarse {

namespace {

long long floor_div(long long a, long long b) {
  const long long q = a / b, r = a % b;
  return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

int parity(long long k) { return static_cast<int>(((k % 2) + 2) % 2); }

const Ball& ball_of(const Cover& C) {
  if (!C.ball) throw InvalidParameter("cover has no ball attached");
  return *C.ball;
}

// Nodes ordered by degree (descending), ties by id: shared by the greedy
// and branch-and-bound colorings so both are deterministic.
std::vector<std::size_t> coloring_order(const ProximityGraph& g) {
  std::vector<std::size_t> order(g.nodes);
  for (std::size_t i = 0; i < g.nodes; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return g.adjacency[a].size() > g.adjacency[b].size();
  });
  return order;
}

bool k_colorable(const ProximityGraph& g, const std::vector<std::size_t>& order,
                 std::size_t k, std::vector<int>& colors) {
  std::fill(colors.begin(), colors.end(), -1);
  // Backtracking with the usual symmetry break: a node may open at most one
  // fresh color beyond those already in use.
  std::vector<std::size_t> used_cap(order.size() + 1, 0);
  std::size_t pos = 0;
  std::vector<int> next_try(order.size(), 0);
  while (true) {
    if (pos == order.size()) return true;
    const std::size_t v = order[pos];
    const std::size_t cap = std::min(k, used_cap[pos] + 1);
    int c = next_try[pos];
    for (; c < static_cast<int>(cap); ++c) {
      bool ok = true;
      for (const std::size_t w : g.adjacency[v])
        if (colors[w] == c) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    if (c < static_cast<int>(cap)) {
      colors[v] = c;
      next_try[pos] = c + 1;
      used_cap[pos + 1] =
          std::max(used_cap[pos], static_cast<std::size_t>(c) + 1);
      ++pos;
      if (pos < order.size()) next_try[pos] = 0;
    } else {
      if (pos == 0) return false;
      colors[v] = -1;
      --pos;
      colors[order[pos]] = -1;
    }
  }
}

std::vector<int> greedy_coloring(const ProximityGraph& g, std::size_t& count) {
  std::vector<int> colors(g.nodes, -1);
  count = 0;
  for (const std::size_t v : coloring_order(g)) {
    std::vector<char> taken(g.nodes + 1, 0);
    for (const std::size_t w : g.adjacency[v])
      if (colors[w] >= 0) taken[colors[w]] = 1;
    int c = 0;
    while (taken[c]) ++c;
    colors[v] = c;
    count = std::max(count, static_cast<std::size_t>(c) + 1);
  }
  return colors;
}

}  // namespace

Cover make_cover(const Ball& B, std::vector<std::vector<std::size_t>> pieces,
                 std::vector<int> classes, int d, int D) {
  if (pieces.empty()) throw InvalidParameter("cover needs at least one piece");
  if (classes.size() != pieces.size())
    throw InvalidParameter("cover needs one class label per piece");
  std::vector<char> covered(B.size(), 0);
  for (std::vector<std::size_t>& piece : pieces) {
    std::sort(piece.begin(), piece.end());
    piece.erase(std::unique(piece.begin(), piece.end()), piece.end());
    if (piece.empty()) throw InvalidParameter("cover contains an empty piece");
    if (piece.back() >= B.size())
      throw InvalidParameter("cover piece points outside the ball");
    for (const std::size_t v : piece) covered[v] = 1;
  }
  for (std::size_t v = 0; v < B.size(); ++v)
    if (!covered[v]) throw InvalidParameter("cover misses a ball vertex");
  for (const int c : classes)
    if (c < 0) throw InvalidParameter("cover class labels must be >= 0");
  return Cover{&B, std::move(pieces), std::move(classes), d, D};
}

long long piece_distance(const Ball& B, const std::vector<std::size_t>& a,
                         const std::vector<std::size_t>& b) {
  const GroupModel& G = B.model();
  long long best = std::numeric_limits<long long>::max();
  for (const std::size_t i : a) {
    const Elem inv = G.invert(B.key(i));
    for (const std::size_t j : b)
      best = std::min(best, G.exact_length(G.multiply(inv, B.key(j))));
  }
  return best;
}

long long piece_diameter(const Ball& B, const std::vector<std::size_t>& piece) {
  const GroupModel& G = B.model();
  long long worst = 0;
  for (std::size_t i = 0; i < piece.size(); ++i) {
    const Elem inv = G.invert(B.key(piece[i]));
    for (std::size_t j = i + 1; j < piece.size(); ++j)
      worst =
          std::max(worst, G.exact_length(G.multiply(inv, B.key(piece[j]))));
  }
  return worst;
}

CheckReport check_definition1(const Cover& C, int d, int D) {
  const Ball& B = ball_of(C);
  const GroupModel& G = B.model();
  CheckReport report;

  for (std::size_t p = 0; p < C.pieces.size(); ++p) {
    const std::vector<std::size_t>& piece = C.pieces[p];
    for (std::size_t i = 0; i < piece.size(); ++i) {
      const Elem inv = G.invert(B.key(piece[i]));
      for (std::size_t j = i + 1; j < piece.size(); ++j) {
        const long long dist = G.exact_length(G.multiply(inv, B.key(piece[j])));
        report.realized_diameter = std::max(report.realized_diameter, dist);
        if (dist > D && !report.violation)
          report.violation = CoverViolation{CoverViolation::Kind::Oversized,
                                            p,    p,   piece[i],
                                            piece[j],  dist};
      }
    }
  }

  if (!report.violation) {
    for (std::size_t p = 0; p < C.pieces.size() && !report.violation; ++p)
      for (std::size_t q = p + 1; q < C.pieces.size() && !report.violation; ++q) {
        if (C.classes[p] != C.classes[q]) continue;
        for (const std::size_t i : C.pieces[p]) {
          const Elem inv = G.invert(B.key(i));
          for (const std::size_t j : C.pieces[q]) {
            const long long dist = G.exact_length(G.multiply(inv, B.key(j)));
            if (dist < d) {
              report.violation = CoverViolation{
                  CoverViolation::Kind::TooClose, p, q, i, j, dist};
              break;
            }
          }
          if (report.violation) break;
        }
      }
  }

  report.pass = !report.violation;
  return report;
}

MultiplicityReport multiplicity(const Cover& C, int d) {
  if (d < 0) throw InvalidParameter("multiplicity scale must be >= 0");
  const Ball& B = ball_of(C);
  const GroupModel& G = B.model();

  MultiplicityReport report;
  report.d = d;
  for (std::size_t x = 0; x < B.size(); ++x) {
    const Elem inv = G.invert(B.key(x));
    std::vector<std::size_t> meeting;
    for (std::size_t p = 0; p < C.pieces.size(); ++p) {
      for (const std::size_t v : C.pieces[p]) {
        if (G.exact_length(G.multiply(inv, B.key(v))) <= d) {
          meeting.push_back(p);
          break;
        }
      }
    }
    if (meeting.size() > report.multiplicity) {
      report.multiplicity = meeting.size();
      report.argmax_vertex = x;
      report.meeting_pieces = std::move(meeting);
    }
  }
  return report;
}

ProximityGraph proximity_graph(const Cover& C, int d) {
  const Ball& B = ball_of(C);
  ProximityGraph g;
  g.nodes = C.pieces.size();
  g.adjacency.resize(g.nodes);
  for (std::size_t p = 0; p < g.nodes; ++p)
    for (std::size_t q = p + 1; q < g.nodes; ++q)
      if (piece_distance(B, C.pieces[p], C.pieces[q]) < d) {
        g.adjacency[p].push_back(q);
        g.adjacency[q].push_back(p);
        g.edges.emplace_back(p, q);
      }
  for (std::vector<std::size_t>& row : g.adjacency)
    std::sort(row.begin(), row.end());
  return g;
}

ColoringReport proximity_color(const Cover& C, int d, std::size_t exact_limit) {
  ColoringReport report;
  report.graph = proximity_graph(C, d);
  const ProximityGraph& g = report.graph;

  std::vector<int> colors;
  if (g.nodes <= exact_limit) {
    report.exact = true;
    const std::vector<std::size_t> order = coloring_order(g);
    colors.assign(g.nodes, 0);
    for (std::size_t k = 1; k <= g.nodes; ++k)
      if (k_colorable(g, order, k, colors)) {
        report.color_count = k;
        break;
      }
  } else {
    colors = greedy_coloring(g, report.color_count);
  }

  report.recolored = Cover{C.ball, C.pieces, std::move(colors), d, C.D};
  return report;
}

Cover net_partition(const Ball& B, int D) {
  if (D < 1) throw InvalidParameter("net partition needs D >= 1");
  const GroupModel& G = B.model();

  std::vector<std::size_t> net;
  std::vector<Elem> net_inverses;
  for (std::size_t v = 0; v < B.size(); ++v) {
    bool separated = true;
    for (const Elem& inv : net_inverses)
      if (2 * G.exact_length(G.multiply(inv, B.key(v))) <= D) {
        separated = false;
        break;
      }
    if (separated) {
      net.push_back(v);
      net_inverses.push_back(G.invert(B.key(v)));
    }
  }

  std::vector<std::vector<std::size_t>> cells(net.size());
  for (std::size_t v = 0; v < B.size(); ++v) {
    const Elem inv = G.invert(B.key(v));
    std::size_t best = 0;
    long long best_dist = std::numeric_limits<long long>::max();
    for (std::size_t i = 0; i < net.size(); ++i) {
      const long long dist = G.exact_length(G.multiply(inv, B.key(net[i])));
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    cells[best].push_back(v);
  }
  // Every net point claims itself, so no cell is empty.
  return make_cover(B, std::move(cells), std::vector<int>(net.size(), 0), 0, D);
}

AsdimEstimate asdim_at_scale(const Ball& B, int d, int D,
                             std::size_t exact_limit) {
  if (d < 1) throw InvalidParameter("asdim estimate needs scale d >= 1");
  const Cover partition = net_partition(B, D);
  ColoringReport coloring = proximity_color(partition, d, exact_limit);

  AsdimEstimate estimate;
  estimate.n = coloring.color_count - 1;
  estimate.cover = std::move(coloring.recolored);
  for (const std::vector<std::size_t>& piece : estimate.cover.pieces)
    estimate.realized_diameter =
        std::max(estimate.realized_diameter, piece_diameter(B, piece));
  estimate.exact_coloring = coloring.exact;
  estimate.scale_warning = D < d;
  return estimate;
}

Cover make_interval_cover_Z(const Ball& B, int L) {
  if (L < 1) throw InvalidParameter("interval cover needs L >= 1");
  if (B.model().descriptor() != "z")
    throw InvalidParameter("interval cover wants the model z");

  std::map<long long, std::vector<std::size_t>> by_interval;
  for (std::size_t v = 0; v < B.size(); ++v)
    by_interval[floor_div(parse_vector_key(B.key(v))[0], L)].push_back(v);

  std::vector<std::vector<std::size_t>> pieces;
  std::vector<int> classes;
  for (auto& [k, members] : by_interval) {
    pieces.push_back(std::move(members));
    classes.push_back(parity(k));
  }
  return make_cover(B, std::move(pieces), std::move(classes), L, L);
}

Cover make_brick_cover_Z2(const Ball& B, int L) {
  if (L < 2 || L % 2 != 0)
    throw InvalidParameter("brick cover needs even L >= 2");
  if (B.model().descriptor() != "z^2")
    throw InvalidParameter("brick cover wants the model z^2");

  std::map<std::pair<long long, long long>, std::vector<std::size_t>> bricks;
  for (std::size_t v = 0; v < B.size(); ++v) {
    const std::vector<long long> xy = parse_vector_key(B.key(v));
    const long long row = floor_div(xy[1], L);
    const long long offset = parity(row) ? L / 2 : 0;
    bricks[{row, floor_div(xy[0] - offset, L)}].push_back(v);
  }

  std::vector<std::vector<std::size_t>> pieces;
  std::vector<int> classes;
  for (auto& [rc, members] : bricks) {
    pieces.push_back(std::move(members));
    classes.push_back(2 * parity(rc.first) + parity(rc.second));
  }
  return make_cover(B, std::move(pieces), std::move(classes), L, 2 * L);
}

Cover make_lamplighter_cover(const Ball& B, int L, int d) {
  if (d < 1 || L < d)
    throw InvalidParameter("lamplighter cover needs L >= d >= 1");
  if (B.model().descriptor() != "lamplighter")
    throw InvalidParameter("lamplighter cover wants the lamplighter model");

  // Pieces are numbered by first occurrence in vertex-index order.
  std::map<std::pair<long long, std::vector<long long>>, std::size_t> ids;
  std::vector<std::vector<std::size_t>> pieces;
  std::vector<int> classes;
  for (std::size_t v = 0; v < B.size(); ++v) {
    const LamplighterElement el = parse_lamplighter_key(B.key(v));
    const long long k = floor_div(el.cursor, L);
    const long long lo = k * L - d;
    const long long hi = (k + 1) * L - 1 + d;
    std::vector<long long> outside;
    for (const long long lamp : el.lamps)
      if (lamp < lo || lamp > hi) outside.push_back(lamp);
    const auto [it, fresh] =
        ids.emplace(std::make_pair(k, std::move(outside)), pieces.size());
    if (fresh) {
      pieces.emplace_back();
      classes.push_back(parity(k));
    }
    pieces[it->second].push_back(v);
  }
  return make_cover(B, std::move(pieces), std::move(classes), d, 3 * L + 4 * d);
}

PathCoverReport pieces_meeting_path(const Cover& C, const PathInBall& p) {
  const Ball& B = ball_of(C);
  if (p.vertices.empty()) throw EmptyPath("pieces_meeting_path");
  for (const std::size_t v : p.vertices)
    if (v >= B.size())
      throw InvalidParameter("path leaves the cover's ball");

  PathCoverReport report;
  for (std::size_t id = 0; id < C.pieces.size(); ++id) {
    const std::vector<std::size_t>& piece = C.pieces[id];
    for (const std::size_t v : p.vertices)
      if (std::binary_search(piece.begin(), piece.end(), v)) {
        report.piece_ids.push_back(id);
        break;
      }
  }
  if (p.geodesic) {
    const std::size_t len = p.labels.size();
    const std::size_t block = static_cast<std::size_t>(C.D) + 1;
    report.pigeonhole_lower_bound = (len + 1 + block - 1) / block;
  }
  return report;
}

void save_cover(const Cover& C, const std::filesystem::path& path) {
  const Ball& B = ball_of(C);
  nlohmann::json j;
  j["format_version"] = 1;
  j["ball"] = ball_cache_name(B.model(), B.radius());
  j["d"] = C.d;
  j["D"] = C.D;
  j["classes"] = C.classes;
  j["pieces"] = C.pieces;

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

Cover load_cover(const Ball& B, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("format_version").get<int>() != 1)
      throw IoError("unsupported cover file version");
    if (j.at("ball").get<std::string>() != ball_cache_name(B.model(), B.radius()))
      throw IoError("cover file belongs to a different ball");
    return make_cover(B, j.at("pieces").get<std::vector<std::vector<std::size_t>>>(),
                      j.at("classes").get<std::vector<int>>(),
                      j.at("d").get<int>(), j.at("D").get<int>());
  } catch (const IoError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw IoError("cover file is inconsistent: " + std::string(e.what()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("cover file is malformed: " + std::string(e.what()));
  }
}

}  // namespace coarse

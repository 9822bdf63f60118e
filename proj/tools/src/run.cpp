#include "coarselab_cli/run.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coarselab/cayley.hpp"
#include "coarselab/covers.hpp"
#include "coarselab/ends.hpp"
#include "coarselab/errors.hpp"
#include "coarselab/geodesics.hpp"
#include "coarselab/models.hpp"
#include "coarselab/presentation.hpp"
#include "coarselab/refuter.hpp"
#include "coarselab/vankampen.hpp"

namespace coarse::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- config --

/// Flat config grammar: one `key = value` per line, keys are long option
/// names without the dashes, `#` starts a comment, blank lines ignored.
std::map<std::string, std::string> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw IoError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

/// Append config-derived options for keys the command line does not set;
/// explicit flags always win. Boolean values toggle flag-style options.
void inject_config(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  auto given = [&args](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  for (const auto& [key, value] : read_flat_config(path)) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value == "true" || value == "yes" || value == "on") {
      args.push_back(flag);
    } else if (value == "false" || value == "no" || value == "off") {
      // absent flag: nothing to do
    } else {
      args.push_back(flag);
      args.push_back(value);
    }
  }
}

// ------------------------------------------------------------- emission ---

std::string config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream o(tmp, std::ios::binary);
    if (!o) throw IoError("cannot write " + tmp.string());
    o << content;
    o.flush();
    if (!o) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

/// Stamp the configuration hash after the first line of an SVG.
std::string stamp_svg(std::string svg, const std::string& hash) {
  const std::string comment = "<!-- config-hash: " + hash + " -->\n";
  const auto pos = svg.find('\n');
  if (pos == std::string::npos) return comment + svg;
  svg.insert(pos + 1, comment);
  return svg;
}

/// Collects artifacts for one run; everything lands under `dir` (when set),
/// and finish() echoes the effective configuration next to them.
struct Emitter {
  fs::path dir;
  bool enabled = false;
  std::string cfg_text;
  std::string hash;
  std::vector<std::string> written;

  Emitter(const std::string& out_dir, std::string config_text)
      : dir(out_dir), enabled(!out_dir.empty()),
        cfg_text(std::move(config_text)), hash(config_hash(cfg_text)) {}

  void text(const std::string& name, const std::string& content) {
    if (!enabled) return;
    atomic_write(dir / name, content);
    written.push_back(name);
  }
  void svg(const std::string& name, const std::string& content) {
    text(name, stamp_svg(content, hash));
  }
  /// For module savers that write a whole file themselves.
  template <class F>
  void via(const std::string& name, F&& writer) {
    if (!enabled) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path tmp = dir / (name + ".tmp");
    writer(tmp);
    fs::rename(tmp, dir / name, ec);
    if (ec)
      throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
    written.push_back(name);
  }
  void finish() {
    if (enabled) text("effective-config.txt", cfg_text);
  }
};

// ----------------------------------------------------------------- plots --

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Fixed-layout line plot: 640x400 canvas, axes with five ticks, one
/// polyline with point markers. Deterministic to the byte for fixed input.
std::string plot_svg(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel,
                     const std::vector<std::pair<double, double>>& pts) {
  const double W = 640, H = 400, L = 70, R = 610, T = 48, B = 348;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!pts.empty()) {
    xmin = xmax = pts.front().first;
    ymax = pts.front().second;
    ymin = 0;
    for (const auto& [x, y] : pts) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
      ymin = std::min(ymin, y);
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
  }
  auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (R - L); };
  auto sy = [&](double y) { return B - (y - ymin) / (ymax - ymin) * (B - T); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
       "height=\"400\" viewBox=\"0 0 640 400\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n"
    << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"monospace\" font-size=\"16\">"
    << title << "</text>\n"
    << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(B) << "\" x2=\""
    << fmt2(R) << "\" y2=\"" << fmt2(B)
    << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
    << "<line x1=\"" << fmt2(L) << "\" y1=\"" << fmt2(B) << "\" x2=\""
    << fmt2(L) << "\" y2=\"" << fmt2(T)
    << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
    << "<text x=\"" << fmt2((L + R) / 2) << "\" y=\"388\" "
       "text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\">"
    << xlabel << "</text>\n"
    << "<text x=\"16\" y=\"" << fmt2((T + B) / 2)
    << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"12\" "
       "transform=\"rotate(-90 16 "
    << fmt2((T + B) / 2) << ")\">" << ylabel << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    o << "<line x1=\"" << fmt2(sx(fx)) << "\" y1=\"" << fmt2(B) << "\" x2=\""
      << fmt2(sx(fx)) << "\" y2=\"" << fmt2(B + 5)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << fmt2(sx(fx)) << "\" y=\"" << fmt2(B + 18)
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
         "font-size=\"10\">"
      << fmt_tick(fx) << "</text>\n"
      << "<line x1=\"" << fmt2(L - 5) << "\" y1=\"" << fmt2(sy(fy))
      << "\" x2=\"" << fmt2(L) << "\" y2=\"" << fmt2(sy(fy))
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
      << "<text x=\"" << fmt2(L - 8) << "\" y=\"" << fmt2(sy(fy) + 3)
      << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"10\">"
      << fmt_tick(fy) << "</text>\n";
  }
  if (!pts.empty()) {
    o << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      o << (i ? " " : "") << fmt2(sx(pts[i].first)) << ","
        << fmt2(sy(pts[i].second));
    o << "\"/>\n";
    for (const auto& [x, y] : pts)
      o << "<circle cx=\"" << fmt2(sx(x)) << "\" cy=\"" << fmt2(sy(y))
        << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---------------------------------------------------------------- shared --

struct Shared {
  std::string model;
  int radius = 0;
  int d = 0;
  int D = 0;
  std::size_t budget_vertices = BallBudget{}.max_vertices;
  std::string cache_dir;
  std::string out;
  long long seed = 0;
  std::string config;
};

void add_shared(CLI::App* c, Shared& s, bool need_model) {
  auto* m = c->add_option(
      "--model", s.model,
      "model descriptor: z | z^k | free:k | lamplighter | dihedral_inf | "
      "cyclic:n | presentation:<...>");
  if (need_model) m->required();
  c->add_option("--radius", s.radius, "ball radius");
  c->add_option("--d", s.d, "scale d");
  c->add_option("--D", s.D, "diameter bound D");
  c->add_option("--budget-vertices", s.budget_vertices, "ball vertex cap");
  c->add_option("--cache-dir", s.cache_dir, "ball cache directory");
  c->add_option("--out", s.out, "output directory for artifacts");
  c->add_option("--seed", s.seed, "seed recorded for sampled procedures");
  c->add_option("--config", s.config,
                "flat key = value config file; explicit flags win");
}

using Entries = std::vector<std::pair<std::string, std::string>>;

std::string config_text(const std::string& command, const Shared& s,
                        Entries extra) {
  extra.emplace_back("model", s.model);
  extra.emplace_back("radius", std::to_string(s.radius));
  extra.emplace_back("d", std::to_string(s.d));
  extra.emplace_back("D", std::to_string(s.D));
  extra.emplace_back("budget-vertices", std::to_string(s.budget_vertices));
  extra.emplace_back("cache-dir", s.cache_dir);
  extra.emplace_back("out", s.out);
  extra.emplace_back("seed", std::to_string(s.seed));
  std::sort(extra.begin(), extra.end());
  std::ostringstream o;
  o << "command = " << command << "\n";
  for (const auto& [k, v] : extra) o << k << " = " << v << "\n";
  return o.str();
}

ModelPtr model_for(const Shared& s) {
  if (s.model.empty()) throw InvalidParameter("--model is required");
  return make_model(s.model);
}

/// Cache-aware ball: load (with full revalidation) when the cache file
/// exists, otherwise build and populate the cache atomically.
Ball obtain_ball(const ModelPtr& M, const Shared& s) {
  const BallBudget budget{s.budget_vertices};
  if (s.cache_dir.empty()) return build_ball(M, s.radius, budget);
  const fs::path path = fs::path(s.cache_dir) / ball_cache_name(*M, s.radius);
  if (fs::exists(path)) return load_ball(M, path);
  Ball B = build_ball(M, s.radius, budget);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  save_ball(B, tmp);
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
  return B;
}

long long parse_ll(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw InvalidParameter(what + ": expected an integer, got `" + text + "`");
  }
  if (pos != text.size())
    throw InvalidParameter(what + ": expected an integer, got `" + text + "`");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<EndsScheduleEntry> parse_schedule(const std::string& text) {
  std::vector<EndsScheduleEntry> schedule;
  for (const std::string& part : split(text, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos)
      throw InvalidParameter("--schedule: expected r:R entries, got `" + part +
                             "`");
    schedule.push_back(
        {static_cast<int>(parse_ll(part.substr(0, colon), "--schedule")),
         static_cast<int>(parse_ll(part.substr(colon + 1), "--schedule"))});
  }
  return schedule;
}

// ------------------------------------------------------------- rendering --

std::string witness_kind_name(WitnessKind k) {
  switch (k) {
    case WitnessKind::MultiplicityBall: return "multiplicity_ball";
    case WitnessKind::ProximityPair: return "proximity_pair";
    case WitnessKind::TriplePoint: return "triple_point";
    case WitnessKind::SinglePieceForced: return "single_piece_forced";
  }
  return "unknown";
}

nlohmann::json witness_json(const RefutationWitness& w, bool verified) {
  nlohmann::json j;
  j["kind"] = witness_kind_name(w.kind);
  j["d"] = w.d;
  j["verified"] = verified;
  nlohmann::json p;
  if (const auto* mb = std::get_if<MultiplicityBallPayload>(&w.payload)) {
    p["center"] = mb->center;
    p["pieces"] = mb->pieces;
  } else if (const auto* pp = std::get_if<ProximityPairPayload>(&w.payload)) {
    p["piece_a"] = pp->piece_a;
    p["piece_b"] = pp->piece_b;
    p["vertex_a"] = pp->vertex_a;
    p["vertex_b"] = pp->vertex_b;
    p["distance"] = pp->distance;
  } else if (const auto* tp = std::get_if<TriplePointPayload>(&w.payload)) {
    p["vertex"] = tp->vertex;
    p["element"] = tp->element;
    p["pieces"] = tp->pieces;
  } else if (const auto* sp = std::get_if<SinglePiecePayload>(&w.payload)) {
    p["piece"] = sp->piece;
    p["diameter"] = sp->diameter;
  }
  j["payload"] = p;
  j["trace"] = w.trace;
  return j;
}

std::string witness_summary(const RefutationWitness& w) {
  std::ostringstream o;
  o << "refuted: ";
  if (const auto* mb = std::get_if<MultiplicityBallPayload>(&w.payload)) {
    o << "ball of radius " << w.d << " at vertex " << mb->center << " meets "
      << mb->pieces.size() << " pieces";
  } else if (const auto* pp = std::get_if<ProximityPairPayload>(&w.payload)) {
    o << "pieces " << pp->piece_a << " and " << pp->piece_b
      << " in one class at distance " << pp->distance << " < " << w.d;
  } else if (const auto* tp = std::get_if<TriplePointPayload>(&w.payload)) {
    o << "vertex " << tp->vertex << " lies in three pieces";
  } else if (const auto* sp = std::get_if<SinglePiecePayload>(&w.payload)) {
    o << "single piece has diameter " << sp->diameter;
  }
  return o.str();
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string csv_of(const std::string& header,
                   const std::vector<std::vector<long long>>& rows) {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + std::to_string(row[i]);
    out += '\n';
  }
  return out;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out) {
  CLI::App app{"desk-scale laboratory for the coarse geometry of finitely "
               "generated groups"};
  app.name("coarse-lab");
  app.require_subcommand(1);

  Shared s;
  std::function<int()> action;

  // --- ball ---------------------------------------------------------------
  bool stat = false;
  auto* ball_cmd = app.add_subcommand("ball", "build a Cayley ball");
  add_shared(ball_cmd, s, true);
  ball_cmd->add_flag("--stat", stat, "print `<n> vertices` only");
  ball_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      Ball B = obtain_ball(M, s);
      Emitter em(s.out, config_text("ball", s,
                                    {{"stat", stat ? "true" : "false"}}));
      em.via("ball.json", [&](const fs::path& p) { save_ball(B, p); });
      em.finish();
      if (stat)
        out << B.size() << " vertices\n";
      else
        out << "ball " << s.model << " radius=" << s.radius << ": " << B.size()
            << " vertices\n";
      return 0;
    };
  });

  // --- ends ---------------------------------------------------------------
  std::string schedule_text;
  int margin = 2;
  auto* ends_cmd =
      app.add_subcommand("ends", "end-count estimates over a schedule");
  add_shared(ends_cmd, s, true);
  ends_cmd->add_option("--schedule", schedule_text, "comma list of r:R pairs")
      ->required();
  ends_cmd->add_option("--margin", margin, "require R >= margin*r");
  ends_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      const auto schedule = parse_schedule(schedule_text);
      const auto res =
          ends_estimate(M, schedule, margin, BallBudget{s.budget_vertices});
      std::vector<std::vector<long long>> rows;
      for (const auto& r : res.rows)
        rows.push_back({r.r, r.R, static_cast<long long>(r.count)});
      Emitter em(s.out, config_text("ends", s,
                                    {{"schedule", schedule_text},
                                     {"margin", std::to_string(margin)}}));
      em.text("ends.csv", csv_of("r,R,count", rows));
      em.finish();
      out << "ends " << s.model << ": " << verdict_text(res) << "\n";
      return 0;
    };
  });

  // --- geodesics ----------------------------------------------------------
  int geo_length = 0;
  int extendable_to = 0;
  std::size_t cap = static_cast<std::size_t>(-1);
  auto* geo_cmd =
      app.add_subcommand("geodesics", "enumerate geodesic words from e");
  add_shared(geo_cmd, s, true);
  geo_cmd->add_option("--length", geo_length, "word length n")->required();
  geo_cmd->add_option("--extendable", extendable_to,
                      "keep only prefixes of length-m geodesics");
  geo_cmd->add_option("--cap", cap, "stop after this many words");
  geo_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      const GeodesicSet gs =
          extendable_to > 0
              ? extendable_prefixes(*M, geo_length, extendable_to, cap)
              : enumerate_geodesics(*M, geo_length, cap);
      std::string csv = "index,word\n";
      for (std::size_t i = 0; i < gs.paths.size(); ++i)
        csv += std::to_string(i) + "," +
               render_word(M->generators(), gs.paths[i]) + "\n";
      Emitter em(s.out,
                 config_text("geodesics", s,
                             {{"length", std::to_string(geo_length)},
                              {"extendable", std::to_string(extendable_to)},
                              {"cap", std::to_string(cap)}}));
      em.text("geodesics.csv", csv);
      em.finish();
      out << "geodesics " << s.model << " n=" << geo_length << ": "
          << gs.paths.size() << " words"
          << (gs.truncated ? " (truncated)" : "") << "\n";
      return 0;
    };
  });

  // --- cover --------------------------------------------------------------
  auto* cover_cmd = app.add_subcommand("cover", "make and inspect covers");
  cover_cmd->require_subcommand(1);

  std::string kind;
  int L = 0;
  auto* cmake_cmd = cover_cmd->add_subcommand("make", "construct a cover");
  add_shared(cmake_cmd, s, true);
  cmake_cmd
      ->add_option("--kind", kind, "interval | brick | lamplighter | net")
      ->required();
  cmake_cmd->add_option("--L", L, "piece size for interval/brick/lamplighter");
  cmake_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      Ball B = obtain_ball(M, s);
      std::optional<Cover> C;
      if (kind == "interval") C = make_interval_cover_Z(B, L);
      else if (kind == "brick") C = make_brick_cover_Z2(B, L);
      else if (kind == "lamplighter") C = make_lamplighter_cover(B, L, s.d);
      else if (kind == "net") C = net_partition(B, s.D);
      else
        throw InvalidParameter(
            "--kind must be interval, brick, lamplighter, or net");
      const std::set<int> classes(C->classes.begin(), C->classes.end());
      Emitter em(s.out, config_text("cover make", s,
                                    {{"kind", kind},
                                     {"L", std::to_string(L)}}));
      em.via("cover.json", [&](const fs::path& p) { save_cover(*C, p); });
      em.finish();
      out << "cover " << kind << ": " << C->pieces.size() << " pieces, "
          << classes.size() << " classes, declared d=" << C->d
          << " D=" << C->D << "\n";
      return 0;
    };
  });

  std::string cover_path;
  auto add_cover_path = [&cover_path](CLI::App* c) {
    c->add_option("--cover", cover_path, "cover JSON file")->required();
  };

  auto* check_cmd =
      cover_cmd->add_subcommand("check", "Definition-1 check of a cover");
  add_shared(check_cmd, s, true);
  add_cover_path(check_cmd);
  check_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      Ball B = obtain_ball(M, s);
      const Cover C = load_cover(B, cover_path);
      const int d = s.d > 0 ? s.d : C.d;
      const int D = s.D > 0 ? s.D : C.D;
      const CheckReport rep = check_definition1(C, d, D);
      nlohmann::json j;
      j["pass"] = rep.pass;
      j["realized_diameter"] = rep.realized_diameter;
      j["checked_d"] = d;
      j["checked_D"] = D;
      if (rep.violation) {
        nlohmann::json v;
        v["kind"] = rep.violation->kind == CoverViolation::Kind::TooClose
                        ? "too_close"
                        : "oversized";
        v["piece_a"] = rep.violation->piece_a;
        v["piece_b"] = rep.violation->piece_b;
        v["vertex_a"] = rep.violation->vertex_a;
        v["vertex_b"] = rep.violation->vertex_b;
        v["distance"] = rep.violation->distance;
        j["violation"] = v;
      } else {
        j["violation"] = nullptr;
      }
      Emitter em(s.out,
                 config_text("cover check", s, {{"cover", cover_path}}));
      em.text("check.json", dump_json(j));
      em.finish();
      if (rep.pass) {
        out << "pass: realized diameter " << rep.realized_diameter
            << " at (d=" << d << ", D=" << D << ")\n";
      } else if (rep.violation->kind == CoverViolation::Kind::TooClose) {
        out << "violation: pieces " << rep.violation->piece_a << " and "
            << rep.violation->piece_b << " at distance "
            << rep.violation->distance << " < " << d << "\n";
      } else {
        out << "violation: piece " << rep.violation->piece_a << " has diameter "
            << rep.violation->distance << " > " << D << "\n";
      }
      return 0;
    };
  });

  std::size_t exact_limit = 12;
  auto* color_cmd =
      cover_cmd->add_subcommand("color", "proper-color the proximity graph");
  add_shared(color_cmd, s, true);
  add_cover_path(color_cmd);
  color_cmd->add_option("--exact-limit", exact_limit,
                        "branch-and-bound up to this many pieces");
  color_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      Ball B = obtain_ball(M, s);
      const Cover C = load_cover(B, cover_path);
      const int d = s.d > 0 ? s.d : C.d;
      const ColoringReport rep = proximity_color(C, d, exact_limit);
      Emitter em(s.out,
                 config_text("cover color", s,
                             {{"cover", cover_path},
                              {"exact-limit", std::to_string(exact_limit)}}));
      em.via("colored.json",
             [&](const fs::path& p) { save_cover(rep.recolored, p); });
      em.finish();
      out << "colors=" << rep.color_count << " exact="
          << (rep.exact ? "yes" : "no") << " (proximity edges "
          << rep.graph.edges.size() << " at d=" << d << ")\n";
      return 0;
    };
  });

  auto* mult_cmd =
      cover_cmd->add_subcommand("multiplicity", "Definition-2 multiplicity");
  add_shared(mult_cmd, s, true);
  add_cover_path(mult_cmd);
  mult_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      Ball B = obtain_ball(M, s);
      const Cover C = load_cover(B, cover_path);
      const int d = s.d > 0 ? s.d : C.d;
      const MultiplicityReport rep = multiplicity(C, d);
      nlohmann::json j;
      j["d"] = rep.d;
      j["multiplicity"] = rep.multiplicity;
      j["argmax_vertex"] = rep.argmax_vertex;
      j["meeting_pieces"] = rep.meeting_pieces;
      Emitter em(s.out,
                 config_text("cover multiplicity", s,
                             {{"cover", cover_path}}));
      em.text("multiplicity.json", dump_json(j));
      em.finish();
      out << "multiplicity=" << rep.multiplicity << " at vertex "
          << rep.argmax_vertex << " (d=" << d << ")\n";
      return 0;
    };
  });

  // --- vk -----------------------------------------------------------------
  auto* vk_cmd = app.add_subcommand("vk", "van Kampen diagrams");
  vk_cmd->require_subcommand(1);

  std::string word_text;
  auto* vkb_cmd = vk_cmd->add_subcommand("build", "fill an identity word");
  add_shared(vkb_cmd, s, true);
  vkb_cmd->add_option("--word", word_text, "word over the model's generators")
      ->required();
  vkb_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      const Presentation& P = M->presentation();
      const Word w = parse_word(M->generators(), word_text);
      const Diagram D = build_diagram(P, *M, w);
      Emitter em(s.out, config_text("vk build", s, {{"word", word_text}}));
      em.via("diagram.json", [&](const fs::path& p) { save_diagram(D, p); });
      em.finish();
      out << "diagram: " << D.vertex_count() << " vertices, "
          << D.edge_count() << " edges, " << D.inner_face_count()
          << " cells\n";
      return 0;
    };
  });

  auto* vka_cmd = vk_cmd->add_subcommand("area", "Dehn-area probe");
  add_shared(vka_cmd, s, true);
  vka_cmd->add_option("--word", word_text, "word over the model's generators")
      ->required();
  vka_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      const Presentation& P = M->presentation();
      const Word w = parse_word(M->generators(), word_text);
      const AreaReport rep = area(P, *M, w);
      nlohmann::json j;
      j["faces"] = rep.faces ? nlohmann::json(*rep.faces) : nullptr;
      j["winding_bound"] =
          rep.winding_bound ? nlohmann::json(*rep.winding_bound) : nullptr;
      j["exact"] = rep.exact;
      Emitter em(s.out, config_text("vk area", s, {{"word", word_text}}));
      em.text("area.json", dump_json(j));
      em.finish();
      out << "area: ";
      if (rep.faces) out << "faces=" << *rep.faces;
      else out << "no filling found within bounds";
      if (rep.winding_bound) out << " winding_bound=" << *rep.winding_bound;
      out << (rep.exact ? " exact" : "") << "\n";
      return 0;
    };
  });

  std::string in_path;
  auto* vkr_cmd = vk_cmd->add_subcommand("render", "draw a diagram as SVG");
  add_shared(vkr_cmd, s, true);
  vkr_cmd->add_option("--in", in_path, "diagram JSON file")->required();
  vkr_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      const Diagram D = load_diagram(in_path);
      if (s.out.empty())
        throw InvalidParameter("vk render: --out directory is required");
      Emitter em(s.out, config_text("vk render", s, {{"in", in_path}}));
      em.svg("diagram.svg", diagram_svg(D, M->generators()));
      em.finish();
      out << "svg: " << (fs::path(s.out) / "diagram.svg").string() << " ("
          << D.vertex_count() << " vertices, " << D.inner_face_count()
          << " cells)\n";
      return 0;
    };
  });

  // --- refute -------------------------------------------------------------
  bool zero_dim = false;
  int N_used = 24;
  int loop_n = 32;
  auto* refute_cmd = app.add_subcommand(
      "refute", "run the refutation pipeline against a cover");
  add_shared(refute_cmd, s, true);
  add_cover_path(refute_cmd);
  refute_cmd->add_flag("--zero-dim", zero_dim,
                       "dimension-zero mode: single-class partitions");
  refute_cmd->add_option("--N", N_used, "avoiding-ball radius N_used");
  refute_cmd->add_option("--n", loop_n, "test-loop half-length, > N");
  refute_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      Ball B = obtain_ball(M, s);
      const Cover C = load_cover(B, cover_path);
      const int d = s.d > 0 ? s.d : C.d;
      Emitter em(s.out,
                 config_text("refute", s,
                             {{"cover", cover_path},
                              {"zero-dim", zero_dim ? "true" : "false"},
                              {"N", std::to_string(N_used)},
                              {"n", std::to_string(loop_n)}}));
      if (zero_dim) {
        const RefutationWitness w = zero_dim_refute(B, C, d);
        em.text("witness.json", dump_json(witness_json(w, true)));
        em.text("refute-trace.txt", join_lines(w.trace));
        em.finish();
        out << witness_summary(w) << "\n";
        return 0;
      }
      RefuteParams params;
      params.d_used = d;
      params.N_used = N_used;
      params.n = loop_n;
      const RefutationOutcome outcome =
          find_violation(M->presentation(), *M, B, C, params);
      if (const auto* w = std::get_if<RefutationWitness>(&outcome)) {
        em.text("witness.json",
                dump_json(witness_json(*w, verify_witness(C, *w))));
        em.text("refute-trace.txt", join_lines(w->trace));
        em.finish();
        out << witness_summary(*w) << "\n";
        return 0;
      }
      const auto& inc = std::get<Inconclusive>(outcome);
      nlohmann::json j;
      j["step"] = inc.step;
      j["diagnostics"] = inc.diagnostics;
      j["trace"] = inc.trace;
      em.text("inconclusive.json", dump_json(j));
      em.text("refute-trace.txt", join_lines(inc.trace));
      em.finish();
      out << "inconclusive at '" << inc.step << "'\n";
      return 2;
    };
  });

  // --- constants ----------------------------------------------------------
  long long R_used = 64;
  long long N_desk = 24;
  auto* const_cmd = app.add_subcommand(
      "constants", "the proof's constants next to the desk values");
  add_shared(const_cmd, s, true);
  const_cmd->add_option("--N", N_desk, "avoiding-ball radius the desk run uses");
  const_cmd->add_option("--R-used", R_used, "window radius the desk run uses");
  const_cmd->callback([&] {
    action = [&]() -> int {
      auto M = model_for(s);
      if (s.D < 1) throw InvalidParameter("constants: --D must be >= 1");
      DeskOverrides desk;
      if (s.d > 0) desk.d_used = s.d;
      desk.N_used = N_desk;
      desk.R_used = R_used;
      const PaperConstants pc = paper_constants(
          M->presentation(), s.D, desk, BallBudget{s.budget_vertices});
      nlohmann::json j;
      j["M"] = pc.M;
      j["d_threshold"] = pc.d_threshold;
      j["D"] = pc.D;
      j["N"] = pc.N;
      j["N_digits"] = pc.N.size();
      j["N_fits_ball_budget"] = pc.N_fits_ball_budget;
      j["d_used"] = pc.d_used;
      j["N_used"] = pc.N_used;
      j["R_used"] = pc.R_used;
      j["overrides"] = pc.overrides;
      Emitter em(s.out, config_text("constants", s,
                                    {{"N", std::to_string(N_desk)},
                                     {"R-used", std::to_string(R_used)}}));
      em.text("constants.json", dump_json(j));
      em.finish();
      out << "constants: M=" << pc.M << " d_threshold=" << pc.d_threshold
          << " N="
          << (pc.N.size() <= 20 ? pc.N
                                : "<" + std::to_string(pc.N.size()) +
                                      " digits>")
          << " overrides=" << pc.overrides.size() << "\n";
      return 0;
    };
  });

  // --- report -------------------------------------------------------------
  std::string growth_range;
  std::string ends_schedule;
  std::string mult_sweep;
  auto* report_cmd =
      app.add_subcommand("report", "CSV tables and SVG plots");
  add_shared(report_cmd, s, true);
  report_cmd->add_option("--growth", growth_range,
                         "ball growth series, as r0:r1");
  report_cmd->add_option("--ends", ends_schedule,
                         "end-count series, comma list of r:R");
  report_cmd->add_option("--multiplicity", mult_sweep,
                         "multiplicity sweep, as cover.json:d1,d2,...");
  report_cmd->callback([&] {
    action = [&]() -> int {
      if (s.out.empty())
        throw InvalidParameter("report: --out directory is required");
      auto M = model_for(s);
      Emitter em(s.out, config_text("report", s,
                                    {{"growth", growth_range},
                                     {"ends", ends_schedule},
                                     {"multiplicity", mult_sweep}}));
      std::vector<std::string> notes;

      if (!growth_range.empty()) {
        const auto colon = growth_range.find(':');
        if (colon == std::string::npos)
          throw InvalidParameter("--growth: expected r0:r1");
        const long long r0 = parse_ll(growth_range.substr(0, colon), "--growth");
        const long long r1 = parse_ll(growth_range.substr(colon + 1), "--growth");
        std::vector<std::vector<long long>> rows;
        std::vector<std::pair<double, double>> pts;
        if (r0 <= r1) {
          if (r0 < 0) throw InvalidParameter("--growth: radii must be >= 0");
          const Ball B =
              build_ball(M, static_cast<int>(r1), BallBudget{s.budget_vertices});
          std::vector<long long> cum(static_cast<std::size_t>(r1) + 1, 0);
          for (std::size_t v = 0; v < B.size(); ++v) ++cum[B.dist(v)];
          for (std::size_t i = 1; i < cum.size(); ++i) cum[i] += cum[i - 1];
          for (long long r = r0; r <= r1; ++r) {
            rows.push_back({r, cum[static_cast<std::size_t>(r)]});
            pts.emplace_back(static_cast<double>(r),
                             static_cast<double>(cum[r]));
          }
        }
        em.text("growth.csv", csv_of("r,vertices", rows));
        em.svg("growth.svg", plot_svg("ball growth " + s.model, "r",
                                      "vertices", pts));
        notes.push_back("growth " + std::to_string(rows.size()) + " rows");
      }

      if (!ends_schedule.empty()) {
        const auto res = ends_estimate(M, parse_schedule(ends_schedule), 2,
                                       BallBudget{s.budget_vertices});
        std::vector<std::vector<long long>> rows;
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : res.rows) {
          rows.push_back({r.r, r.R, static_cast<long long>(r.count)});
          pts.emplace_back(static_cast<double>(r.r),
                           static_cast<double>(r.count));
        }
        em.text("ends.csv", csv_of("r,R,count", rows));
        em.svg("ends.svg",
               plot_svg("ends " + s.model, "r", "components", pts));
        notes.push_back("ends " + verdict_text(res));
      }

      if (!mult_sweep.empty()) {
        const auto colon = mult_sweep.rfind(':');
        if (colon == std::string::npos)
          throw InvalidParameter("--multiplicity: expected cover.json:d1,d2,...");
        const std::string path = mult_sweep.substr(0, colon);
        std::vector<int> scales;
        const std::string list = mult_sweep.substr(colon + 1);
        if (!list.empty())
          for (const std::string& part : split(list, ','))
            scales.push_back(
                static_cast<int>(parse_ll(part, "--multiplicity")));
        Ball B = obtain_ball(M, s);
        const Cover C = load_cover(B, path);
        std::vector<std::vector<long long>> rows;
        std::vector<std::pair<double, double>> pts;
        for (const int d : scales) {
          const MultiplicityReport rep = multiplicity(C, d);
          rows.push_back({d, static_cast<long long>(rep.multiplicity)});
          pts.emplace_back(static_cast<double>(d),
                           static_cast<double>(rep.multiplicity));
        }
        em.text("multiplicity.csv", csv_of("d,multiplicity", rows));
        em.svg("multiplicity.svg",
               plot_svg("multiplicity " + s.model, "d", "multiplicity", pts));
        notes.push_back("multiplicity " + std::to_string(rows.size()) +
                        " scales");
      }

      em.finish();
      out << "report: ";
      if (notes.empty()) {
        out << "nothing requested";
      } else {
        for (std::size_t i = 0; i < notes.size(); ++i)
          out << (i ? "; " : "") << notes[i];
      }
      out << " -> " << s.out << "\n";
      return 0;
    };
  });

  // --- parse and dispatch ---------------------------------------------------
  std::vector<std::string> args = argv;
  try {
    inject_config(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }
  std::vector<const char*> cargv;
  cargv.push_back("coarse-lab");
  for (const std::string& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, std::cerr);
    return code == 0 ? 0 : 64;
  }
  if (!action) return 64;

  try {
    return action();
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << " (estimated size "
              << e.estimated_size << ")\n";
    return 3;
  } catch (const NoAvoidingPath& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal invariant failure: " << e.what() << "\n"
              << "diagnostic dump:\n  argv:";
    for (const std::string& a : argv) std::cerr << " " << a;
    std::cerr << "\n  model: " << s.model << "\n  radius: " << s.radius
              << "\n  d: " << s.d << "\n  D: " << s.D << "\n";
    return 70;
  } catch (const NonPlanarAssembly& e) {
    std::cerr << "internal invariant failure: " << e.what() << "\n";
    return 70;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "internal invariant failure: " << e.what() << "\n";
    return 70;
  }
}

int run_command(const std::vector<std::string>& argv) {
  return run_command(argv, std::cout);
}

}  // namespace coarse::cli

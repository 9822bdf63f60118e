#include "coarselab_cli/run.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coarselab/cayley.hpp"
#include "coarselab/covers.hpp"
#include "coarselab/models.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace coarse;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out;
  const int code = coarse::cli::run_command(args, out);
  return {code, out.str()};
}

/// Fresh scratch directory per label, wiped before use.
fs::path scratch(const std::string& label) {
  const fs::path dir = fs::temp_directory_path() / ("coarselab-cli-" + label);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json slurp_json(const fs::path& p) {
  return nlohmann::json::parse(slurp(p));
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

/// The same text with any config-hash comment lines removed.
std::string without_hash_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (!contains(line, "config-hash")) out += line + "\n";
  return out;
}

}  // namespace

TEST_CASE("ball stat prints the exact free group count") {
  // 1 + 4 + 4*3 = 17 vertices in the free(2) ball of radius 2
  const Run r = cli({"ball", "--model", "free:2", "--radius", "2", "--stat"});
  CHECK(r.code == 0);
  CHECK(r.out == "17 vertices\n");
}

TEST_CASE("ball writes its artifact and summary") {
  const fs::path dir = scratch("ball");
  const Run r = cli({"ball", "--model", "z^2", "--radius", "3", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "25 vertices"));
  CHECK(fs::exists(dir / "ball.json"));
  CHECK(fs::exists(dir / "effective-config.txt"));
  const std::string cfg = slurp(dir / "effective-config.txt");
  CHECK(contains(cfg, "command = ball"));
  CHECK(contains(cfg, "model = z^2"));
  CHECK(contains(cfg, "radius = 3"));
  // the artifact is a loadable ball for the same model
  Ball B = load_ball(make_model("z^2"), dir / "ball.json");
  CHECK(B.size() == 25);
}

TEST_CASE("ends schedule reproduces the plane verdict and CSV") {
  const fs::path dir = scratch("ends");
  const Run r = cli({"ends", "--model", "z^2", "--schedule", "1:8,2:12,3:16",
                     "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "stable(1)"));
  CHECK(slurp(dir / "ends.csv") == "r,R,count\n1,8,1\n2,12,1\n3,16,1\n");
}

TEST_CASE("ends on the line reports two ends") {
  const Run r = cli({"ends", "--model", "z", "--schedule", "1:8,2:12,3:16"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "stable(2)"));
}

TEST_CASE("geodesics command counts words exactly") {
  const fs::path dir = scratch("geod");
  const Run r = cli({"geodesics", "--model", "free:2", "--length", "2",
                     "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "12 words"));  // 4*3 geodesics of length 2
  const std::string csv = slurp(dir / "geodesics.csv");
  CHECK(contains(csv, "index,word"));
  CHECK(contains(csv, "0,a a"));  // lex-first geodesic, exponents collapsed
}

TEST_CASE("growth report emits the closed form") {
  const fs::path dir = scratch("growth");
  const Run r = cli({"report", "--model", "z^2", "--growth", "0:20", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  std::string expected = "r,vertices\n";
  for (long long v = 0; v <= 20; ++v)
    expected += std::to_string(v) + "," + std::to_string(2 * v * v + 2 * v + 1) +
                "\n";
  CHECK(slurp(dir / "growth.csv") == expected);
  const std::string svg = slurp(dir / "growth.svg");
  CHECK(contains(svg, "<?xml"));
  CHECK(contains(svg, "config-hash"));
  CHECK(contains(svg, "<polyline"));
  CHECK(contains(svg, "</svg>"));
}

TEST_CASE("empty growth series emits a header-only CSV") {
  const fs::path dir = scratch("growth-empty");
  const Run r = cli({"report", "--model", "z^2", "--growth", "5:4", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "growth.csv") == "r,vertices\n");
  CHECK(!contains(slurp(dir / "growth.svg"), "<polyline"));
}

TEST_CASE("multiplicity sweep draws one point per scale") {
  const fs::path cdir = scratch("mult-cover");
  REQUIRE(cli({"cover", "make", "--model", "z^2", "--radius", "12", "--kind",
               "brick", "--L", "8", "--out", cdir.string()})
              .code == 0);
  const fs::path dir = scratch("mult-report");
  const Run r = cli({"report", "--model", "z^2", "--radius", "12",
                     "--multiplicity", (cdir / "cover.json").string() + ":2,4,8,16",
                     "--out", dir.string()});
  CHECK(r.code == 0);
  const std::string csv = slurp(dir / "multiplicity.csv");
  // exactly 3 pieces meet a radius-2 ball in the L=8 brick cover
  CHECK(contains(csv, "2,3\n"));
  CHECK(csv.substr(0, 15) == "d,multiplicity\n");
  int rows = 0;
  for (const char c : csv) rows += c == '\n';
  CHECK(rows == 5);  // header + 4 scales
  int markers = 0;
  std::string svg = slurp(dir / "multiplicity.svg");
  for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
       pos = svg.find("<circle", pos + 1))
    ++markers;
  CHECK(markers == 4);
}

TEST_CASE("cover make check color multiplicity round-trip") {
  const fs::path dir = scratch("cover-roundtrip");
  const Run made = cli({"cover", "make", "--model", "z", "--radius", "16",
                        "--kind", "interval", "--L", "4", "--out",
                        dir.string()});
  CHECK(made.code == 0);
  CHECK(contains(made.out, "9 pieces"));
  CHECK(contains(made.out, "2 classes"));
  CHECK(contains(made.out, "d=4 D=4"));
  const std::string cover = (dir / "cover.json").string();

  const Run checked = cli({"cover", "check", "--model", "z", "--radius", "16",
                           "--cover", cover, "--out", dir.string()});
  CHECK(checked.code == 0);
  CHECK(contains(checked.out, "pass"));
  const auto cj = slurp_json(dir / "check.json");
  CHECK(cj["pass"] == true);
  CHECK(cj["realized_diameter"] == 3);
  CHECK(cj["violation"].is_null());

  const Run colored = cli({"cover", "color", "--model", "z", "--radius", "16",
                           "--cover", cover});
  CHECK(colored.code == 0);
  CHECK(contains(colored.out, "colors=2"));
  CHECK(contains(colored.out, "exact=yes"));

  const Run mult = cli({"cover", "multiplicity", "--model", "z", "--radius",
                        "16", "--cover", cover, "--d", "1"});
  CHECK(mult.code == 0);
  CHECK(contains(mult.out, "multiplicity=2"));
}

TEST_CASE("vk build area render flow") {
  const fs::path dir = scratch("vk");
  const Run built = cli({"vk", "build", "--model", "z^2", "--word",
                         "a a b b a^-1 a^-1 b^-1 b^-1", "--out", dir.string()});
  CHECK(built.code == 0);
  CHECK(contains(built.out, "9 vertices, 12 edges, 4 cells"));
  CHECK(fs::exists(dir / "diagram.json"));

  const Run a = cli({"vk", "area", "--model", "z^2", "--word",
                     "a a b b a^-1 a^-1 b^-1 b^-1", "--out", dir.string()});
  CHECK(a.code == 0);
  CHECK(contains(a.out, "faces=4"));
  CHECK(contains(a.out, "winding_bound=4"));
  CHECK(contains(a.out, "exact"));
  const auto aj = slurp_json(dir / "area.json");
  CHECK(aj["faces"] == 4);
  CHECK(aj["exact"] == true);

  const Run rendered = cli({"vk", "render", "--model", "z^2", "--in",
                            (dir / "diagram.json").string(), "--out",
                            dir.string()});
  CHECK(rendered.code == 0);
  const std::string svg = slurp(dir / "diagram.svg");
  CHECK(contains(svg, "config-hash"));
  CHECK(contains(svg, "</svg>"));
}

TEST_CASE("refute finds a verified witness on a bad brick cover") {
  const fs::path dir = scratch("refute-brick");
  REQUIRE(cli({"cover", "make", "--model", "z^2", "--radius", "12", "--kind",
               "brick", "--L", "4", "--out", dir.string()})
              .code == 0);
  const Run r = cli({"refute", "--model", "z^2", "--radius", "12", "--cover",
                     (dir / "cover.json").string(), "--d", "4", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "refuted"));
  const auto wj = slurp_json(dir / "witness.json");
  CHECK(wj["kind"] == "multiplicity_ball");
  CHECK(wj["verified"] == true);
  CHECK(wj["payload"]["pieces"].size() >= 3);
  CHECK(contains(slurp(dir / "refute-trace.txt"), "step 1"));
}

TEST_CASE("refute reports inconclusive with exit two on half planes") {
  const fs::path dir = scratch("refute-inconclusive");
  auto M = make_model("z^2");
  Ball B = build_ball(M, 16);
  std::vector<std::vector<std::size_t>> pieces(2);
  for (std::size_t v = 0; v < B.size(); ++v) {
    const auto c = parse_vector_key(B.key(v));
    if (c[1] <= 1) pieces[0].push_back(v);
    if (c[1] >= 0) pieces[1].push_back(v);
  }
  const Cover C = make_cover(B, pieces, {0, 1}, 4, 64);
  save_cover(C, dir / "halves.json");

  const Run r = cli({"refute", "--model", "z^2", "--radius", "16", "--cover",
                     (dir / "halves.json").string(), "--d", "4", "--N", "11",
                     "--n", "12", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(contains(r.out, "inconclusive"));
  const auto ij = slurp_json(dir / "inconclusive.json");
  CHECK(contains(ij["step"].get<std::string>(), "endpoint"));
  const std::string trace = slurp(dir / "refute-trace.txt");
  CHECK(contains(trace, "step 1"));
  CHECK(contains(trace, "step 6"));
  CHECK(!fs::exists(dir / "witness.json"));
}

TEST_CASE("refute zero-dim mode handles single-class partitions") {
  const fs::path dir = scratch("refute-zero");
  auto M = make_model("z^2");
  Ball B = build_ball(M, 10);
  const Cover net = net_partition(B, 8);
  REQUIRE(net.pieces.size() >= 2);
  save_cover(net, dir / "net.json");
  const Run r = cli({"refute", "--zero-dim", "--model", "z^2", "--radius",
                     "10", "--cover", (dir / "net.json").string(), "--d", "2",
                     "--out", dir.string()});
  CHECK(r.code == 0);
  const auto wj = slurp_json(dir / "witness.json");
  CHECK(wj["kind"] == "proximity_pair");
  CHECK(wj["payload"]["distance"] == 1);
  CHECK(wj["verified"] == true);
}

TEST_CASE("constants prints the exact bound summary") {
  const fs::path dir = scratch("constants");
  const Run r = cli({"constants", "--model", "z^2", "--D", "8", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "M=4"));
  CHECK(contains(r.out, "d_threshold=500"));
  CHECK(contains(r.out, "<93 digits>"));
  const auto j = slurp_json(dir / "constants.json");
  CHECK(j["N"].get<std::string>().size() == 93);
  CHECK(j["N_fits_ball_budget"] == false);
  CHECK(j["overrides"].size() == 3);

  const Run small = cli({"constants", "--model", "z^2", "--D", "1"});
  CHECK(small.code == 0);
  CHECK(contains(small.out, "N=1200"));
}

TEST_CASE("usage errors exit sixty-four") {
  CHECK(cli({"frobnicate"}).code == 64);
  CHECK(cli({"ball"}).code == 64);                        // missing --model
  CHECK(cli({"ball", "--model", "z^^", "--radius", "2"}).code == 64);
  CHECK(cli({"ends", "--model", "z", "--schedule", "nope"}).code == 64);
  CHECK(cli({"vk", "build", "--model", "z^2", "--word", "a"}).code == 64);
  CHECK(cli({"cover", "check", "--model", "z", "--radius", "4", "--cover",
             "/nonexistent/cover.json"})
            .code == 64);
  CHECK(cli({}).code == 64);  // no subcommand
}

TEST_CASE("budget exhaustion exits three") {
  const Run r = cli({"ball", "--model", "free:2", "--radius", "10",
                     "--budget-vertices", "100"});
  CHECK(r.code == 3);
}

TEST_CASE("internal failures would exit seventy and help exits zero") {
  const Run h = cli({"--help"});
  CHECK(h.code == 0);
  CHECK(contains(h.out, "coarse-lab"));
  const Run hs = cli({"refute", "--help"});
  CHECK(hs.code == 0);
  CHECK(contains(hs.out, "--zero-dim"));
}

TEST_CASE("config file supplies defaults and flags win") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream o(cfg);
    o << "# desk defaults\n"
      << "model = z^2\n"
      << "radius = 3\n"
      << "stat = true\n";
  }
  const Run defaults = cli({"ball", "--config", cfg.string()});
  CHECK(defaults.code == 0);
  CHECK(defaults.out == "25 vertices\n");

  const Run overridden =
      cli({"ball", "--config", cfg.string(), "--radius", "2"});
  CHECK(overridden.code == 0);
  CHECK(overridden.out == "13 vertices\n");

  {
    std::ofstream o(cfg, std::ios::app);
    o << "bogus-key = 1\n";
  }
  CHECK(cli({"ball", "--config", cfg.string()}).code == 64);
}

TEST_CASE("ball cache round-trips through revalidation") {
  const fs::path cache = scratch("cache");
  const std::vector<std::string> args = {"ball",        "--model", "z^2",
                                         "--radius",    "6",       "--stat",
                                         "--cache-dir", cache.string()};
  const Run first = cli(args);
  CHECK(first.code == 0);
  CHECK(first.out == "85 vertices\n");  // 2*36+12+1
  bool cached = false;
  for (const auto& e : fs::directory_iterator(cache)) cached |= e.is_regular_file();
  CHECK(cached);
  const Run second = cli(args);
  CHECK(second.code == 0);
  CHECK(second.out == first.out);
}

TEST_CASE("repeated runs produce byte-identical artifacts") {
  const fs::path dir = scratch("determinism");
  const std::vector<std::string> args = {
      "report", "--model", "z^2",   "--growth",      "0:12", "--ends",
      "1:8,2:12", "--out",  dir.string()};
  REQUIRE(cli(args).code == 0);
  const std::string growth1 = slurp(dir / "growth.csv");
  const std::string ends1 = slurp(dir / "ends.csv");
  const std::string gsvg1 = slurp(dir / "growth.svg");
  REQUIRE(cli(args).code == 0);
  CHECK(slurp(dir / "growth.csv") == growth1);
  CHECK(slurp(dir / "ends.csv") == ends1);
  CHECK(slurp(dir / "growth.svg") == gsvg1);

  // same request into a different directory: data identical, SVG differs at
  // most in the stamped config-hash comment
  const fs::path dir2 = scratch("determinism2");
  std::vector<std::string> args2 = args;
  args2.back() = dir2.string();
  REQUIRE(cli(args2).code == 0);
  CHECK(slurp(dir2 / "growth.csv") == growth1);
  CHECK(slurp(dir2 / "ends.csv") == ends1);
  CHECK(without_hash_lines(slurp(dir2 / "growth.svg")) ==
        without_hash_lines(gsvg1));
}

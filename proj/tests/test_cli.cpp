#include "macrostate/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

using namespace macrostate;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("macrostate_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }

  // Exit status of the CLI; stderr lands in `err`.
  int run(const std::string& args) const {
    const std::string cmd = std::string(MACROSTATE_CLI) + " " + args + " >" + (dir / "stdout.txt").string() +
                            " 2>" + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string err() const { return slurp(dir / "stderr.txt"); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

const char* two_cliques =
    "0\t1\n0\t2\n0\t3\n1\t2\n1\t3\n2\t3\n"
    "4\t5\n4\t6\n4\t7\n5\t6\n5\t7\n6\t7\n"
    "3\t4\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gap scan over a beta grid") {
  Workspace ws;
  REQUIRE(ws.run("synth --grid-size 24 --seed 3 --out " + (ws.dir / "syn").string()) == 0);
  const std::string grid = (ws.dir / "syn" / "grid.json").string();
  REQUIRE(ws.run("gaps --grid " + grid + " --beta-start 1 --beta-stop 3 --beta-count 8 --m-max 6 --out " +
                 (ws.dir / "scan").string()) == 0);
  const auto table = read_csv(ws.dir / "scan" / "gaps.csv");
  CHECK(table.header.size() == 6);
  REQUIRE(table.rows.size() == 8);

  // A single-beta run reproduces the matching row of the scan.
  REQUIRE(ws.run("gaps --grid " + grid + " --beta 3 --m-max 6 --out " + (ws.dir / "one").string()) == 0);
  const auto one = read_csv(ws.dir / "one" / "gaps.csv");
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0] == table.rows[7]);

  const Json summary = Json::parse(Workspace::slurp(ws.dir / "scan" / "gaps.json"));
  CHECK(summary["betas"].size() == 8);
}

TEST_CASE("disconnected graph is reported as JSON") {
  Workspace ws;
  const auto g = ws.write("g.tsv", "0\t1\n2\t3\n");
  CHECK(ws.run("gaps --graph " + g.string() + " --out " + (ws.dir / "o").string()) == 1);
  const Json e = Json::parse(ws.err());
  CHECK(e["error"] == "DisconnectedInput");
  CHECK(e["count"] == 2);
}

TEST_CASE("malformed arguments") {
  Workspace ws;
  CHECK(ws.run("fit --graph x.tsv --beta -1 --seed 1") == 1);
  CHECK(Json::parse(ws.err())["error"] == "InvalidArgument");
  CHECK(ws.run("fit --graph x.tsv") == 1);
  CHECK(ws.run("fit --graph " + (ws.dir / "missing.tsv").string() + " --seed 1") == 1);
  CHECK(Json::parse(ws.err())["error"] == "IoError");
}

TEST_CASE("single edge has no separable structure") {
  Workspace ws;
  const auto g = ws.write("g.tsv", "0\t1\n");
  CHECK(ws.run("fit --graph " + g.string() + " --seed 1 --out " + (ws.dir / "a").string()) == 2);
  CHECK(Json::parse(ws.err())["error"] == "NoSeparableStructure");
  CHECK(ws.run("fit --graph " + g.string() + " --m 2 --seed 1 --out " + (ws.dir / "b").string()) == 0);
}

TEST_CASE("one component means every window is one") {
  Workspace ws;
  const auto g = ws.write("g.tsv", two_cliques);
  REQUIRE(ws.run("fit --graph " + g.string() + " --m 1 --seed 1 --out " + (ws.dir / "o").string()) == 0);
  const auto t = read_csv(ws.dir / "o" / "assignments.csv");
  std::size_t col = 0;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (t.header[c] == "w_0") col = c;
  REQUIRE(col > 0);
  CHECK(t.rows.size() == 8);
  for (const auto& row : t.rows) CHECK(std::stod(row[col]) == 1.0);
}

TEST_CASE("two cliques are partitioned exactly") {
  Workspace ws;
  const auto g = ws.write("g.tsv", two_cliques);
  REQUIRE(ws.run("partition --graph " + g.string() + " --seed 4 --out " + (ws.dir / "o").string()) == 0);
  const auto p = read_csv(ws.dir / "o" / "partition.csv");
  REQUIRE(p.rows.size() == 8);
  for (int i = 1; i < 4; ++i) CHECK(p.rows[static_cast<std::size_t>(i)][1] == p.rows[0][1]);
  for (int i = 5; i < 8; ++i) CHECK(p.rows[static_cast<std::size_t>(i)][1] == p.rows[4][1]);
  CHECK(p.rows[0][1] != p.rows[4][1]);
  const Json model = Json::parse(Workspace::slurp(ws.dir / "o" / "model.json"));
  CHECK(model["m"] == 2);
  CHECK(fs::exists(ws.dir / "o" / "clusters.csv"));
  CHECK(fs::exists(ws.dir / "o" / "edges_reordered.csv"));
}

TEST_CASE("runs are reproducible from the echoed config") {
  Workspace ws;
  REQUIRE(ws.run("synth --grid-size 30 --seed 2 --out " + (ws.dir / "syn").string()) == 0);
  const std::string args = "fit --grid " + (ws.dir / "syn" / "grid.json").string() + " --beta 2 --m-max 8 --seed 5 --truth " +
                           (ws.dir / "syn" / "truth.csv").string() + " --threshold --trace --out ";
  REQUIRE(ws.run(args + (ws.dir / "a").string()) == 0);
  REQUIRE(ws.run(args + (ws.dir / "b").string()) == 0);
  const std::string model = Workspace::slurp(ws.dir / "a" / "model.json");
  CHECK(model == Workspace::slurp(ws.dir / "b" / "model.json"));
  CHECK(Workspace::slurp(ws.dir / "a" / "trace.jsonl") == Workspace::slurp(ws.dir / "b" / "trace.jsonl"));

  REQUIRE(ws.run("fit --config " + (ws.dir / "a" / "config.ini").string() + " --out " + (ws.dir / "c").string()) == 0);
  CHECK(Workspace::slurp(ws.dir / "c" / "model.json") == model);

  const Json v = Json::parse(Workspace::slurp(ws.dir / "a" / "validation.json"));
  CHECK(v.contains("relative_error"));
  CHECK(v.contains("relative_error_crisp"));
  CHECK(fs::exists(ws.dir / "a" / "components_crisp.csv"));

  REQUIRE(ws.run("validate --components " + (ws.dir / "a" / "weighted_components.csv").string() + " --truth " +
                 (ws.dir / "syn" / "truth.csv").string() + " --out " + (ws.dir / "v").string()) == 0);
  const Json w = Json::parse(Workspace::slurp(ws.dir / "v" / "validation.json"));
  CHECK(w["relative_error"] == v["relative_error"]);
}

TEST_CASE("validate reports silhouettes and relative error") {
  Workspace ws;
  const auto items = ws.write("items.csv", "x,y\n0,0\n0.1,0\n0,0.1\n5,5\n5.1,5\n5,5.1\n");
  const auto labels = ws.write("labels.csv", "item,label\n0,0\n1,0\n2,0\n3,1\n4,1\n5,1\n");
  REQUIRE(ws.run("validate --items " + items.string() + " --labels " + labels.string() + " --kmeans-k 2 --seed 1 --out " +
                 (ws.dir / "v").string()) == 0);
  const auto outputs = fs::directory_iterator(ws.dir / "v");
  CHECK(std::distance(fs::begin(outputs), fs::end(outputs)) > 0);
}

}  // TEST_SUITE

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "graphs.hpp"
#include "oracle.hpp"
#include "ssn/io.hpp"
#include "ssn/pipeline.hpp"
#include "support.hpp"

using namespace ssn;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("ssn-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

// Runs the binary with the given arguments; stdout and stderr go to files in
// the sandbox. Returns the exit status.
int run(const Sandbox& box, const std::string& args) {
  std::string cmd = std::string("'") + SSN_CLI_PATH + "' " + args + " >'" + box / "stdout" + "' 2>'" +
                    box / "stderr" + "'";
  int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string read(const std::string& path) { return oracle::slurp(path); }

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string fixture(const char* name) { return testing::fixture(name).string(); }

SimilarityMatrix library_matrix(Measure measure, Mixer mixer = Mixer::BMA) {
  auto g = parse_obo_file(fixture("planted.obo"));
  std::ifstream in(fixture("planted.gaf"));
  auto annotations = load_annotations(in, g);
  const auto& corpus = annotations.corpus(Namespace::BP);
  auto ic = compute_ic(corpus);
  return build_matrix(corpus_products(corpus), measure, mixer, corpus, ic, g).matrix;
}

std::string planted_args() { return "--obo '" + fixture("planted.obo") + "' --gaf '" + fixture("planted.gaf") + "'"; }

}  // namespace

TEST_CASE("compute-matrix writes the library matrix") {
  Sandbox box;
  REQUIRE(run(box, "compute-matrix " + planted_args() + " --out '" + box / "m.csv" + "'") == 0);
  CHECK(read(box / "m.csv") == matrix_to_csv(library_matrix(Measure::Lin)));
  CHECK(read(box / "stderr").find("1 NOT") != std::string::npos);

  REQUIRE(run(box, "compute-matrix " + planted_args() + " --measure Resnik --mixer Max --out '" + box / "m.json" +
                       "'") == 0);
  CHECK(read(box / "m.json") == dump(matrix_to_json(library_matrix(Measure::Resnik, Mixer::Max))));
}

TEST_CASE("compute-matrix input errors exit 2") {
  Sandbox box;
  CHECK(run(box, "compute-matrix " + planted_args() + " --namespace XX --out '" + box / "m.csv" + "'") == 2);
  CHECK(run(box, "compute-matrix " + planted_args() + " --measure Nope --out '" + box / "m.csv" + "'") == 2);
  CHECK(run(box, "compute-matrix --obo '" + fixture("cycle.obo") + "' --gaf '" + fixture("eight.gaf") + "' --out '" +
                     box / "m.csv" + "'") == 2);
  CHECK(read(box / "stderr").find("CycleDetected") != std::string::npos);
  CHECK(run(box, "compute-matrix --obo /does/not/exist --gaf x --out y") == 2);
  CHECK(run(box, "no-such-command") == 2);
  CHECK(run(box, "") == 2);
  CHECK_FALSE(fs::exists(box / "m.csv"));
}

TEST_CASE("compute-matrix ALL writes one file per measure") {
  Sandbox box;
  REQUIRE(run(box, "compute-matrix " + planted_args() + " --measure ALL --out '" + box / "matrix.csv" + "'") == 0);
  std::size_t files = 0;
  for (auto m : kAllMeasures) {
    auto path = box / ("matrix-" + std::string(to_string(m)) + ".csv");
    REQUIRE(fs::exists(path));
    CHECK(read(path) == matrix_to_csv(library_matrix(m)));
    ++files;
  }
  CHECK(files == 11);
  CHECK_FALSE(fs::exists(box / "matrix.csv"));
}

TEST_CASE("build, prune and communities on the barbell") {
  Sandbox box;
  auto m = testing::matrix(8, [] {
    auto e = testing::complete_edges(4, 1.0);
    auto f = testing::complete_edges(4, 1.0, 4);
    e.insert(e.end(), f.begin(), f.end());
    e.emplace_back(3, 4, 0.05);
    return e;
  }());
  write(box / "bar.csv", matrix_to_csv(m));

  REQUIRE(run(box, "build --matrix '" + box / "bar.csv" + "' --out '" + box / "raw.tsv" + "'") == 0);
  CHECK(read(box / "raw.tsv") == network_to_tsv(build_ssn(m)));

  REQUIRE(run(box, "prune --matrix '" + box / "bar.csv" + "' --out '" + box / "pruned.json" + "' --report '" +
                       box / "spectra.json" + "'") == 0);
  auto spectra = Json::parse(read(box / "spectra.json"));
  CHECK(spectra["converged"] == true);
  CHECK(spectra["fiedler_tolerance"] == 0.05);
  auto pruned = network_from_json(Json::parse(read(box / "pruned.json")));
  CHECK(pruned == prune(build_ssn(m)).pruned);
  CHECK(component_count(pruned) == 2);

  REQUIRE(run(box, "communities --network '" + box / "pruned.json" + "' --matrix '" + box / "bar.csv" + "' --out '" +
                       box / "c.json" + "' --summary '" + box / "c.csv" + "'") == 0);
  auto c = Json::parse(read(box / "c.json"));
  CHECK(c["partition"]["community_count"] == 2);
  CHECK(c["coherence"]["overall_weighted_mean"] == 1.0);
  CHECK(read(box / "c.csv") == "community,size,coherence\n0,4,1\n1,4,1\n");

  CHECK(run(box, "prune --matrix '" + box / "bar.csv" + "' --out x.tsv --alpha-start 2 --alpha-max 1") == 2);
  CHECK(run(box, "prune --matrix '" + box / "bar.csv" + "' --out x.tsv --laplacian odd") == 2);
}

TEST_CASE("compare output and errors") {
  Sandbox box;
  write(box / "m.csv", matrix_to_csv(library_matrix(Measure::Lin)));
  // the binary sees the matrix as printed, not at full precision
  std::ifstream printed(box / "m.csv");
  auto m = matrix_from_csv(printed);
  REQUIRE(run(box, "compare --matrix '" + box / "m.csv" + "'") == 0);
  CHECK(read(box / "stdout") == comparison_csv(compare(m)));
  REQUIRE(run(box, "compare --matrix '" + box / "m.csv" + "' --out '" + box / "c.json" + "'") == 0);
  CHECK(read(box / "c.json") == dump(comparison_to_json(compare(m))));

  write(box / "empty.csv", "");
  CHECK(run(box, "compare --matrix '" + box / "empty.csv" + "'") == 2);
  CHECK(run(box, "build --matrix '" + box / "empty.csv" + "' --out '" + box / "n.tsv" + "'") == 2);
  write(box / "bad.csv", ",a,b\na,1,0.5\nb,0.4,1\n");
  CHECK(run(box, "prune --matrix '" + box / "bad.csv" + "' --out '" + box / "n.tsv" + "'") == 2);
}

TEST_CASE("config file supplies options and flags override it") {
  Sandbox box;
  write(box / "run.toml", "[compute-matrix]\nobo = \"" + fixture("planted.obo") + "\"\ngaf = \"" +
                              fixture("planted.gaf") + "\"\nmeasure = \"Resnik\"\nout = \"" + box / "cfg.csv" +
                              "\"\n");
  REQUIRE(run(box, "--config '" + box / "run.toml" + "' compute-matrix") == 0);
  CHECK(read(box / "cfg.csv") == matrix_to_csv(library_matrix(Measure::Resnik)));

  REQUIRE(run(box, "--config '" + box / "run.toml" + "' compute-matrix --measure JiangConrath") == 0);
  CHECK(read(box / "cfg.csv") == matrix_to_csv(library_matrix(Measure::JiangConrath)));
}

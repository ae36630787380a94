#include "ddim/experiment.hpp"
#include "ddim/generators.hpp"
#include "ddim/io.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <map>
#include <string>

using namespace ddim;
using testing::make_points;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddim_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DDIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> hash_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = sha256_hex(read_file(e.path()));
  }
  return out;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("hashes") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  }

  TEST_CASE("point CSV round trip is exact") {
    const PointSet a = testing::random_points(40, 3, 1, 1e3).relabeled("random, \"quoted\"\nlabel");
    const PointSet b = parse_points_csv(points_csv(a));
    CHECK(b.size() == 40);
    CHECK(b.dim() == 3);
    CHECK((a.points() - b.points()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(b.label() == "random, \"quoted\" label");
    CHECK(format_double(0.1) == "0.10000000000000001");
  }

  TEST_CASE("malformed CSV is rejected") {
    CHECK_THROWS_AS(parse_points_csv(""), InvalidInput);
    CHECK_THROWS_AS(parse_points_csv("1,2\n"), InvalidInput);
    CHECK_THROWS_AS(parse_points_csv("# dim=2 n=2 label=x\n1,2\n"), InvalidInput);
    CHECK_THROWS_AS(parse_points_csv("# dim=2 n=1 label=x\n1,2,3\n"), InvalidInput);
    CHECK_THROWS_AS(parse_points_csv("# dim=2 n=1 label=x\n1,abc\n"), InvalidInput);
    CHECK_THROWS_AS(parse_points_csv("# dim=2 n=1 label=x\n1,nan\n"), InvalidInput);
    try {
      parse_points_csv("# dim=1 n=2 label=x\n1\nzz\n", "f.csv");
      FAIL("no error");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()).find("f.csv:3") != std::string::npos);
    }
  }

  TEST_CASE("family save and load") {
    const fs::path dir = scratch("family");
    const SetFamily f = generate_family({"delone", {{"d", 2}, {"q", {4, 8}}, {"seed", 5}}});
    save_family(f, dir);
    const SetFamily g = load_family(dir);
    CHECK(g.generator_id == "delone");
    CHECK(g.params == f.params);
    CHECK(g.sizes() == f.sizes());
    CHECK(g.growth_values == f.growth_values);
    CHECK((g.members[1].points() - f.members[1].points()).cwiseAbs().maxCoeff() == 0.0);
    const json manifest = json::parse(read_file(dir / "family.json"));
    CHECK(manifest["hashes"][0] == git_blob_hash(read_file(dir / "member_000.csv")));
    CHECK(load_family_or_points(dir / "member_001.csv").sizes() == std::vector<Index>{64});
    CHECK_THROWS_AS(load_family(dir / "missing"), InvalidInput);
    fs::remove_all(dir);
  }

  TEST_CASE("energy table rows carry provenance") {
    const SetFamily f = generate_family({"lattice", {{"d", 2}, {"q", {2, 3}}}});
    const std::vector<double> betas{1.0};
    const std::string table = energy_table_csv(f, energy_curve(f, betas));
    CHECK(table.rfind("N,growth,beta,raw_sum,normalized,scale_invariant_ratio,diameter,input_hash,generator,params\n", 0) == 0);
    CHECK(table.find(git_blob_hash(points_csv(f.members[0]))) != std::string::npos);
    CHECK(table.find(",lattice,") != std::string::npos);
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"x\"") == "\"say \"\"x\"\"\"");
    CHECK(csv_quote("plain") == "plain");
  }

  TEST_CASE("config validation") {
    CHECK_THROWS_AS(parse_experiment_config(json::array()), InvalidInput);
    CHECK_THROWS_AS(parse_experiment_config({{"seed", 1}}), InvalidInput);
    CHECK_THROWS_AS(parse_experiment_config({{"experiment_id", "x"}, {"families", {{"a", {{"generator", "nope"}}}}}}), InvalidInput);
    CHECK_THROWS_AS(parse_experiment_config({{"experiment_id", "x"}, {"pipeline", {{{"op", "energy_curve"}, {"family", "a"}}}}}),
                    InvalidInput);
    CHECK_THROWS_AS(parse_experiment_config({{"experiment_id", "x"}, {"pipeline", {{{"op", "dance"}}}}}), InvalidInput);
    const ExperimentConfig c = parse_experiment_config(json::parse(R"({
      "experiment_id": "x", "seed": 9,
      "families": {"a": {"generator": "delone", "params": {"d": 2, "q": [3]}}}
    })"));
    CHECK(c.families["a"]["params"]["seed"] == 9);
    CHECK(c.raw["tol"] == 0.05);
  }

  TEST_CASE("empty pipeline writes only the manifest files") {
    const fs::path dir = scratch("empty");
    const ExperimentReport r = run_experiment(parse_experiment_config({{"experiment_id", "empty"}, {"output_dir", dir.string()}}));
    CHECK(r.ok);
    CHECK(r.steps.empty());
    const auto files = hash_tree(dir);
    CHECK(files.size() == 3);
    CHECK(files.count("config.json") == 1);
    CHECK(files.count("status.json") == 1);
    CHECK(files.count("summary.md") == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("reruns are byte-identical and failures are per step") {
    const fs::path dir = scratch("rerun");
    const json config = {
        {"experiment_id", "rerun"},
        {"seed", 3},
        {"output_dir", dir.string()},
        {"families",
         {{"lat", {{"generator", "lattice"}, {"params", {{"d", 2}, {"q", {4, 8, 16}}}}}},
          {"bad", {{"generator", "lattice"}, {"params", {{"d", 2}}}}}}},
        {"pipeline",
         {{{"op", "generate"}, {"family", "lat"}},
          {{"op", "energy_curve"}, {"family", "lat"}, {"betas", {0.5, 1.0}}},
          {{"op", "adapt"}, {"family", "lat"}, {"kind", "hausdorff"}, {"alpha", 2.0}},
          {{"op", "distances"}, {"family", "lat"}},
          {{"op", "generate"}, {"family", "bad"}},
          {{"op", "boxcount"}, {"family", "lat"}, {"deltas", {0.5, 0.25, 0.125}}}}},
    };
    const ExperimentReport first = run_experiment(parse_experiment_config(config));
    CHECK(!first.ok);
    REQUIRE(first.steps.size() == 6);
    CHECK(first.steps[3].ok);
    CHECK(!first.steps[4].ok);
    CHECK(first.steps[5].ok);
    const auto h1 = hash_tree(dir);
    fs::remove_all(dir);
    run_experiment(parse_experiment_config(config));
    CHECK(hash_tree(dir) == h1);
    fs::remove_all(dir);
  }

  TEST_CASE("bundled Delone config runs end to end") {
    const fs::path dir = scratch("bundled");
    ExperimentConfig c = load_experiment_config(fs::path(DDIM_CONFIG_DIR) / "delone_energy.json");
    c.output_dir = dir;
    const ExperimentReport r = run_experiment(c);
    CHECK(r.ok);
    REQUIRE(r.steps.size() == 4);
    CHECK(r.steps[2].check.has_value());
    const std::string summary = read_file(dir / "summary.md");
    CHECK(summary.find("Claim checked:") != std::string::npos);
    fs::remove_all(dir);
  }

  TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("--out " + (dir / "lat").string() + " generate lattice --params '{\"d\":2,\"q\":[2,4,8]}'") == 0);
    CHECK(run_cli("generate lattice --params '{\"d\":2}' --out " + dir.string()) == 2);
    CHECK(run_cli("energy --input " + (dir / "lat").string() + " --beta 1 0.5") == 0);
    CHECK(run_cli("adapt --family " + (dir / "lat").string() + " --alpha 2") == 0);
    CHECK(run_cli("dimension --family " + (dir / "lat").string()) == 0);
    CHECK(run_cli("distances --exact --input " + (dir / "lat" / "member_000.csv").string()) == 0);
    CHECK(run_cli("boxcount --input " + (dir / "lat" / "member_002.csv").string() + " --kmin 1 --kmax 4") == 0);
    CHECK(run_cli("fekete --n 3 --budget 200 --restarts 2") == 0);

    write_file(dir / "dup.csv", "# dim=1 n=2 label=dup\n0\n0\n");
    CHECK(run_cli("energy --input " + (dir / "dup.csv").string()) == 3);
    write_file(dir / "bad.csv", "# dim=1 n=2 label=bad\n0\n");
    CHECK(run_cli("energy --input " + (dir / "bad.csv").string()) == 2);
    CHECK(run_cli("--out " + (dir / "big").string() + " generate lattice --params '{\"d\":4,\"q\":[200]}'") == 4);
    fs::remove_all(dir);
  }
}

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace ldnet::cli;

namespace {

const fs::path kConfigs = LDNET_CONFIG_DIR;

fs::path scratchRoot() { return fs::temp_directory_path() / "ldnet_cli_tests"; }

fs::path scratchDir(const std::string& name) {
  const fs::path dir = scratchRoot() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path writeConfig(const std::string& name, const std::string& text) {
  const fs::path path = scratchDir("configs_" + name) / (name + ".json");
  std::ofstream(path) << text;
  return path;
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(ExperimentSpec spec) {
  std::ostringstream out, err;
  Run r;
  r.code = runCommand(spec, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int toolExit(const std::string& args) {
  const std::string cmd = std::string(LDNET_TOOL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("rate-of-consensus on the chain") {
  const fs::path out = scratchDir("roc");
  const Run r = run({.command = "rate-of-consensus", .configPath = kConfigs / "chain_reliable.json", .outDir = out});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("rate of consensus J = 5\n") != std::string::npos);
  CHECK((r.out.find("optimal cut side = {1}") != std::string::npos ||
         r.out.find("optimal cut side = {3}") != std::string::npos));
  CHECK(r.out.find("(agrees)") != std::string::npos);
  CHECK(slurp(out / "rate_of_consensus.txt") == r.out);
}

TEST_CASE("rate-of-consensus edge cases") {
  const fs::path connected = writeConfig("connected", R"({"schema_version": 1,
    "network": {"model": "explicit", "vertices": 3, "support": [{"edges": [[1, 2], [2, 3]], "probability": "1"}]}})");
  const Run inf = run({.command = "rate-of-consensus", .configPath = connected, .outDir = scratchDir("inf")});
  CHECK(inf.code == kExitOk);
  CHECK(inf.out.find("J = infinite") != std::string::npos);

  std::string edges;
  for (int v = 1; v < 25; ++v) edges += (v > 1 ? ", " : "") + ("[" + std::to_string(v) + ", " + std::to_string(v + 1) + "]");
  const fs::path big = writeConfig("big", R"({"schema_version": 1, "network": {"model": "explicit", "vertices": 25,
    "support": [{"edges": [)" + edges + R"(], "probability": "0.5"}, {"edges": [], "probability": "0.5"}]}})");
  const Run refused = run({.command = "rate-of-consensus", .configPath = big, .outDir = scratchDir("big")});
  CHECK(refused.code == kExitValidation);
  CHECK(refused.err.find("24") != std::string::npos);

  const fs::path broken = writeConfig("broken", "{\"schema_version\": 1, \"network\": ");
  CHECK(run({.command = "rate-of-consensus", .configPath = broken, .outDir = scratchDir("broken")}).code == kExitConfig);
  const fs::path noNetwork = writeConfig("nonet", R"({"schema_version": 1})");
  CHECK(run({.command = "rate-of-consensus", .configPath = noNetwork, .outDir = scratchDir("nonet")}).code ==
        kExitConfig);
  CHECK(run({.command = "no-such-command", .configPath = connected}).code == kExitConfig);
}

TEST_CASE("rate-bounds on the chain") {
  const fs::path out = scratchDir("bounds");
  const Run r = run({.command = "rate-bounds", .configPath = kConfigs / "chain_reliable.json", .outDir = out});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("I* region boundaries: I = 0.8333333333333334 and I = 7.5") != std::string::npos);
  CHECK(r.out.find("node 1 target 1: bounds [1.5, 1.5]") != std::string::npos);
  CHECK(r.out.find("0 violations") != std::string::npos);
  const std::string curve = slurp(out / "rate_curve.csv");
  CHECK(curve.rfind("x,I,NI,I_shifted,envelope\n", 0) == 0);
  CHECK(slurp(out / "inaccuracy_rates.csv").find("1,1,I_star,1,5,1.5\n") != std::string::npos);
}

TEST_CASE("simulate reruns are byte-identical") {
  ExperimentSpec spec{.command = "simulate",
                      .configPath = kConfigs / "alternating_random.json",
                      .outDir = scratchDir("sim_a"),
                      .seed = 99,
                      .trajectories = 4000,
                      .horizon = 15};
  const Run a = run(spec);
  spec.outDir = scratchDir("sim_b");
  const Run b = run(spec);
  CHECK(a.out == b.out);
  CHECK((a.code == kExitOk || a.code == kExitValidation));
  CHECK(a.code == b.code);
  for (const char* file : {"trajectories.csv", "comparison.csv"}) {
    const std::string fa = slurp(scratchRoot() / "sim_a" / file);
    CHECK_FALSE(fa.empty());
    CHECK(fa == slurp(scratchRoot() / "sim_b" / file));
  }
  spec.seed = 100;
  spec.outDir = scratchDir("sim_c");
  run(spec);
  CHECK(slurp(spec.outDir / "trajectories.csv") !=
        slurp(scratchRoot() / "sim_a" / "trajectories.csv"));
}

TEST_CASE("social-learning report") {
  const fs::path out = scratchDir("sl");
  const Run r = run({.command = "social-learning",
                     .configPath = kConfigs / "social_two_hyp.json",
                     .outDir = out,
                     .trajectories = 40});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("equivalence with consensus+innovations: PASS") != std::string::npos);
  CHECK(r.out.find("reconstruction identity: PASS") != std::string::npos);
  CHECK(slurp(out / "belief_rate.csv").find("\n1,1,-2,0,0\n") != std::string::npos);
}

TEST_CASE("envelope-dump with oracle") {
  const fs::path out = scratchDir("env");
  const Run r = run({.command = "envelope-dump", .configPath = kConfigs / "envelope_chain.json", .outDir = out});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("tangency constant c = 0.8333333333333334") != std::string::npos);
  CHECK(fs::exists(out / "envelope.csv"));
}

TEST_CASE("overrides") {
  const Run r = run({.command = "rate-of-consensus",
                     .configPath = kConfigs / "chain_reliable.json",
                     .outDir = scratchDir("override"),
                     .overrides = {"network={\"model\":\"iid_failures\",\"vertices\":3,\"edges\":[[1,2],[2,3]],"
                                   "\"fail_probability\":\"0.5\"}"}});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("J = 0.6931471805599453") != std::string::npos);
  CHECK(run({.command = "rate-of-consensus",
             .configPath = kConfigs / "chain_reliable.json",
             .outDir = scratchDir("override_bad"),
             .overrides = {"no_equals_sign"}})
            .code == kExitConfig);
}

TEST_CASE("tool exit codes") {
  CHECK(toolExit("") == kExitConfig);
  CHECK(toolExit("rate-of-consensus --config /nonexistent.json") == kExitConfig);
  CHECK(toolExit("rate-of-consensus --config " + (kConfigs / "chain_reliable.json").string() + " --out " +
                 scratchDir("tool").string()) == kExitOk);
  CHECK(toolExit("--help") == kExitOk);
}

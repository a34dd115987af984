#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "homolab/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = homolab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("homolab-cli-" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kTriangle = "alpha: 0.5\ndim: 2\nmasses: [1, 1, 1]\n";

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"simulate", "/nonexistent.yaml", "--t-end", "1"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  const Result r = run({"scan"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "usage");
}

TEST_CASE("config errors are single-line json with a line number") {
  Scratch tmp;
  const auto cfg = tmp.write("bad.yaml", "alpha: 0.5\ndim: 2\nmasses: [1, -1]\n");
  const Result r = run({"simulate", cfg, "--t-end", "1"});
  CHECK(r.code == 1);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  const json e = json::parse(r.err);
  CHECK(e["error"] == "config");
  CHECK(e["message"].get<std::string>().find("bad.yaml:3:") != std::string::npos);
}

TEST_CASE("central configuration, orbit and round trip") {
  Scratch tmp;
  const auto tri = tmp.write("tri.yaml", kTriangle);
  const auto cc = tmp.path("cc.json");
  REQUIRE(run({"central-config", tri, "--seed-kind", "equilateral", "--out", cc}).code == 0);
  const json doc = json::parse(slurp(cc));
  CHECK(doc["lambda"].get<double>() == doctest::Approx(3.0));
  CHECK(doc["residual_norm"].get<double>() <= 1e-12);

  for (const std::string mode : {"circular", "elliptic", "homothetic"}) {
    CAPTURE(mode);
    const auto orbit = tmp.path(mode + ".json");
    REQUIRE(run({"make-orbit", cc, "--mode", mode, "--out", orbit}).code == 0);
    const auto simulated = tmp.path(mode + "-sim.csv");
    const auto verified = tmp.path(mode + "-verify.csv");
    CHECK(run({"simulate", orbit, "--t-end", "3", "--out", simulated}).code == 0);
    const Result v = run({"verify", cc, "--mode", mode, "--t-end", "3", "--trajectory-out", verified});
    CHECK(v.code == 0);
    CHECK(slurp(simulated) == slurp(verified));
    CHECK_FALSE(slurp(simulated).empty());
  }
}

TEST_CASE("verify circular orbit") {
  Scratch tmp;
  const auto tri = tmp.write("tri.yaml", kTriangle);
  const auto cc = tmp.path("cc.json");
  REQUIRE(run({"central-config", tri, "--seed-kind", "equilateral", "--out", cc}).code == 0);
  const Result r = run({"verify", cc, "--mode", "circular", "--t-end", "10"});
  CHECK(r.code == 0);
  const json report = json::parse(r.out);
  CHECK(report["measure_variation"].get<double>() <= 1e-9);
  CHECK(report["verdict"] == "consistent");
  CHECK(report["termination"] == "completed");

  CHECK(run({"make-orbit", tri, "--mode", "circular"}).code == 1);
  CHECK(run({"make-orbit", cc, "--mode", "homothetic", "--theta-dot-scale", "0.5"}).code == 1);
  CHECK(run({"make-orbit", cc, "--mode", "elliptic", "--theta-dot-scale", "0"}).code == 1);
  CHECK(run({"make-orbit", cc, "--mode", "spiral"}).code == 1);
}

TEST_CASE("verify and simulate on plain configurations") {
  Scratch tmp;
  const auto cfg = tmp.write("drop.yaml", "alpha: 0.5\ndim: 2\nmasses: [1, 1]\npositions: [[-0.5, 0], [0.5, 0]]\n");
  const Result v = run({"verify", cfg, "--t-end", "5"});
  CHECK(v.code == 0);
  CHECK(json::parse(v.out)["termination"] == "collision");
  CHECK(run({"simulate", cfg, "--t-end", "5"}).code == 0);
  const auto hit = tmp.write("hit.yaml", "alpha: 0.5\ndim: 2\nmasses: [1, 1]\npositions: [[0, 0], [0, 0]]\n");
  CHECK(run({"simulate", hit, "--t-end", "1"}).code == 3);
  const auto nopos = tmp.write("nopos.yaml", kTriangle);
  CHECK(run({"simulate", nopos, "--t-end", "1"}).code == 1);
}

TEST_CASE("identity check") {
  Scratch tmp;
  const auto cfg = tmp.write("four.yaml", "alpha: 1.3\ndim: 3\nmasses: [1, 2, 3, 4]\n");
  const Result r = run({"identity-check", cfg, "--random", "100", "--seed", "7"});
  CHECK(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc["max_residual"].get<double>() <= 1e-12);
  CHECK(doc["states"] == 100);
  CHECK(doc["pair_count"] == 6);

  const auto one = tmp.write("one.yaml", "alpha: 0.5\ndim: 2\nmasses: [1, 1]\npositions: [[0, 0], [1, 0]]\n");
  const Result single = run({"identity-check", one});
  CHECK(single.code == 0);
  CHECK(json::parse(single.out)["direct"].get<double>() == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("scan is deterministic across runs and worker counts") {
  Scratch tmp;
  const auto cfg = tmp.write("tri.yaml", kTriangle);
  const auto a = tmp.path("a.jsonl");
  const auto b = tmp.path("b.jsonl");
  REQUIRE(run({"scan", cfg, "--samples", "12", "--seed", "42", "--t-end", "2", "--out", a}).code == 0);
  REQUIRE(run({"scan", cfg, "--samples", "12", "--seed", "42", "--t-end", "2", "--jobs", "3", "--out", b}).code == 0);
  CHECK(slurp(a) == slurp(b));
  std::istringstream lines(slurp(a));
  std::string line;
  std::size_t count = 0;
  json last;
  while (std::getline(lines, line)) {
    last = json::parse(line);
    ++count;
  }
  CHECK(count == 13);
  CHECK(last["summary"]["violations"] == 0);
}

TEST_CASE("log level comes from the environment") {
  Scratch tmp;
  const auto tri = tmp.write("tri.yaml", kTriangle);
  const std::string base = std::string(HOMOLAB_CLI_PATH) + " central-config " + tri + " --seed-kind equilateral";
  auto stderr_of = [&](const std::string& env) {
    const std::string cmd = env + " " + base + " 2>&1 >/dev/null";
    std::string captured;
    if (FILE* pipe = ::popen(cmd.c_str(), "r")) {
      char buf[256];
      while (std::fgets(buf, sizeof buf, pipe)) captured += buf;
      ::pclose(pipe);
    }
    return captured;
  };
  CHECK(stderr_of("HOMOLAB_LOG=error").empty());
  CHECK(stderr_of("HOMOLAB_LOG=info").find("residual") != std::string::npos);
}

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path workdir() {
  const char* env = std::getenv("GKS_TEST_WORKDIR");
  static const fs::path dir = [&] {
    fs::path d = env ? fs::path(env) : fs::temp_directory_path() / "gks-cli-test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + workdir().string() + "' && " + env + " '" GKS_CLI_PATH "' " + args + " >>cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json manifest(const std::string& out, const std::string& command) {
  return json::parse(slurp(workdir() / out / (command + ".manifest.json")));
}

void ensure_wave() {
  static const bool done = run("--out base profile --omega 0.126") == 0;
  REQUIRE(done);
}

}  // namespace

TEST_CASE("profile writes a wave, an orbit plot and a manifest") {
  ensure_wave();
  CHECK(fs::exists(workdir() / "base" / "wave.json"));
  CHECK(fs::exists(workdir() / "base" / "orbit.svg"));
  const json m = manifest("base", "profile");
  CHECK(m.at("command") == "profile");
  CHECK(m.at("resolved").at("omega") == "0.126");
}

TEST_CASE("exit codes") {
  CHECK(run("--out e profile --delta 0") == 1);
  CHECK(run("--out e profile --no-such-flag") == 2);
  CHECK(run("--out e spectrum") == 2);
  CHECK(run("--out e") == 2);
  CHECK(run("--out e continue --from base/wave.json --omega-range 0.1:0.2") == 2);
  CHECK(run("--out e spectrum --wave does-not-exist.json") == 1);
  CHECK(run("--help") == 0);
}

TEST_CASE("config file values yield to flags") {
  {
    std::ofstream cfg(workdir() / "run.cfg");
    cfg << "# profile settings\nomega = 0.125\nepsilon = 0.2\nout = cfg-out\n";
  }
  CHECK(run("--config run.cfg profile --omega 0.128") == 0);
  const json m = manifest("cfg-out", "profile");
  CHECK(m["resolved"]["omega"] == "0.128");
  CHECK(m["resolved"]["epsilon"] == "0.2");
  {
    std::ofstream cfg(workdir() / "bad.cfg");
    cfg << "omega 0.125\n";
  }
  CHECK(run("--config bad.cfg profile") == 2);
}

TEST_CASE("output directory defaults to the environment variable") {
  CHECK(run("profile --omega 0.126", "GKS_OUTPUT_DIR=env-out") == 0);
  CHECK(fs::exists(workdir() / "env-out" / "wave.json"));
}

TEST_CASE("spectrum output is deterministic") {
  ensure_wave();
  REQUIRE(run("--out s1 spectrum --wave base/wave.json --nxi 16 --ncluster 4") == 0);
  REQUIRE(run("--out s2 spectrum --wave base/wave.json --nxi 16 --ncluster 4") == 0);
  const std::string a = slurp(workdir() / "s1" / "spectrum.csv");
  CHECK(a.size() > 100);
  CHECK(a == slurp(workdir() / "s2" / "spectrum.csv"));
  const json v = json::parse(slurp(workdir() / "s1" / "verdict.json"));
  CHECK(v.at("stable") == true);
  CHECK(fs::exists(workdir() / "s1" / "spectrum.svg"));
}

TEST_CASE("rerunning from a manifest reproduces the artifacts") {
  ensure_wave();
  REQUIRE(run("--out m1 spectrum --wave base/wave.json --nxi 16 --ncluster 4 --nhill 40") == 0);
  REQUIRE(run("--out m2 --config m1/spectrum.manifest.json spectrum") == 0);
  CHECK(slurp(workdir() / "m1" / "spectrum.csv") == slurp(workdir() / "m2" / "spectrum.csv"));
  CHECK(manifest("m2", "spectrum")["resolved"]["nhill"] == "40");
}

TEST_CASE("family, band, whitham and report") {
  ensure_wave();
  REQUIRE(run("--out fam continue --from base/wave.json --omega-range 0.1245:0.1275:3 --c-range -0.01:0.01:3") == 0);
  REQUIRE(run("--out fam band --family fam/family --nxi 16 --ncluster 4 --panels 2") == 0);
  const json band = json::parse(slurp(workdir() / "fam" / "band.json"));
  CHECK(band.at("nodes").size() == 9);
  REQUIRE(run("--out fam whitham --family fam/family --nxi 16 --ncluster 4") == 0);
  const json w = json::parse(slurp(workdir() / "fam" / "whitham_report.json"));
  CHECK(w.at("nodes").size() == 1);
  CHECK(w.at("agreement") == true);
  CHECK(fs::exists(workdir() / "fam" / "whitham.csv"));
  REQUIRE(run("--out fam report") == 0);
  const std::string html = slurp(workdir() / "fam" / "report.html");
  CHECK(html.find("<svg") != std::string::npos);
}

TEST_CASE("short evolution") {
  ensure_wave();
  REQUIRE(run("--out ev evolve --wave base/wave.json --periods 8 --T 10 --snapshots 5 --t-fit 1") == 0);
  const json r = json::parse(slurp(workdir() / "ev" / "evolve_report.json"));
  CHECK(r.at("simulation").at("n_periods") == 8);
  CHECK(r.at("perturbation").at("Linf") == doctest::Approx(1e-2));
  for (const char* f : {"timeseries.csv", "psi_x.svg", "decay.svg"}) CHECK(fs::exists(workdir() / "ev" / f));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "wavefreeze_test_cli";

int cli(const std::string& args) {
  const std::string cmd = std::string(WAVEFREEZE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("exit codes") {
  fs::remove_all(kOut);
  const std::string out = " -o " + kOut.string();
  CHECK(cli("--help") == 0);
  CHECK(cli("--version") == 0);
  CHECK(cli("speed --preset ex-linini" + out) == 0);
  CHECK(cli("speed" + out) == 2);
  CHECK(cli("plot --preset ex-linini" + out) == 2);
  CHECK(cli("speed --preset ex-missing" + out) == 2);
  CHECK(cli("speed --config " + (kOut / "absent.cfg").string() + out) == 2);
  CHECK(cli("speed --preset ex-linini -s reaction.beta=1" + out) == 2);
  CHECK(cli("evolve --preset ex-linini -s grid.M=4" + out) == 2);
  CHECK(cli("stationary --preset ex-linini -s stationary.r=1000" + out) == 4);
  CHECK(cli("evolve --preset ex-linini -s time.T=0" + out) == 0);
  CHECK(fs::exists(kOut / "summary.json"));
  fs::remove_all(kOut);
}

TEST_CASE("config file and overrides") {
  fs::remove_all(kOut);
  fs::create_directories(kOut);
  std::ofstream(kOut / "run.cfg") << "reaction.alpha = 0.3\nspeed.tol = 1e-9\n";
  CHECK(cli("speed --config " + (kOut / "run.cfg").string() + " -o " + (kOut / "a").string()) == 0);
  CHECK(slurp(kOut / "a" / "summary.json").find("\"reaction.alpha\": \"0.3\"") != std::string::npos);
  CHECK(cli("speed --preset ex-linini --config " + (kOut / "run.cfg").string() + " -s reaction.alpha=0.4 -o " +
            (kOut / "b").string()) == 0);
  CHECK(slurp(kOut / "b" / "summary.json").find("\"reaction.alpha\": \"0.4\"") != std::string::npos);
  fs::remove_all(kOut);
}

TEST_CASE("reruns write identical csv files") {
  fs::remove_all(kOut);
  for (const char* run : {"a", "b"}) {
    REQUIRE(cli("evolve --preset ex-kt -s time.T=30 -s grid.J=20 -o " + (kOut / run).string()) == 0);
    REQUIRE(cli("stationary --preset ex-linini -s stationary.r=20 -o " + (kOut / run / "st").string()) == 0);
  }
  for (const char* f : {"evolve.csv", "profile_final.csv", "st/profile.csv"}) {
    const auto a = slurp(kOut / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(kOut / "b" / f));
  }
  fs::remove_all(kOut);
}

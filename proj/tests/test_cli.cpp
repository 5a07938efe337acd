#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "eoilp/logic.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(EOILP_CLI) + " " + args + " 2>/dev/null";
  Result r{-1, {}};
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const fs::path kTmp = fs::temp_directory_path() / "eoilp_cli_test";
const std::string kData = EOILP_DATA_DIR;

}  // namespace

TEST_CASE("simulate exit codes") {
  const auto ok = run("simulate");
  CHECK(ok.code == 0);
  CHECK(lines(ok.out) == 2);
  CHECK(run("simulate --config " + kData + "/configs/no_cooling_flowsheet.txt").code == 2);
  CHECK(run("simulate --config /nonexistent/flowsheet.txt").code == 1);
  CHECK(run("simulate --mode sideways").code == 1);
  const auto dyn = run("simulate --mode dynamic --perturbation " + kData + "/perturbations/heat_exchanger_fouling.csv --seed 3");
  CHECK(dyn.code == 0);
  CHECK(lines(dyn.out) == 13);
  CHECK(run("--help").code == 0);
  CHECK(run("").code == 1);
}

TEST_CASE("gen-data, learn, eval and sweep") {
  fs::create_directories(kTmp);
  const auto ds = (kTmp / "nominal.csv").string();
  CHECK(run("gen-data --experiments nominal --runs 2 --mode static --out " + ds).code == 0);
  CHECK(lines(slurp(ds)) == 3);

  const auto dyn = (kTmp / "six.csv").string();
  REQUIRE(run("gen-data --manifest " + kData + "/configs/campaign_nontrivial6.txt --runs 10 --out " + dyn).code == 0);
  const auto hyp = (kTmp / "h.txt").string();
  const auto split = (kTmp / "split.csv").string();
  CHECK(run("learn --data " + dyn + " --set n_runs=10 --seed 4 --out " + hyp + " --split-out " + split +
            " --las-out " + (kTmp / "t.las").string() + " --score-out " + (kTmp / "s.json").string())
            .code == 0);
  const auto text = slurp(hyp);
  CHECK_FALSE(text.empty());
  std::string again;
  for (const auto& r : eoilp::logic::parse_program(text)) again += eoilp::logic::to_string(r) + "\n";
  CHECK(again == text);
  CHECK(slurp(split).rfind("failure,run_index,subset", 0) == 0);

  const auto rep = run("eval --data " + dyn + " --set n_runs=10 --seed 4 --hypothesis " + hyp + " --split-out " +
                       (kTmp / "split2.csv").string());
  CHECK(rep.code == 0);
  CHECK(rep.out.find("min_auc") != std::string::npos);
  CHECK(slurp(kTmp / "split2.csv") == slurp(split));

  CHECK(run("learn --data " + dyn + " --set colour=red").code == 1);
  CHECK(run("learn --data " + dyn + " --set task=static").code == 1);
  CHECK(run("learn --data " + dyn + " --set t_short_term=7").code == 2);
  CHECK(run("learn --data " + dyn + " --set proc_vars=all --set max_body_len=5").code == 2);

  const auto ten = (kTmp / "ten.csv").string();
  REQUIRE(run("gen-data --experiments all --runs 6 --mode dynamic --seed 2 --out " + ten).code == 0);
  const auto sweep = run("sweep --standard --data " + ten + " --csv " + (kTmp / "sweep.csv").string());
  CHECK(sweep.code == 0);
  CHECK(lines(slurp(kTmp / "sweep.csv")) == 17);
  fs::remove_all(kTmp);
}

TEST_CASE("catalog and defaults") {
  const auto c = run("catalog");
  CHECK(c.code == 0);
  CHECK(lines(c.out) == 15);
  CHECK(run("defaults params").out.find("t_short_term = 6") != std::string::npos);
  CHECK(run("defaults flowsheet").out == slurp(kData + "/configs/nominal_flowsheet.txt"));
  for (const auto& e : fs::directory_iterator(kData + "/perturbations"))
    CHECK(run("simulate --perturbation " + e.path().string()).code == 0);
}

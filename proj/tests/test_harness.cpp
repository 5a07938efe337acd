#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "eoilp/campaign.hpp"
#include "eoilp/dataset.hpp"
#include "eoilp/perturbation.hpp"
#include "eoilp/text_config.hpp"

using namespace eoilp;
using namespace eoilp::harness;

namespace {

const char* kHeader = "param,unit,default,min,max,instr\n";

CampaignSpec small_spec(const std::string& set, std::size_t runs, Mode mode) {
  CampaignSpec s;
  s.experiments = experiment_set(set);
  s.n_runs = runs;
  s.mode = mode;
  s.master_seed = 42;
  return s;
}

}  // namespace

TEST_CASE("perturbation rows") {
  const auto f = parse_perturbation_file(std::string(kHeader) + "SRCR1.P,bar,2,1.6,1.98,uniform\n");
  REQUIRE(f.rows.size() == 1);
  CHECK(f.rows[0].uniform);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto a = apply_perturbation(f, sim::FlowsheetConfig{}, rng);
    CHECK(a.config.source.pressure_bar >= 1.6);
    CHECK(a.config.source.pressure_bar <= 1.98);
    REQUIRE(a.perturbed_vars.size() == 1);
    CHECK(a.perturbed_vars[0] == sim::Var::srcr1_p);
  }

  const auto stuck = parse_perturbation_file(std::string(kHeader) +
                                             "XC1.SP,bool,uncheck,,,\nXC1.OP,bool,check,,,\nXC1.OP,fraction,0,0,0,\n");
  const auto a = apply_perturbation(stuck, sim::FlowsheetConfig{}, rng);
  REQUIRE(a.config.heat_exchanger.controller.manual_output);
  CHECK(*a.config.heat_exchanger.controller.manual_output == 0.0);

  const auto empty = parse_perturbation_file("");
  CHECK(empty.rows.empty());
  const auto none = apply_perturbation(empty, sim::FlowsheetConfig{}, rng);
  CHECK(sim::print_flowsheet(none.config) == sim::print_flowsheet(sim::FlowsheetConfig{}));

  CHECK_THROWS_AS(parse_perturbation_file(std::string(kHeader) + "NOPE.X,bar,1,,,\n"), PerturbationError);
  CHECK_THROWS_AS(parse_perturbation_file(std::string(kHeader) + "SRCR1.P,bar,2,1.9,1.6,uniform\n"),
                  PerturbationError);
  try {
    parse_perturbation_file(std::string(kHeader) + "SRCR1.P,bar,2,1.6,1.98,uniform\nSRCR1.P,kelvin,2,,,\n");
    FAIL("expected a unit error");
  } catch (const PerturbationError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("catalog files parse and print stably") {
  CHECK(catalog().size() == 15);
  for (const auto& e : catalog()) {
    const auto f = parse_perturbation_file(e.text);
    CHECK(parse_perturbation_file(print_perturbation_file(f)).rows.size() == f.rows.size());
  }
  CHECK(experiment_set("trivial4").size() == 5);
  CHECK(experiment_set("nontrivial6").size() == 7);
  CHECK(experiment_set("nontrivial10").size() == 11);
  CHECK(experiment_set("nominal").size() == 1);
  CHECK(experiment_set("all").size() == 15);
  CHECK(experiment_set("heatExchanger:fouling").size() == 1);
  CHECK_THROWS(experiment_set("nosuch"));
}

TEST_CASE("seed derivation") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(run_seed(1, 0, 0, 0) != run_seed(1, 0, 1, 0));
  CHECK(run_seed(1, 0, 0, 0) != run_seed(1, 0, 0, 1));
  CHECK(run_seed(1, 2, 3, 0) == run_seed(1, 2, 3, 0));
}

TEST_CASE("static campaign row counts") {
  auto s = small_spec("nominal", 1, Mode::Static);
  const auto one = run_campaign(s);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].failure == "null");
  CHECK(one.columns() == 27);

  s = small_spec("nontrivial6", 125, Mode::Static);
  s.workers = 0;
  CampaignStats st;
  const auto d = run_campaign(s, &st);
  CHECK(d.rows.size() == 875);
  CHECK(st.runs == 875);
  CHECK(st.sentinels == 0);
}

TEST_CASE("dynamic campaign layout and determinism") {
  auto s = small_spec("trivial4", 3, Mode::Dynamic);
  s.workers = 1;
  const auto a = format_dataset(run_campaign(s));
  s.workers = 8;
  const auto b = format_dataset(run_campaign(s));
  CHECK(a == b);
  const auto d = parse_dataset(a);
  CHECK(d.columns() == 28);
  CHECK(d.rows.size() == 5 * 3 * 12);
  CHECK(d.rows[0].timepoint == 0.0);
}

TEST_CASE("dataset header and round trip") {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  };
  const std::string vars =
      "srcr1_p,srcr1_t,m2_pv,k1_p1,k1_p2,e2_tti,e2_tsi,m1_pv,r1_t2,snk1_p,snk1_t,r1_tau,r1_xmax,snk1_z_c2h4o,"
      "fc_op,fc_sp,xc1_op,xc1_sp,cw_out_op,k1_power,e2_duty,e2_tso,r1_z_c2h4_in,snk1_z_c2h4,srcr1_inv";
  CHECK(join(dataset_header(Mode::Dynamic)) == "failure,run_index,timepoint," + vars);
  CHECK(join(dataset_header(Mode::Static)) == "failure,run_index," + vars);
  CHECK(dataset_header(Mode::Dynamic).size() == 28);

  auto s = small_spec("trivial4", 2, Mode::Dynamic);
  auto d = run_campaign(s);
  d.rows.push_back({"null", 99, 0.0, {}});
  d.rows.back().values.values.fill(std::nan(""));
  const auto text = format_dataset(d);
  const auto back = parse_dataset(text);
  CHECK(format_dataset(back) == text);
  CHECK(back.rows.back().sentinel());
  CHECK_FALSE(back.rows.front().sentinel());

  const auto dir = std::filesystem::temp_directory_path() / "eoilp_test_ds.csv";
  write_dataset(d, dir.string());
  CHECK(format_dataset(read_dataset(dir.string())) == text);
  std::filesystem::remove(dir);
}

TEST_CASE("dataset errors carry positions") {
  std::string header;
  for (const auto& c : dataset_header(Mode::Static)) header += (header.empty() ? "" : ",") + c;
  try {
    parse_dataset(header + "\nnull,0,1\n");
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_dataset("failure,run_index\n"), DatasetError);
}

TEST_CASE("manifest") {
  const auto dir = std::string(EOILP_DATA_DIR) + "/configs";
  const auto spec = parse_manifest(config::read_file(dir + "/campaign_custom_file.txt"), dir);
  CHECK(spec.mode == Mode::Dynamic);
  CHECK(spec.n_runs == 20);
  REQUIRE(spec.experiments.size() == 2);
  CHECK(spec.experiments[1].name == "source:lowPressureFromFile");
  CHECK(spec.experiments[1].trivial);
  const auto six = parse_manifest(config::read_file(dir + "/campaign_nontrivial6.txt"), dir);
  CHECK(six.experiments.size() == 7);
  CHECK_THROWS_AS(parse_manifest("mode = static\nexperiments = nominal\ncolour = red\n"), config::ConfigError);
  CHECK_THROWS_AS(parse_manifest("mode = static\n"), config::ConfigError);
}

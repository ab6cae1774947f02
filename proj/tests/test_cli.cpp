#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "support/synthetic.hpp"
#include "utcimap/app.hpp"

using namespace utcimap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("utcimap_cli_" + name); }

int cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string{UTCIMAP_CLI} + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) { return text::read_file(p); }

json baci_block() {
  return json{{"baci",
               {{"case_station", "onsite"},
                {"control_station", "ctrl"},
                {"parameter", "t_air"},
                {"before", {{"start", "2019-07-25T00:00:00"}, {"end", "2019-07-25T23:59:59"}}},
                {"after", {{"start", "2020-07-23T00:00:00"}, {"end", "2020-07-23T23:59:59"}}},
                {"bootstrap_n", 500}}}};
}

}  // namespace

TEST(CheckDay, AcceptedDay) {
  const auto run = synth::write_run(scratch("check_ok"), {synth::default_campaign()});
  EXPECT_EQ(cli("check-day -c " + run.config.string() + " --date 2019-07-25", run.dir), app::kExitOk);
  const auto out = slurp(run.dir / "stdout.txt");
  EXPECT_NE(out.find("accepted"), std::string::npos);
  EXPECT_NE(out.find("A"), std::string::npos);
}

TEST(CheckDay, CloudyDayIsRejected) {
  const auto run = synth::write_run(scratch("check_cloudy"), {synth::default_campaign()},
                                    json{{"days", {{"2019-07-25", {{"cloud_cover_oktas", 6}}}}}});
  EXPECT_EQ(cli("check-day -c " + run.config.string() + " --date 2019-07-25", run.dir), app::kExitRejected);
  EXPECT_NE(slurp(run.dir / "stdout.txt").find("cloud_cover"), std::string::npos);
}

TEST(CheckDay, MissingDataAndBadInput) {
  const auto run = synth::write_run(scratch("check_missing"), {synth::default_campaign()});
  EXPECT_EQ(cli("check-day -c " + run.config.string() + " --date 2019-08-02", run.dir), app::kExitDataMissing);
  EXPECT_EQ(cli("check-day -c " + run.config.string() + " --date 2019-13-02", run.dir), app::kExitInvalidInput);
  EXPECT_EQ(cli("check-day -c " + (run.dir / "nope.json").string() + " --date 2019-07-25", run.dir),
            app::kExitInvalidInput);
  EXPECT_EQ(cli("frobnicate", run.dir), app::kExitInvalidInput);
}

TEST(Config, UnknownKeysAndPathsAreRejected) {
  const auto run = synth::write_run(scratch("config"), {synth::default_campaign()}, json{{"colour", "blue"}});
  EXPECT_THROW(app::load_run_config(run.config), ConfigError);
  const auto run2 = synth::write_run(scratch("config2"), {synth::default_campaign()},
                                     json{{"campaigns", {{"before", {{"plan", "plans/missing.json"}}}}}});
  EXPECT_THROW(app::load_run_config(run2.config), ConfigError);
}

TEST(Process, WritesPointOutputs) {
  const auto run = synth::write_run(scratch("process"), {synth::default_campaign()}, json::object(), true);
  EXPECT_EQ(cli("process -c " + run.config.string() + " --campaign before", run.dir), app::kExitOk)
      << slurp(run.dir / "stderr.txt");
  const auto out = run.dir / "out";
  const auto gj = json::parse(slurp(out / "before_points.geojson"));
  ASSERT_EQ(gj["features"].size(), 8u);
  for (const auto& f : gj["features"]) {
    EXPECT_TRUE(f["properties"].contains("offset_c"));
    EXPECT_TRUE(f["properties"]["ucp"].is_number());
  }
  EXPECT_TRUE(fs::exists(out / "before_points.csv"));
  EXPECT_TRUE(fs::exists(out / "before_points.svg"));
  const auto rep = json::parse(slurp(out / "before_report.json"));
  EXPECT_EQ(rep["points_ok"], 8);
  EXPECT_NE(slurp(run.dir / "stdout.txt").find("drift: stable"), std::string::npos);
}

TEST(Process, DriftingOnsiteStationExitsThree) {
  synth::CampaignSpec spec;
  spec.onsite_drift_c_per_h = 1.5;
  const auto run = synth::write_run(scratch("drift"), {synth::make_campaign(synth::golden_points(), spec)});
  EXPECT_EQ(cli("process -c " + run.config.string() + " --campaign before", run.dir), app::kExitDrift);
  EXPECT_TRUE(fs::exists(run.dir / "out" / "before_points.csv"));
  EXPECT_EQ(cli("process -c " + run.config.string() + " --campaign before --allow-drift", run.dir), app::kExitOk);
}

TEST(Process, RejectedDayAndOverride) {
  const auto run = synth::write_run(scratch("rejected"), {synth::default_campaign()},
                                    json{{"days", {{"2019-07-25", {{"cloud_cover_oktas", 7}}}}}});
  EXPECT_EQ(cli("process -c " + run.config.string() + " --campaign before", run.dir), app::kExitRejected);
  EXPECT_FALSE(fs::exists(run.dir / "out" / "before_points.csv"));
  EXPECT_EQ(cli("process -c " + run.config.string() + " --campaign before --override-day-filter", run.dir),
            app::kExitOk);
  EXPECT_EQ(json::parse(slurp(run.dir / "out" / "before_report.json"))["day_filter"]["overridden"], true);
}

TEST(Process, UnknownCampaign) {
  const auto run = synth::write_run(scratch("unknown"), {synth::default_campaign()});
  EXPECT_EQ(cli("process -c " + run.config.string() + " --campaign nope", run.dir), app::kExitInvalidInput);
}

TEST(Compare, IdenticalCampaignsGiveZeroDeltas) {
  const auto run = synth::write_run(scratch("compare_same"), {synth::default_campaign()});
  const auto cfg = app::load_run_config(run.config);
  std::ostringstream out, log;
  ASSERT_EQ(app::run_process(cfg, "before", {}, out, log), app::kExitOk) << log.str();
  ASSERT_EQ(app::run_compare(cfg, "before", "before", out, log), app::kExitOk) << log.str();
  const auto rep = json::parse(slurp(run.dir / "out" / "before_vs_before_compare.json"));
  ASSERT_EQ(rep["points"].size(), 8u);
  for (const auto& p : rep["points"]) EXPECT_EQ(p["delta_c"].get<double>(), 0.0);
  EXPECT_TRUE(rep["baci"].is_null());
  EXPECT_FALSE(rep.contains("correlation"));
  EXPECT_FALSE(fs::exists(run.dir / "out" / "before_vs_before_scatter.svg"));
}

TEST(Compare, AfterPhaseDeltasAndBaci) {
  const auto run = synth::write_run(scratch("compare_after"), {synth::default_campaign(), synth::after_campaign()},
                                    baci_block(), true);
  const auto cfg = app::load_run_config(run.config);
  std::ostringstream out, log;
  ASSERT_EQ(app::run_process(cfg, "before", {}, out, log), app::kExitOk) << log.str();
  ASSERT_EQ(app::run_process(cfg, "after", {}, out, log), app::kExitOk) << log.str();
  EXPECT_EQ(cli("compare -c " + run.config.string() + " --before before --after after", run.dir), app::kExitOk)
      << slurp(run.dir / "stderr.txt");
  const auto rep = json::parse(slurp(run.dir / "out" / "before_vs_after_compare.json"));
  ASSERT_EQ(rep["points"].size(), 8u);
  for (const auto& p : rep["points"]) EXPECT_NEAR(p["delta_c"].get<double>(), -2.0, 0.3) << p["point_id"];
  EXPECT_EQ(rep["points"][7]["point_id"], "P8b");
  EXPECT_EQ(rep["points"][7]["before_point_id"], "P8");
  EXPECT_TRUE(rep["unmatched_before"].empty());
  EXPECT_NEAR(rep["baci"]["effect_c"].get<double>(), 0.0, 1e-9);
  EXPECT_LE(rep["baci"]["ci_low_c"].get<double>(), 0.0);
  EXPECT_GE(rep["baci"]["ci_high_c"].get<double>(), 0.0);
  EXPECT_EQ(rep["correlation"]["n"], 16);
  EXPECT_TRUE(rep["correlation"]["spearman_rho"].is_number());
  EXPECT_TRUE(fs::exists(run.dir / "out" / "before_vs_after_scatter.svg"));
  EXPECT_TRUE(fs::exists(run.dir / "out" / "before_vs_after_scatter.csv"));
}

TEST(Compare, MissingPointResults) {
  const auto run = synth::write_run(scratch("compare_missing"), {synth::default_campaign()});
  EXPECT_EQ(cli("compare -c " + run.config.string() + " --before before --after after", run.dir),
            app::kExitDataMissing);
}

TEST(Ucp, WritesUnitIntervalGrid) {
  const auto run = synth::write_run(scratch("ucp"), {synth::default_campaign()}, json::object(), true);
  EXPECT_EQ(cli("ucp -c " + run.config.string(), run.dir), app::kExitOk) << slurp(run.dir / "stderr.txt");
  const auto g = geo::parse_ascii_grid(run.dir / "out" / "ucp.asc", geo::Semantic::ucp);
  EXPECT_EQ(g.ncols(), 12u);
  EXPECT_EQ(g.nrows(), 8u);
  const auto none = synth::write_run(scratch("ucp_none"), {synth::default_campaign()});
  EXPECT_EQ(cli("ucp -c " + none.config.string(), none.dir), app::kExitInvalidInput);
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
  const auto run = synth::write_run(scratch("determinism"), {synth::default_campaign(), synth::after_campaign()},
                                    baci_block(), true);
  const std::vector<std::string> files{"before_points.csv",         "before_points.geojson",
                                       "before_points.svg",         "before_report.json",
                                       "after_points.csv",          "before_vs_after_compare.json",
                                       "before_vs_after_compare.csv", "before_vs_after_scatter.svg",
                                       "before_vs_after_scatter.csv"};
  auto pass = [&] {
    const std::string c = " -c " + run.config.string();
    EXPECT_EQ(cli("process" + c + " --campaign before", run.dir), 0);
    EXPECT_EQ(cli("process" + c + " --campaign after", run.dir), 0);
    EXPECT_EQ(cli("compare" + c + " --before before --after after", run.dir), 0);
    std::vector<std::string> out;
    for (const auto& f : files) out.push_back(slurp(run.dir / "out" / f));
    return out;
  };
  const auto first = pass();
  fs::remove_all(run.dir / "out");
  EXPECT_EQ(pass(), first);
}

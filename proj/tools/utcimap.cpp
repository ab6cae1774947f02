// utcimap: command-line front end for the UTCI offset pipeline.
//
//   utcimap check-day -c run.json --date 2019-07-25
//   utcimap process   -c run.json --campaign before [--allow-drift] [--override-day-filter]
//   utcimap compare   -c run.json --before before --after after
//   utcimap ucp       -c run.json
//
// Exit codes: 0 ok, 1 day rejected, 2 data missing, 3 drift detected,
// 4 invalid configuration or input.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "utcimap/app.hpp"

int main(int argc, char** argv) {
  using namespace utcimap;

  CLI::App cli{"UTCI offset mapping for stop-and-go microclimate campaigns"};
  cli.require_subcommand(1);
  std::string config_path;

  auto* check = cli.add_subcommand("check-day", "evaluate the day-selection criteria for a date");
  std::string date_arg;
  std::string station_arg;
  check->add_option("-c,--config", config_path, "run configuration (JSON)")->required();
  check->add_option("--date", date_arg, "local date, YYYY-MM-DD")->required();
  check->add_option("--station", station_arg, "control station id (default: first control station)");

  auto* process = cli.add_subcommand("process", "compute point UTCI offsets for one campaign");
  std::string campaign_arg;
  app::ProcessOptions popt;
  process->add_option("-c,--config", config_path, "run configuration (JSON)")->required();
  process->add_option("--campaign", campaign_arg, "campaign id")->required();
  process->add_flag("--allow-drift", popt.allow_drift, "exit 0 even when the onsite offset drifts");
  process->add_flag("--override-day-filter", popt.override_day_filter, "process a rejected day anyway");

  auto* compare = cli.add_subcommand("compare", "compare a before and an after campaign");
  std::string before_arg, after_arg;
  compare->add_option("-c,--config", config_path, "run configuration (JSON)")->required();
  compare->add_option("--before", before_arg, "before-phase campaign id")->required();
  compare->add_option("--after", after_arg, "after-phase campaign id")->required();

  auto* ucp = cli.add_subcommand("ucp", "compute the UCP raster from the configured layers");
  ucp->add_option("-c,--config", config_path, "run configuration (JSON)")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : app::kExitInvalidInput;
  }

  app::RunConfig cfg;
  try {
    cfg = app::load_run_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kExitInvalidInput;
  }

  if (check->parsed()) {
    const auto date = parse_date(date_arg);
    if (!date) {
      std::cerr << "error: bad --date '" << date_arg << "'\n";
      return app::kExitInvalidInput;
    }
    std::optional<std::string> station;
    if (!station_arg.empty()) station = station_arg;
    return app::run_check_day(cfg, *date, station, std::cout, std::cerr);
  }
  if (process->parsed()) return app::run_process(cfg, campaign_arg, popt, std::cout, std::cerr);
  if (compare->parsed()) return app::run_compare(cfg, before_arg, after_arg, std::cout, std::cerr);
  return app::run_ucp(cfg, std::cout, std::cerr);
}

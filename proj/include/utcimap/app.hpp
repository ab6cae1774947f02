#pragma once

/**
 * @file app.hpp
 * @brief Run configuration and the command implementations behind the
 *        utcimap executable. Reports go to `out`, diagnostics to `log`,
 *        data only to files under the configured output directory.
 */

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "utcimap/analysis.hpp"
#include "utcimap/campaign.hpp"
#include "utcimap/errors.hpp"
#include "utcimap/geo.hpp"
#include "utcimap/series.hpp"
#include "utcimap/text.hpp"
#include "utcimap/thermal.hpp"
#include "utcimap/time.hpp"

namespace utcimap::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRejected = 1;
inline constexpr int kExitDataMissing = 2;
inline constexpr int kExitDrift = 3;
inline constexpr int kExitInvalidInput = 4;

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

struct StationConfig {
  series::StationMeta meta;
  fs::path path;
  series::CsvSchema schema;
};

struct CampaignConfig {
  fs::path plan;
  fs::path mobile_log;
};

struct DayObservation {
  int cloud_cover_oktas = 0;
  std::optional<campaign::Insolation> insolation;
};

struct RasterConfig {
  std::optional<fs::path> ucp;  // precomputed UCP grid
  std::optional<fs::path> albedo;
  std::optional<fs::path> vegetation;
  std::optional<fs::path> irradiance;
  std::optional<double> irradiance_reference_wm2;  // set when the irradiance grid is in W/m²
  geo::UcpOptions options;

  bool has_layers() const { return albedo && vegetation && irradiance; }
};

struct BaciConfig {
  std::string case_station;
  std::string control_station;
  series::Parameter parameter = series::Parameter::t_air;
  std::string before_start, before_end, after_start, after_end;  // timestamps, parsed against the case station zone
  std::optional<std::pair<int, int>> hour_filter;
  std::size_t bootstrap_n = 2000;
  double confidence = 0.95;
};

struct RunConfig {
  fs::path base_dir;
  std::vector<StationConfig> stations;
  std::map<std::string, CampaignConfig> campaigns;
  std::map<Date, DayObservation> days;
  RasterConfig rasters;
  campaign::DayThresholds day_thresholds;
  campaign::DaySummaryOptions day_summary;
  campaign::CampaignOptions campaign;
  std::optional<BaciConfig> baci;
  fs::path output_dir = "out";
  std::uint64_t seed = 20190725;

  const StationConfig* station(std::string_view id) const {
    for (const auto& s : stations)
      if (s.meta.station_id == id) return &s;
    return nullptr;
  }

  void validate() const {
    std::set<std::string> ids;
    for (const auto& s : stations) {
      if (s.meta.station_id.empty()) throw ConfigError("config: station without id");
      if (!ids.insert(s.meta.station_id).second) throw ConfigError("config: duplicate station id '" + s.meta.station_id + "'");
      if (!fs::exists(s.path)) throw ConfigError("config: station file not found: " + s.path.string());
      if (s.meta.cadence.count() <= 0) throw ConfigError("config: station cadence must be > 0");
    }
    for (const auto& [id, c] : campaigns) {
      if (!fs::exists(c.plan)) throw ConfigError("config: campaign plan not found: " + c.plan.string());
      if (!fs::exists(c.mobile_log)) throw ConfigError("config: mobile log not found: " + c.mobile_log.string());
    }
    for (const auto* p : {&rasters.ucp, &rasters.albedo, &rasters.vegetation, &rasters.irradiance})
      if (*p && !fs::exists(**p)) throw ConfigError("config: raster not found: " + (*p)->string());
    if (rasters.irradiance_reference_wm2 && !(*rasters.irradiance_reference_wm2 > 0.0))
      throw ConfigError("config: irradiance_reference_wm2 must be > 0");
    for (const auto& [d, o] : days)
      if (o.cloud_cover_oktas < 0 || o.cloud_cover_oktas > 8)
        throw ConfigError("config: cloud cover on " + format_date(d) + " must be 0-8 oktas");

    const auto& th = day_thresholds;
    if (!(th.t_max_above > 0.0) || !(th.t_min_above > 0.0)) throw ConfigError("config: day temperature thresholds must be > 0");
    if (th.max_cloud_oktas < 0 || th.max_cloud_oktas > 8) throw ConfigError("config: max_cloud_oktas must be 0-8");
    if (th.accepted_classes.empty()) throw ConfigError("config: accepted_stability_classes is empty");
    const auto& dr = campaign.drift;
    if (!(dr.short_window_amplitude > 0.0) || !(dr.long_window_amplitude > 0.0) || dr.short_window_max.count() <= 0 ||
        dr.smoothing.count() <= 0 || dr.min_samples == 0)
      throw ConfigError("config: drift thresholds must be > 0");
    if (!(campaign.stabilization.threshold > 0.0) || campaign.stabilization.window.count() <= 0)
      throw ConfigError("config: stabilization thresholds must be > 0");
    if (campaign.segments.max_gap.count() <= 0 || campaign.segments.min_duration.count() <= 0)
      throw ConfigError("config: segment thresholds must be > 0");
    if (campaign.match_tolerance.count() <= 0) throw ConfigError("config: match_tolerance_s must be > 0");
    if (!(campaign.wind.roughness_length > 0.0) || !(campaign.wind.sensor_height > campaign.wind.roughness_length))
      throw ConfigError("config: wind profile needs 0 < roughness_length < sensor height");
    try {
      campaign.globe.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string{"config: "} + e.what());
    }
    if (baci) {
      if (!station(baci->case_station)) throw ConfigError("config: baci case station '" + baci->case_station + "' unknown");
      if (!station(baci->control_station))
        throw ConfigError("config: baci control station '" + baci->control_station + "' unknown");
      if (baci->bootstrap_n == 0) throw ConfigError("config: bootstrap_n must be > 0");
      if (!(baci->confidence > 0.0 && baci->confidence < 1.0)) throw ConfigError("config: confidence must be in (0,1)");
    }
  }
};

namespace detail {

inline Seconds seconds_field(const json& j, const char* key, Seconds fallback) {
  return j.contains(key) ? Seconds{j.at(key).get<long long>()} : fallback;
}

inline Seconds clock_field(const json& j, const char* key, Seconds fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = parse_clock(j.at(key).get<std::string>());
  if (!v) throw ConfigError(std::string{"config: bad clock time for '"} + key + "'");
  return *v;
}

inline fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path{p};
  return path.is_absolute() ? path : base / path;
}

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (std::none_of(known.begin(), known.end(), [&](const char* n) { return k == n; }))
      throw ConfigError("config: unknown key '" + k + "' in " + where);
}

}  // namespace detail

/// Paths in the document are resolved against `base_dir`.
inline RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  using detail::resolve;
  RunConfig c;
  c.base_dir = base_dir;
  try {
    detail::reject_unknown_keys(j,
                                {"stations", "campaigns", "days", "rasters", "thresholds", "globe", "wind_profile",
                                 "day_summary", "baci", "output_dir", "seed"},
                                "top level");
    for (const auto& sj : j.value("stations", json::array())) {
      StationConfig s;
      s.meta.station_id = sj.at("id").get<std::string>();
      s.meta.role = series::parse_station_role(sj.at("role").get<std::string>());
      s.path = resolve(base_dir, sj.at("path").get<std::string>());
      s.meta.location = {sj.value("lon", 0.0), sj.value("lat", 0.0)};
      const auto off = parse_utc_offset(sj.value("utc_offset", std::string{"+00:00"}));
      if (!off) throw ConfigError("config: station '" + s.meta.station_id + "' has a bad utc_offset");
      s.meta.utc_offset_minutes = *off;
      s.meta.cadence = detail::seconds_field(sj, "cadence_s", Seconds{60});
      const auto heights = sj.value("sensor_heights", json::object());
      for (const auto& [k, v] : heights.items()) s.meta.sensor_heights[k] = v.get<double>();
      const auto columns = sj.value("columns", json::object());
      for (const auto& [k, v] : columns.items()) s.schema.columns[k] = v.get<std::string>();
      const auto delim = sj.value("delimiter", std::string{","});
      if (delim.size() != 1) throw ConfigError("config: delimiter must be a single character");
      s.schema.delimiter = delim[0];
      c.stations.push_back(std::move(s));
    }
    const auto campaigns = j.value("campaigns", json::object());
    for (const auto& [id, cj] : campaigns.items())
      c.campaigns[id] = {resolve(base_dir, cj.at("plan").get<std::string>()),
                         resolve(base_dir, cj.at("mobile_log").get<std::string>())};
    const auto days = j.value("days", json::object());
    for (const auto& [date, dj] : days.items()) {
      const auto d = parse_date(date);
      if (!d) throw ConfigError("config: bad date key '" + date + "' in days");
      DayObservation o;
      o.cloud_cover_oktas = dj.at("cloud_cover_oktas").get<int>();
      if (dj.contains("insolation")) o.insolation = campaign::parse_insolation(dj.at("insolation").get<std::string>());
      c.days[*d] = o;
    }
    if (j.contains("rasters")) {
      const auto& rj = j.at("rasters");
      auto opt_path = [&](const char* k) -> std::optional<fs::path> {
        if (!rj.contains(k) || rj.at(k).is_null()) return std::nullopt;
        return resolve(base_dir, rj.at(k).get<std::string>());
      };
      c.rasters.ucp = opt_path("ucp");
      c.rasters.albedo = opt_path("albedo");
      c.rasters.vegetation = opt_path("vegetation");
      c.rasters.irradiance = opt_path("irradiance");
      if (rj.contains("irradiance_reference_wm2")) c.rasters.irradiance_reference_wm2 = rj.at("irradiance_reference_wm2").get<double>();
      const auto f = rj.value("ucp_formula", std::string{"product"});
      if (f == "product")
        c.rasters.options.formula = geo::UcpFormula::product;
      else if (f == "weighted_sum")
        c.rasters.options.formula = geo::UcpFormula::weighted_sum;
      else
        throw ConfigError("config: unknown ucp_formula '" + f + "'");
      if (rj.contains("ucp_weights")) {
        const auto& w = rj.at("ucp_weights");
        c.rasters.options.weight_irradiance = w.value("irradiance", 1.0);
        c.rasters.options.weight_albedo = w.value("albedo", 1.0);
        c.rasters.options.weight_vegetation = w.value("vegetation", 1.0);
      }
    }
    const auto th = j.value("thresholds", json::object());
    if (th.contains("day_filter")) {
      const auto& d = th.at("day_filter");
      auto& t = c.day_thresholds;
      t.t_max_above = d.value("t_max_above_c", t.t_max_above);
      t.t_min_above = d.value("t_min_above_c", t.t_min_above);
      t.max_cloud_oktas = d.value("max_cloud_oktas", t.max_cloud_oktas);
      if (d.contains("accepted_stability_classes")) {
        t.accepted_classes.clear();
        for (const auto& s : d.at("accepted_stability_classes"))
          t.accepted_classes.push_back(campaign::parse_stability_class(s.get<std::string>()));
      }
    }
    if (th.contains("drift")) {
      const auto& d = th.at("drift");
      auto& t = c.campaign.drift;
      t.short_window_amplitude = d.value("short_window_amplitude_c", t.short_window_amplitude);
      t.long_window_amplitude = d.value("long_window_amplitude_c", t.long_window_amplitude);
      if (d.contains("short_window_max_h"))
        t.short_window_max = Seconds{static_cast<long long>(d.at("short_window_max_h").get<double>() * 3600.0)};
      t.smoothing = detail::seconds_field(d, "smoothing_s", t.smoothing);
      t.min_samples = d.value("min_samples", t.min_samples);
    }
    if (th.contains("stabilization")) {
      const auto& d = th.at("stabilization");
      c.campaign.stabilization.window = detail::seconds_field(d, "window_s", c.campaign.stabilization.window);
      c.campaign.stabilization.threshold = d.value("threshold_c", c.campaign.stabilization.threshold);
    }
    if (th.contains("segments")) {
      const auto& d = th.at("segments");
      c.campaign.segments.max_gap = detail::seconds_field(d, "max_gap_s", c.campaign.segments.max_gap);
      c.campaign.segments.min_duration = detail::seconds_field(d, "min_duration_s", c.campaign.segments.min_duration);
    }
    c.campaign.match_tolerance = detail::seconds_field(th, "match_tolerance_s", c.campaign.match_tolerance);
    if (j.contains("globe")) {
      const auto& g = j.at("globe");
      c.campaign.globe.diameter = g.value("diameter_m", c.campaign.globe.diameter);
      c.campaign.globe.emissivity = g.value("emissivity", c.campaign.globe.emissivity);
      if (g.contains("formula")) {
        const auto f = thermal::parse_globe_formula(g.at("formula").get<std::string>());
        if (!f) throw ConfigError("config: unknown globe formula");
        c.campaign.globe.formula = *f;
      }
    }
    if (j.contains("wind_profile")) {
      const auto& w = j.at("wind_profile");
      c.campaign.wind.roughness_length = w.value("roughness_length_m", c.campaign.wind.roughness_length);
      c.campaign.wind.sensor_height = w.value("mobile_sensor_height_m", c.campaign.wind.sensor_height);
    }
    c.campaign.onsite_roughness_length = c.campaign.wind.roughness_length;
    c.day_summary.roughness_length = c.campaign.wind.roughness_length;
    if (j.contains("day_summary")) {
      const auto& d = j.at("day_summary");
      c.day_summary.daytime_start = detail::clock_field(d, "daytime_start", c.day_summary.daytime_start);
      c.day_summary.daytime_end = detail::clock_field(d, "daytime_end", c.day_summary.daytime_end);
      c.day_summary.strong_insolation_above = d.value("strong_insolation_above_wm2", c.day_summary.strong_insolation_above);
    }
    if (j.contains("baci")) {
      const auto& b = j.at("baci");
      BaciConfig bc;
      bc.case_station = b.at("case_station").get<std::string>();
      bc.control_station = b.at("control_station").get<std::string>();
      bc.parameter = series::parse_parameter(b.value("parameter", std::string{"t_air"}));
      bc.before_start = b.at("before").at("start").get<std::string>();
      bc.before_end = b.at("before").at("end").get<std::string>();
      bc.after_start = b.at("after").at("start").get<std::string>();
      bc.after_end = b.at("after").at("end").get<std::string>();
      if (b.contains("hour_filter")) {
        const auto& h = b.at("hour_filter");
        bc.hour_filter = std::pair{h.at(0).get<int>(), h.at(1).get<int>()};
      }
      bc.bootstrap_n = b.value("bootstrap_n", bc.bootstrap_n);
      bc.confidence = b.value("confidence", bc.confidence);
      c.baci = bc;
    }
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string{"out"}));
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string{"config: "} + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string{"config: "} + e.what());
  }
  c.validate();
  return c;
}

inline RunConfig load_run_config(const fs::path& path) {
  json j;
  try {
    j = json::parse(text::read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const DataMissingError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(j, path.parent_path().empty() ? fs::path{"."} : path.parent_path());
}

// ---------------------------------------------------------------------------
// Loading helpers
// ---------------------------------------------------------------------------

inline series::StationSeries load_station(const RunConfig& cfg, std::string_view id, std::ostream& log) {
  const auto* s = cfg.station(id);
  if (!s) throw ConfigError("station '" + std::string{id} + "' is not configured");
  auto parsed = series::parse_station_csv(s->path, s->meta, s->schema);
  if (parsed.report.dropped_rows > 0 || !parsed.report.gaps.empty())
    log << "[load] station " << id << "\n" << parsed.report.to_text(s->meta.utc_offset_minutes);
  return std::move(parsed.series);
}

inline const StationConfig& first_control(const RunConfig& cfg) {
  for (const auto& s : cfg.stations)
    if (s.meta.role == series::StationRole::control) return s;
  throw ConfigError("no station with role 'control' is configured");
}

/// Precomputed UCP grid when configured, else computed from the input layers, else nothing.
inline std::optional<geo::UcpRaster> load_ucp(const RunConfig& cfg) {
  const auto& r = cfg.rasters;
  if (r.ucp) return geo::parse_ascii_grid(*r.ucp, geo::Semantic::ucp);
  if (!r.has_layers()) return std::nullopt;
  const auto albedo = geo::parse_ascii_grid(*r.albedo, geo::Semantic::albedo);
  const auto veg = geo::parse_ascii_grid(*r.vegetation, geo::Semantic::vegetation_fraction);
  auto irr = r.irradiance_reference_wm2
                 ? geo::normalize_irradiance(geo::parse_ascii_grid(*r.irradiance, geo::Semantic::physical),
                                             *r.irradiance_reference_wm2)
                 : geo::parse_ascii_grid(*r.irradiance, geo::Semantic::irradiance_normalized);
  return geo::compute_ucp(albedo, veg, irr, r.options);
}

inline std::optional<campaign::DerivedDay> derive_day(const RunConfig& cfg, const series::StationSeries& control,
                                                      Date date, int utc_offset) {
  const auto it = cfg.days.find(date);
  if (it == cfg.days.end())
    throw DataMissingError("no cloud cover observation configured for " + format_date(date));
  return campaign::summarize_day(control, date, utc_offset, it->second.cloud_cover_oktas, it->second.insolation,
                                 cfg.day_summary);
}

inline void print_day(std::ostream& out, const campaign::DerivedDay& d, const campaign::DayVerdict& v) {
  const auto& s = d.summary;
  out << "date: " << format_date(s.date) << "\n"
      << "t_max_c: " << text::format_fixed(s.t_max, 2) << "\n"
      << "t_min_c: " << text::format_fixed(s.t_min, 2) << "\n"
      << "cloud_cover_oktas: " << s.cloud_cover_oktas << "\n"
      << "mean_daytime_wind_10m: " << text::format_fixed(s.mean_daytime_wind, 2) << "\n"
      << "insolation: " << campaign::to_string(d.insolation)
      << (d.insolation_from_radiation ? " (from net radiation)" : " (observed)") << "\n"
      << "stability_class: " << campaign::to_string(s.stability_class) << "\n";
  for (const auto& c : v.checks) out << (c.passed ? "PASS " : "FAIL ") << c.criterion << ": " << c.detail << "\n";
  out << "verdict: " << (v.accepted ? "accepted" : "rejected") << "\n";
}

/// Maps the library's error taxonomy onto exit codes.
template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const campaign::DayRejectedError& e) {
    log << "error: " << e.what() << "\n";
    return kExitRejected;
  } catch (const campaign::CampaignFailedError& e) {
    log << "error: " << e.what() << "\n";
    for (const auto& f : e.report().failures) log << "  " << f.point_id << ": " << f.reason << "\n";
    return kExitDataMissing;
  } catch (const DataMissingError& e) {
    log << "error: " << e.what() << "\n";
    return kExitDataMissing;
  } catch (const EmptyInputError& e) {
    log << "error: " << e.what() << "\n";
    return kExitDataMissing;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Day-selection check for one local date; exit 0 accepted, 1 rejected, 2 data missing.
inline int run_check_day(const RunConfig& cfg, Date date, std::optional<std::string> station_id, std::ostream& out,
                         std::ostream& log) {
  return guarded(log, [&] {
    const StationConfig* chosen = station_id ? cfg.station(*station_id) : &first_control(cfg);
    if (!chosen) throw ConfigError("station '" + *station_id + "' is not configured");
    const auto& sc = *chosen;
    const auto control = load_station(cfg, sc.meta.station_id, log);
    const auto day = derive_day(cfg, control, date, sc.meta.utc_offset_minutes);
    const auto verdict = campaign::day_filter(day->summary, cfg.day_thresholds);
    out << "station: " << sc.meta.station_id << "\n";
    print_day(out, *day, verdict);
    return verdict.accepted ? kExitOk : kExitRejected;
  });
}

struct ProcessOptions {
  bool allow_drift = false;
  bool override_day_filter = false;
};

inline fs::path output_path(const RunConfig& cfg, const std::string& name) { return cfg.output_dir / name; }

/**
 * Processes one campaign and writes <id>_points.csv, <id>_points.geojson,
 * <id>_points.svg and <id>_report.json. Exit 3 when the onsite offset drifts,
 * unless allowed.
 */
inline int run_process(const RunConfig& cfg, const std::string& campaign_id, const ProcessOptions& popt,
                       std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const auto it = cfg.campaigns.find(campaign_id);
    if (it == cfg.campaigns.end()) throw ConfigError("campaign '" + campaign_id + "' is not configured");
    const auto plan = campaign::load_campaign_plan(it->second.plan);
    if (plan.campaign_id != campaign_id)
      throw ConfigError("plan " + it->second.plan.string() + " declares campaign_id '" + plan.campaign_id + "'");
    const auto mobile = campaign::parse_mobile_log(it->second.mobile_log, plan.utc_offset_minutes);
    if (mobile.report.dropped_rows > 0) log << "[load] mobile log\n" << mobile.report.to_text(plan.utc_offset_minutes);
    const auto control = load_station(cfg, plan.control_station_id, log);
    std::optional<series::StationSeries> onsite;
    if (plan.onsite_station_id) onsite = load_station(cfg, *plan.onsite_station_id, log);

    const auto day = derive_day(cfg, control, plan.date, plan.utc_offset_minutes);
    const auto verdict = campaign::day_filter(day->summary, cfg.day_thresholds);
    if (!verdict.accepted && popt.override_day_filter) log << "warning: day filter rejected the date; overridden\n";

    auto opt = cfg.campaign;
    opt.override_day_filter = popt.override_day_filter;
    const auto result = campaign::process_campaign(plan, mobile.samples, control, verdict, onsite ? &*onsite : nullptr, opt);
    const auto& rep = result.report;
    for (const auto& f : rep.failures) log << "point " << f.point_id << " failed: " << f.reason << "\n";
    for (const auto& w : rep.warnings) log << "warning: " << w << "\n";

    const auto ucp = load_ucp(cfg);
    fs::create_directories(cfg.output_dir);
    std::ostringstream csv;
    campaign::write_point_results_csv(csv, plan, result.results);
    text::write_file_atomic(output_path(cfg, campaign_id + "_points.csv"), csv.str());
    text::write_file_atomic(output_path(cfg, campaign_id + "_points.geojson"),
                            geo::export_heat_map(plan, result.results, ucp ? &*ucp : nullptr).dump(2) + "\n");
    text::write_file_atomic(output_path(cfg, campaign_id + "_points.svg"), geo::heat_map_svg(plan, result.results));
    auto report = campaign::to_json(rep, plan.utc_offset_minutes);
    report["allow_drift"] = popt.allow_drift;
    text::write_file_atomic(output_path(cfg, campaign_id + "_report.json"), report.dump(2) + "\n");

    out << "campaign: " << campaign_id << "\n"
        << "points_ok: " << rep.points_ok << "/" << plan.points.size() << "\n";
    for (const auto& r : result.results)
      out << "  " << r.point_id << " offset_c=" << text::format_fixed(r.offset.value, 2)
          << " utci=" << text::format_fixed(r.utci_mobile, 2) << " " << thermal::to_string(r.category) << "\n";
    if (rep.drift) {
      out << "drift: " << series::to_string(rep.drift->verdict)
          << " amplitude_c=" << text::format_fixed(rep.drift->amplitude, 3)
          << " threshold_c=" << text::format_fixed(rep.drift->threshold, 3)
          << " slope_c_per_h=" << text::format_fixed(rep.drift->trend_slope, 3) << "\n";
      if (rep.drift->verdict == series::DriftVerdict::drifting) {
        if (!popt.allow_drift) {
          log << "error: onsite UTCI offset drifts over the traverse (use --allow-drift to accept)\n";
          return kExitDrift;
        }
        log << "warning: drift accepted by --allow-drift\n";
      }
    } else {
      out << "drift: not checked\n";
    }
    return kExitOk;
  });
}

struct PointDelta {
  std::string point_id;         // after-phase id
  std::string before_point_id;  // matched through displaced_from when set
  double before_offset = 0.0;
  double after_offset = 0.0;
  double delta = 0.0;
};

struct PointComparison {
  std::vector<PointDelta> matched;
  std::vector<std::string> unmatched_after;
  std::vector<std::string> unmatched_before;
};

inline PointComparison compare_points(const std::vector<campaign::PointRecord>& before,
                                      const std::vector<campaign::PointRecord>& after) {
  PointComparison c;
  std::set<std::string> used;
  for (const auto& a : after) {
    const auto key = a.displaced_from.value_or(a.point_id);
    const auto b = std::find_if(before.begin(), before.end(), [&](const auto& r) { return r.point_id == key; });
    if (b == before.end()) {
      c.unmatched_after.push_back(a.point_id);
      continue;
    }
    used.insert(b->point_id);
    c.matched.push_back({a.point_id, b->point_id, b->offset, a.offset, a.offset - b->offset});
  }
  for (const auto& b : before)
    if (!used.count(b.point_id)) c.unmatched_before.push_back(b.point_id);
  return c;
}

inline std::vector<campaign::PointRecord> read_point_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataMissingError("point results not found: " + path.string() + " (run process first)");
  return campaign::parse_point_results_csv(in, path.string());
}

inline analysis::BaciDataset baci_dataset(const RunConfig& cfg, std::ostream& log) {
  const auto& b = *cfg.baci;
  const auto case_s = load_station(cfg, b.case_station, log);
  const auto control = load_station(cfg, b.control_station, log);
  const int offset = case_s.meta.utc_offset_minutes;
  auto ts = [&](const std::string& s) {
    const auto t = parse_timestamp(s, offset);
    if (!t) throw ConfigError("config: bad baci timestamp '" + s + "'");
    return *t;
  };
  series::OffsetOptions oo;
  oo.match_tolerance = cfg.campaign.match_tolerance;
  oo.derivation.globe = cfg.campaign.globe;
  oo.derivation.roughness_length = cfg.campaign.wind.roughness_length;
  const auto offsets = series::offset_series(case_s, control, b.parameter, oo);

  analysis::BaciDataset d;
  d.parameter = b.parameter;
  d.utc_offset_minutes = offset;
  d.before_period = analysis::Period{ts(b.before_start), ts(b.before_end)};
  d.after_period = analysis::Period{ts(b.after_start), ts(b.after_end)};
  d.before.parameter = d.after.parameter = b.parameter;
  d.before.cadence = d.after.cadence = offsets.cadence;
  for (const auto& v : offsets.values) {
    if (v.time >= d.before_period->start && v.time <= d.before_period->end) d.before.values.push_back(v);
    if (v.time >= d.after_period->start && v.time <= d.after_period->end) d.after.values.push_back(v);
  }
  return d;
}

/**
 * Compares two processed campaigns: per-point offset deltas, the BACI effect
 * on the fixed stations when configured, and the offset/UCP association when
 * a UCP raster is available. Writes <before>_vs_<after>_compare.{json,csv}
 * and, with a raster, <before>_vs_<after>_scatter.{csv,svg}.
 */
inline int run_compare(const RunConfig& cfg, const std::string& before_id, const std::string& after_id,
                       std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const auto before = read_point_results(output_path(cfg, before_id + "_points.csv"));
    const auto after = read_point_results(output_path(cfg, after_id + "_points.csv"));
    const auto cmp = compare_points(before, after);
    const std::string stem = before_id + "_vs_" + after_id;

    ordered_json report;
    report["before"] = before_id;
    report["after"] = after_id;
    report["points"] = ordered_json::array();
    std::ostringstream csv;
    csv << "point_id,before_point_id,before_offset_c,after_offset_c,delta_c\n";
    out << "points (after vs before offset):\n";
    for (const auto& m : cmp.matched) {
      report["points"].push_back(ordered_json{{"point_id", m.point_id},
                                              {"before_point_id", m.before_point_id},
                                              {"before_offset_c", m.before_offset},
                                              {"after_offset_c", m.after_offset},
                                              {"delta_c", m.delta}});
      csv << m.point_id << ',' << m.before_point_id << ',' << text::format_double(m.before_offset) << ','
          << text::format_double(m.after_offset) << ',' << text::format_double(m.delta) << '\n';
      out << "  " << m.point_id << (m.point_id == m.before_point_id ? "" : " (was " + m.before_point_id + ")")
          << " delta_c=" << text::format_fixed(m.delta, 2) << "\n";
    }
    report["unmatched_after"] = cmp.unmatched_after;
    report["unmatched_before"] = cmp.unmatched_before;
    for (const auto& id : cmp.unmatched_after) log << "warning: after-phase point '" << id << "' has no before match\n";
    for (const auto& id : cmp.unmatched_before) log << "warning: before-phase point '" << id << "' has no after match\n";

    if (cfg.baci) {
      const auto data = baci_dataset(cfg, log);
      analysis::BaciOptions bo;
      bo.hour_filter = cfg.baci->hour_filter;
      bo.bootstrap_n = cfg.baci->bootstrap_n;
      bo.confidence = cfg.baci->confidence;
      bo.seed = cfg.seed;
      const auto e = analysis::baci_effect(data, bo);
      report["baci"] = ordered_json{{"method", e.method},
                                    {"parameter", std::string{series::to_string(data.parameter)}},
                                    {"effect_c", e.effect},
                                    {"ci_low_c", e.ci_low},
                                    {"ci_high_c", e.ci_high},
                                    {"confidence", bo.confidence},
                                    {"n_before", e.n_before},
                                    {"n_after", e.n_after},
                                    {"days_before", e.days_before},
                                    {"days_after", e.days_after},
                                    {"seed", cfg.seed}};
      out << "baci:\n" << analysis::to_text(e);
    } else {
      report["baci"] = nullptr;
    }

    const auto ucp = load_ucp(cfg);
    if (ucp) {
      std::vector<analysis::OffsetUcpPair> pairs;
      for (const auto* set : {&before, &after})
        for (const auto& r : *set) {
          std::optional<double> v;
          try {
            v = geo::sample_at(*ucp, r.location.lon, r.location.lat);
          } catch (const std::out_of_range&) {
          }
          if (v) pairs.push_back({r.offset, *v, r.campaign_id + ":" + r.point_id});
          else log << "warning: no UCP value at point " << r.campaign_id << ":" << r.point_id << "\n";
        }
      ordered_json corr;
      corr["n"] = pairs.size();
      try {
        const auto c = analysis::correlate_offset_ucp(pairs);
        corr["spearman_rho"] = c.spearman_rho;
        corr["pearson_r"] = c.pearson_r;
        out << "correlation: spearman_rho=" << text::format_fixed(c.spearman_rho, 3)
            << " pearson_r=" << text::format_fixed(c.pearson_r, 3) << " n=" << c.n << "\n";
      } catch (const std::exception& ex) {
        corr["spearman_rho"] = nullptr;
        corr["pearson_r"] = nullptr;
        corr["note"] = ex.what();
        log << "warning: correlation not computed: " << ex.what() << "\n";
      }
      report["correlation"] = corr;
      if (!pairs.empty()) {
        fs::create_directories(cfg.output_dir);
        analysis::export_scatter(pairs, output_path(cfg, stem + "_scatter"));
      }
    }
    fs::create_directories(cfg.output_dir);
    text::write_file_atomic(output_path(cfg, stem + "_compare.csv"), csv.str());
    text::write_file_atomic(output_path(cfg, stem + "_compare.json"), report.dump(2) + "\n");
    return kExitOk;
  });
}

/// Computes the UCP grid from the configured layers and writes it as ucp.asc.
inline int run_ucp(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    if (!cfg.rasters.has_layers()) throw ConfigError("ucp: albedo, vegetation and irradiance rasters are required");
    RunConfig layers_only = cfg;
    layers_only.rasters.ucp.reset();
    const auto ucp = *load_ucp(layers_only);
    fs::create_directories(cfg.output_dir);
    const auto path = output_path(cfg, "ucp.asc");
    text::write_file_atomic(path, geo::to_ascii_grid(ucp));
    std::size_t nodata = 0;
    double lo = 1.0, hi = 0.0;
    for (double v : ucp.values) {
      if (ucp.is_nodata(v)) {
        ++nodata;
        continue;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out << "ucp: " << path.string() << "\n"
        << "cells: " << ucp.values.size() << " nodata: " << nodata << "\n";
    if (nodata < ucp.values.size())
      out << "min: " << text::format_fixed(lo, 4) << " max: " << text::format_fixed(hi, 4) << "\n";
    return kExitOk;
  });
}

}  // namespace utcimap::app

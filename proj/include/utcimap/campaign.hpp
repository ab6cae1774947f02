#pragma once

/**
 * @file campaign.hpp
 * @brief Stop-and-go mobile campaign processing.
 *
 * A campaign is a sequence of dwells at declared traverse points. Each dwell
 * becomes a StopSegment; once the black globe has settled, the settled tail is
 * averaged and compared with a reference built from the control station at the
 * same instant, giving one UTCI offset per point.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "utcimap/errors.hpp"
#include "utcimap/series.hpp"
#include "utcimap/text.hpp"
#include "utcimap/thermal.hpp"
#include "utcimap/time.hpp"

namespace utcimap::campaign {

using series::GeoPoint;
using series::StationSeries;

enum class Phase { before, after };
enum class Environment { full_sun, shade, vegetation_proximity };
enum class Insolation { strong, moderate, slight };
// Daytime Pasquill classes, including the intermediate B-C and C-D cells of the table.
enum class StabilityClass { A, AB, B, BC, C, CD, D, E, F };

inline std::string_view to_string(Phase p) { return p == Phase::before ? "before" : "after"; }

inline std::string_view to_string(Environment e) {
  switch (e) {
    case Environment::full_sun: return "full_sun";
    case Environment::shade: return "shade";
    case Environment::vegetation_proximity: return "vegetation_proximity";
  }
  return "unknown";
}

inline std::string_view to_string(Insolation i) {
  switch (i) {
    case Insolation::strong: return "strong";
    case Insolation::moderate: return "moderate";
    case Insolation::slight: return "slight";
  }
  return "unknown";
}

inline std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::A: return "A";
    case StabilityClass::AB: return "A-B";
    case StabilityClass::B: return "B";
    case StabilityClass::BC: return "B-C";
    case StabilityClass::C: return "C";
    case StabilityClass::CD: return "C-D";
    case StabilityClass::D: return "D";
    case StabilityClass::E: return "E";
    case StabilityClass::F: return "F";
  }
  return "unknown";
}

inline Phase parse_phase(std::string_view s) {
  if (s == "before") return Phase::before;
  if (s == "after") return Phase::after;
  throw ConfigError("unknown phase '" + std::string{s} + "'");
}

inline Environment parse_environment(std::string_view s) {
  if (s == "full_sun") return Environment::full_sun;
  if (s == "shade") return Environment::shade;
  if (s == "vegetation_proximity" || s == "vegetation") return Environment::vegetation_proximity;
  throw ConfigError("unknown environment '" + std::string{s} + "'");
}

inline Insolation parse_insolation(std::string_view s) {
  if (s == "strong") return Insolation::strong;
  if (s == "moderate") return Insolation::moderate;
  if (s == "slight") return Insolation::slight;
  throw ConfigError("unknown insolation '" + std::string{s} + "'");
}

inline StabilityClass parse_stability_class(std::string_view s) {
  for (auto c : {StabilityClass::A, StabilityClass::AB, StabilityClass::B, StabilityClass::BC, StabilityClass::C,
                 StabilityClass::CD, StabilityClass::D, StabilityClass::E, StabilityClass::F})
    if (to_string(c) == s) return c;
  if (s == "AB") return StabilityClass::AB;
  if (s == "BC") return StabilityClass::BC;
  if (s == "CD") return StabilityClass::CD;
  throw ConfigError("unknown stability class '" + std::string{s} + "'");
}

// Raised when a point's data cannot produce a result (no stable window, missing drivers).
class UnusablePointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Plan
// ---------------------------------------------------------------------------

struct TraversePoint {
  std::string point_id;
  GeoPoint location;
  Environment environment = Environment::full_sun;
  std::optional<std::string> displaced_from;  // id of the pre-renovation point this one replaces
};

struct CampaignPlan {
  std::string campaign_id;
  Phase phase = Phase::before;
  Date date{};
  int utc_offset_minutes = 0;
  Seconds window_start{12 * 3600};  // local time of day
  Seconds window_end{16 * 3600};
  std::vector<TraversePoint> points;
  std::string control_station_id;
  std::optional<std::string> onsite_station_id;

  void validate() const {
    if (campaign_id.empty()) throw ConfigError("campaign plan: empty campaign_id");
    if (!(window_start < window_end)) throw ConfigError("campaign plan: measurement window start must precede end");
    std::set<std::string> seen;
    for (const auto& p : points) {
      if (p.point_id.empty()) throw ConfigError("campaign plan: empty point_id");
      if (!seen.insert(p.point_id).second) throw ConfigError("campaign plan: duplicate point_id '" + p.point_id + "'");
    }
  }

  const TraversePoint* find(std::string_view id) const {
    for (const auto& p : points)
      if (p.point_id == id) return &p;
    return nullptr;
  }
};

inline CampaignPlan parse_campaign_plan(const nlohmann::json& j) {
  try {
    CampaignPlan plan;
    plan.campaign_id = j.at("campaign_id").get<std::string>();
    plan.phase = parse_phase(j.at("phase").get<std::string>());
    const auto date = parse_date(j.at("date").get<std::string>());
    if (!date) throw ConfigError("campaign plan: bad date");
    plan.date = *date;
    const auto off = parse_utc_offset(j.value("utc_offset", std::string{"+00:00"}));
    if (!off) throw ConfigError("campaign plan: bad utc_offset");
    plan.utc_offset_minutes = *off;
    if (j.contains("measurement_window")) {
      const auto& w = j.at("measurement_window");
      const auto a = parse_clock(w.at("start").get<std::string>());
      const auto b = parse_clock(w.at("end").get<std::string>());
      if (!a || !b) throw ConfigError("campaign plan: bad measurement_window");
      plan.window_start = *a;
      plan.window_end = *b;
    }
    plan.control_station_id = j.at("control_station_id").get<std::string>();
    if (j.contains("onsite_station_id") && !j.at("onsite_station_id").is_null())
      plan.onsite_station_id = j.at("onsite_station_id").get<std::string>();
    for (const auto& pj : j.at("points")) {
      TraversePoint p;
      p.point_id = pj.at("point_id").get<std::string>();
      p.location = {pj.at("lon").get<double>(), pj.at("lat").get<double>()};
      p.environment = parse_environment(pj.at("environment").get<std::string>());
      if (pj.contains("displaced_from") && !pj.at("displaced_from").is_null())
        p.displaced_from = pj.at("displaced_from").get<std::string>();
      plan.points.push_back(std::move(p));
    }
    plan.validate();
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string{"campaign plan: "} + e.what());
  }
}

inline CampaignPlan load_campaign_plan(const std::filesystem::path& path) {
  try {
    return parse_campaign_plan(nlohmann::json::parse(text::read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Mobile log
// ---------------------------------------------------------------------------

struct MobileSample {
  Instant timestamp{};
  std::string point_id;
  std::optional<double> t_air;
  std::optional<double> rh;
  std::optional<double> t_globe;
  std::optional<double> wind;  // m/s at the instrument height

  bool operator==(const MobileSample&) const = default;
};

struct MobileLog {
  std::vector<MobileSample> samples;
  series::LoadReport report;
};

/// Mobile log CSV with columns timestamp, point_id, t_air, rh, t_globe, wind. Empty cells are missing values.
inline MobileLog parse_mobile_log(std::istream& in, std::optional<int> default_offset_minutes = std::nullopt,
                                  std::string source = "<stream>") {
  MobileLog log;
  log.report.source = std::move(source);
  std::string line;
  if (!text::getline_any(in, line)) throw SchemaError(log.report.source + ": missing header row");
  const auto header = text::split_csv(line);
  std::map<std::string, std::size_t> idx;
  for (const char* col : {"timestamp", "point_id", "t_air", "rh", "t_globe", "wind"}) {
    bool found = false;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (text::trim(header[i]) == col) {
        idx[col] = i;
        found = true;
      }
    if (!found) throw SchemaError(log.report.source + ": missing mandatory column '" + std::string{col} + "'");
  }
  std::size_t line_no = 1;
  while (text::getline_any(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++log.report.rows_read;
    const auto f = text::split_csv(line);
    auto drop = [&](const char* why) {
      ++log.report.dropped_rows;
      log.report.drop_reasons.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    auto cell = [&](const char* key) -> std::string_view {
      const auto i = idx.at(key);
      return i < f.size() ? text::trim(f[i]) : std::string_view{};
    };
    MobileSample s;
    const auto ts = parse_timestamp(cell("timestamp"), default_offset_minutes);
    if (!ts) {
      drop("malformed timestamp");
      continue;
    }
    s.timestamp = *ts;
    s.point_id = std::string{cell("point_id")};
    if (s.point_id.empty()) {
      drop("empty point_id");
      continue;
    }
    bool bad = false;
    for (auto [key, dst] : {std::pair{"t_air", &s.t_air}, std::pair{"rh", &s.rh}, std::pair{"t_globe", &s.t_globe},
                            std::pair{"wind", &s.wind}}) {
      const auto c = cell(key);
      if (c.empty()) continue;
      const auto v = text::parse_double(c);
      if (!v) bad = true;
      *dst = v;
    }
    if (bad || (s.rh && (*s.rh < 0.0 || *s.rh > 100.0)) || (s.wind && *s.wind < 0.0)) {
      drop("malformed or out-of-bounds value");
      continue;
    }
    if (!log.samples.empty() && s.timestamp <= log.samples.back().timestamp) {
      drop("timestamp not after previous row");
      continue;
    }
    log.samples.push_back(std::move(s));
  }
  log.report.rows_kept = log.samples.size();
  if (log.samples.empty()) throw EmptyInputError(log.report.source + ": no valid rows");
  return log;
}

inline MobileLog parse_mobile_log(const std::filesystem::path& path,
                                  std::optional<int> default_offset_minutes = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw DataMissingError("cannot open mobile log " + path.string());
  return parse_mobile_log(in, default_offset_minutes, path.string());
}

// ---------------------------------------------------------------------------
// Segmentation and stabilization
// ---------------------------------------------------------------------------

struct TimeWindow {
  Instant start{};
  Instant end{};

  Instant center() const { return start + (end - start) / 2; }
  bool operator==(const TimeWindow&) const = default;
};

struct StopSegment {
  std::string point_id;
  std::vector<MobileSample> samples;
  std::optional<TimeWindow> stabilization_window;
  bool stabilized = false;
  bool too_short = false;

  Instant start() const { return samples.front().timestamp; }
  Instant end() const { return samples.back().timestamp; }
  Seconds duration() const { return end() - start(); }

  // Copy restricted to samples inside `w`.
  StopSegment slice(const TimeWindow& w) const {
    StopSegment out;
    out.point_id = point_id;
    for (const auto& s : samples)
      if (s.timestamp >= w.start && s.timestamp <= w.end) out.samples.push_back(s);
    return out;
  }

  bool operator==(const StopSegment&) const = default;
};

struct SegmentOptions {
  Seconds max_gap{60};        // a larger gap inside one point's run splits it
  Seconds min_duration{300};  // shorter segments are flagged
};

/**
 * Splits a time-ordered mobile log into per-point dwell segments. A change of
 * point id or a time gap above `max_gap` starts a new segment.
 */
inline std::vector<StopSegment> segment_stops(std::span<const MobileSample> log, const CampaignPlan& plan,
                                              const SegmentOptions& opt = {}) {
  std::vector<StopSegment> out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto& s = log[i];
    if (!plan.find(s.point_id)) throw SchemaError("mobile log references unknown point_id '" + s.point_id + "'");
    if (i > 0 && !(log[i - 1].timestamp < s.timestamp))
      throw std::invalid_argument("segment_stops: mobile log is not strictly time-ordered");
    const bool extend = !out.empty() && out.back().point_id == s.point_id &&
                        s.timestamp - out.back().samples.back().timestamp <= opt.max_gap;
    if (!extend) {
      out.emplace_back();
      out.back().point_id = s.point_id;
    }
    out.back().samples.push_back(s);
  }
  for (auto& seg : out) seg.too_short = seg.duration() < opt.min_duration;
  return out;
}

struct StabilizationOptions {
  Seconds window{180};     // settled tail length
  double threshold = 0.15;  // °C, max - min of t_globe within the window
};

struct StabilizationResult {
  bool stabilized = false;
  std::optional<TimeWindow> window;  // latest settled window
  std::optional<Instant> onset;      // earliest time from which every window is settled
};

/**
 * Finds the latest window of `opt.window` length in which the globe reading
 * varies by no more than `opt.threshold`. Samples without t_globe are ignored.
 */
inline StabilizationResult detect_stabilization(const StopSegment& seg, const StabilizationOptions& opt = {}) {
  std::vector<Instant> t;
  std::vector<double> g;
  for (const auto& s : seg.samples)
    if (s.t_globe) {
      t.push_back(s.timestamp);
      g.push_back(*s.t_globe);
    }
  if (t.empty()) throw UnusablePointError("point '" + seg.point_id + "': segment has no t_globe readings");

  const auto n = t.size();
  // range of g over samples in [t[i], t[i] + window]; valid only if the window fits in the segment
  auto settled_from = [&](std::size_t i) {
    double lo = g[i], hi = g[i];
    for (std::size_t j = i; j < n && t[j] <= t[i] + opt.window; ++j) {
      lo = std::min(lo, g[j]);
      hi = std::max(hi, g[j]);
    }
    return hi - lo <= opt.threshold;
  };
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < n && t[i] + opt.window <= t.back(); ++i) starts.push_back(i);

  StabilizationResult r;
  if (starts.empty()) return r;
  std::vector<bool> ok(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) ok[k] = settled_from(starts[k]);

  // latest window, anchored on its end sample
  for (std::size_t e = n; e-- > 0;) {
    if (t[e] - opt.window < t.front()) break;
    std::size_t b = e;
    while (b > 0 && t[b - 1] >= t[e] - opt.window) --b;
    double lo = g[e], hi = g[e];
    for (std::size_t j = b; j <= e; ++j) {
      lo = std::min(lo, g[j]);
      hi = std::max(hi, g[j]);
    }
    if (hi - lo <= opt.threshold) {
      r.stabilized = true;
      r.window = TimeWindow{t[b], t[e]};
      break;
    }
  }
  if (ok.back()) {
    std::size_t k = starts.size() - 1;
    while (k > 0 && ok[k - 1]) --k;
    r.onset = t[starts[k]];
  }
  return r;
}

/// Runs detect_stabilization and records the outcome on the segment.
inline void mark_stabilization(StopSegment& seg, const StabilizationOptions& opt = {}) {
  const auto r = detect_stabilization(seg, opt);
  seg.stabilized = r.stabilized;
  seg.stabilization_window = r.window;
}

// ---------------------------------------------------------------------------
// Aggregation and control matching
// ---------------------------------------------------------------------------

struct WindProfile {
  double sensor_height = 1.5;      // m, mobile anemometer
  double roughness_length = 0.01;  // m
};

struct AggregatedDrivers {
  Instant center{};
  double t_air = 0.0;
  double rh = 0.0;
  double t_globe = 0.0;
  double wind = 0.0;      // at sensor height
  double t_mrt = 0.0;
  double wind_10m = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_t_air = 0, n_rh = 0, n_t_globe = 0, n_wind = 0;

  thermal::UtciDrivers utci_drivers() const { return {t_air, rh, t_mrt, wind_10m}; }
};

/**
 * Averages the stabilized window. Each driver is the mean over the samples
 * where it is present. MRT comes from the mean globe, air and wind values;
 * wind is lifted to 10 m with a neutral log profile.
 */
inline AggregatedDrivers aggregate_point(const StopSegment& seg, const thermal::GlobeSpec& globe = {},
                                         const WindProfile& wind = {}) {
  if (!seg.stabilized || !seg.stabilization_window)
    throw UnusablePointError("point '" + seg.point_id + "': segment is not stabilized");
  const auto& w = *seg.stabilization_window;
  AggregatedDrivers a;
  a.center = w.center();
  double s_ta = 0, s_rh = 0, s_tg = 0, s_v = 0;
  for (const auto& s : seg.samples) {
    if (s.timestamp < w.start || s.timestamp > w.end) continue;
    ++a.n_samples;
    if (s.t_air) s_ta += *s.t_air, ++a.n_t_air;
    if (s.rh) s_rh += *s.rh, ++a.n_rh;
    if (s.t_globe) s_tg += *s.t_globe, ++a.n_t_globe;
    if (s.wind) s_v += *s.wind, ++a.n_wind;
  }
  if (!a.n_t_air || !a.n_rh || !a.n_t_globe || !a.n_wind)
    throw UnusablePointError("point '" + seg.point_id + "': a driver has no samples in the stabilized window");
  a.t_air = s_ta / static_cast<double>(a.n_t_air);
  a.rh = s_rh / static_cast<double>(a.n_rh);
  a.t_globe = s_tg / static_cast<double>(a.n_t_globe);
  a.wind = s_v / static_cast<double>(a.n_wind);
  a.t_mrt = thermal::mrt_from_globe(a.t_globe, a.t_air, a.wind, globe, seg.point_id);
  a.wind_10m = thermal::wind_at_10m(a.wind, wind.sensor_height, wind.roughness_length);
  return a;
}

struct ControlMatch {
  thermal::ReferenceConditions reference;
  Instant control_time{};
};

/// Reference conditions from the control sample nearest `t` (within `tolerance`).
inline ControlMatch match_control(Instant t, const StationSeries& control, Seconds tolerance = Seconds{60}) {
  const auto i = series::nearest_sample(control, t, tolerance);
  if (!i)
    throw DataMissingError("no control sample from '" + control.station_id() + "' within " +
                           std::to_string(tolerance.count()) + " s of " + format_timestamp(t));
  const auto& s = control.samples[*i];
  return {thermal::ReferenceConditions::from_control(s.t_air, s.rh), s.timestamp};
}

// ---------------------------------------------------------------------------
// Day selection
// ---------------------------------------------------------------------------

/// Pasquill daytime class from 10 m surface wind and incoming solar radiation.
inline StabilityClass pasquill_class(double wind_10m, Insolation insolation) {
  using C = StabilityClass;
  static constexpr C table[5][3] = {
      // strong, moderate, slight
      {C::A, C::AB, C::B},   // < 2 m/s
      {C::AB, C::B, C::C},   // 2-3
      {C::B, C::BC, C::C},   // 3-5
      {C::C, C::CD, C::D},   // 5-6
      {C::C, C::D, C::D},    // >= 6
  };
  if (!(wind_10m >= 0.0)) throw std::invalid_argument("pasquill_class: wind must be >= 0");
  const int row = wind_10m < 2.0 ? 0 : wind_10m < 3.0 ? 1 : wind_10m < 5.0 ? 2 : wind_10m < 6.0 ? 3 : 4;
  return table[row][static_cast<int>(insolation)];
}

/// Insolation class heuristic from net radiation around solar noon.
inline Insolation insolation_from_net_radiation(double net_radiation_noon, double strong_above = 500.0) {
  return net_radiation_noon > strong_above ? Insolation::strong : Insolation::moderate;
}

struct DaySummary {
  Date date{};
  double t_max = 0.0;
  double t_min = 0.0;
  int cloud_cover_oktas = 0;
  StabilityClass stability_class = StabilityClass::D;
  double mean_daytime_wind = 0.0;  // m/s at 10 m

  void validate() const {
    if (cloud_cover_oktas < 0 || cloud_cover_oktas > 8) throw std::invalid_argument("cloud cover must be 0-8 oktas");
    if (t_min > t_max) throw std::invalid_argument("t_min exceeds t_max");
  }
};

struct DayThresholds {
  double t_max_above = 25.0;  // °C, strict
  double t_min_above = 16.0;  // °C, strict
  int max_cloud_oktas = 3;    // inclusive
  std::vector<StabilityClass> accepted_classes{StabilityClass::A, StabilityClass::AB};
};

struct CriterionCheck {
  std::string criterion;
  bool passed = false;
  std::string detail;
};

struct DayVerdict {
  bool accepted = false;
  std::vector<CriterionCheck> checks;

  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.passed) out.push_back(c.criterion);
    return out;
  }
};

inline DayVerdict day_filter(const DaySummary& day, const DayThresholds& th = {}) {
  day.validate();
  DayVerdict v;
  auto fmt = [](double x) { return text::format_fixed(x, 1); };
  v.checks.push_back({"t_max", day.t_max > th.t_max_above, fmt(day.t_max) + " > " + fmt(th.t_max_above)});
  v.checks.push_back({"t_min", day.t_min > th.t_min_above, fmt(day.t_min) + " > " + fmt(th.t_min_above)});
  v.checks.push_back({"cloud_cover", day.cloud_cover_oktas <= th.max_cloud_oktas,
                      std::to_string(day.cloud_cover_oktas) + " <= " + std::to_string(th.max_cloud_oktas) + " oktas"});
  const bool cls = std::find(th.accepted_classes.begin(), th.accepted_classes.end(), day.stability_class) !=
                   th.accepted_classes.end();
  std::string allowed;
  for (auto c : th.accepted_classes) allowed += (allowed.empty() ? "" : ",") + std::string{to_string(c)};
  v.checks.push_back({"stability_class", cls, std::string{to_string(day.stability_class)} + " in {" + allowed + "}"});
  v.accepted = std::all_of(v.checks.begin(), v.checks.end(), [](const auto& c) { return c.passed; });
  return v;
}

struct DaySummaryOptions {
  Seconds daytime_start{8 * 3600};  // local
  Seconds daytime_end{18 * 3600};
  double roughness_length = 0.01;
  Seconds noon_half_width{1800};
  double strong_insolation_above = 500.0;  // W/m²
};

struct DerivedDay {
  DaySummary summary;
  Insolation insolation = Insolation::moderate;
  bool insolation_from_radiation = false;
};

/**
 * Builds the day summary from a control station's record for a local date.
 * Cloud cover always comes from the operator. Insolation is taken from the
 * operator when given, otherwise from net radiation around solar noon.
 */
inline DerivedDay summarize_day(const StationSeries& control, Date date, int utc_offset_minutes, int cloud_cover_oktas,
                                std::optional<Insolation> insolation = std::nullopt,
                                const DaySummaryOptions& opt = {}) {
  DerivedDay d;
  d.summary.date = date;
  d.summary.cloud_cover_oktas = cloud_cover_oktas;
  std::size_t n = 0, n_wind = 0;
  double wind_sum = 0.0;
  const double wind_height = control.sensor_height("wind", 10.0);
  for (const auto& s : control.samples) {
    if (local_date(s.timestamp, utc_offset_minutes) != date) continue;
    d.summary.t_max = n == 0 ? s.t_air : std::max(d.summary.t_max, s.t_air);
    d.summary.t_min = n == 0 ? s.t_air : std::min(d.summary.t_min, s.t_air);
    ++n;
    const auto tod = local_time_of_day(s.timestamp, utc_offset_minutes);
    if (s.wind && tod >= opt.daytime_start && tod <= opt.daytime_end) {
      wind_sum += thermal::wind_at_10m(*s.wind, wind_height, opt.roughness_length);
      ++n_wind;
    }
  }
  if (n == 0)
    throw DataMissingError("control station '" + control.station_id() + "' has no samples on " + format_date(date));
  if (n_wind == 0)
    throw DataMissingError("control station '" + control.station_id() + "' has no daytime wind on " + format_date(date));
  d.summary.mean_daytime_wind = wind_sum / static_cast<double>(n_wind);

  if (insolation) {
    d.insolation = *insolation;
  } else {
    // solar noon from longitude, equation of time neglected
    const auto noon = Instant{std::chrono::sys_days{date}} + Seconds{12 * 3600} -
                      Seconds{static_cast<long long>(std::llround(control.meta.location.lon / 15.0 * 3600.0))};
    double rn = 0.0;
    std::size_t k = 0;
    for (const auto& s : control.samples) {
      if (!s.net_radiation) continue;
      const auto dt = s.timestamp > noon ? s.timestamp - noon : noon - s.timestamp;
      if (dt <= opt.noon_half_width) {
        rn += *s.net_radiation;
        ++k;
      }
    }
    if (k == 0)
      throw DataMissingError("insolation not supplied and no net radiation near solar noon on " + format_date(date));
    d.insolation = insolation_from_net_radiation(rn / static_cast<double>(k), opt.strong_insolation_above);
    d.insolation_from_radiation = true;
  }
  d.summary.stability_class = pasquill_class(d.summary.mean_daytime_wind, d.insolation);
  return d;
}

// ---------------------------------------------------------------------------
// Campaign pipeline
// ---------------------------------------------------------------------------

struct PointResult {
  std::string point_id;
  Instant timestamp{};  // centre of the stabilized window
  AggregatedDrivers drivers;
  thermal::ReferenceConditions reference;
  double utci_mobile = 0.0;
  double utci_ref = 0.0;
  thermal::UtciOffset offset;
  thermal::HeatStress category = thermal::HeatStress::no_thermal_stress;
};

struct PointFailure {
  std::string point_id;
  std::string reason;
};

struct CampaignOptions {
  thermal::GlobeSpec globe;
  WindProfile wind;
  SegmentOptions segments;
  StabilizationOptions stabilization;
  Seconds match_tolerance{60};
  series::DriftThresholds drift;
  double onsite_roughness_length = 0.01;
  bool override_day_filter = false;
};

struct CampaignReport {
  std::string campaign_id;
  DayVerdict day;
  bool day_filter_overridden = false;
  std::size_t segments = 0;
  std::size_t points_ok = 0;
  std::vector<PointFailure> failures;
  std::vector<std::string> warnings;
  std::optional<series::DriftReport> drift;
};

struct CampaignOutput {
  std::vector<PointResult> results;
  CampaignReport report;
};

class DayRejectedError : public std::runtime_error {
 public:
  explicit DayRejectedError(DayVerdict v)
      : std::runtime_error(message(v)), verdict_(std::move(v)) {}
  const DayVerdict& verdict() const noexcept { return verdict_; }

 private:
  static std::string message(const DayVerdict& v) {
    std::string s = "day rejected:";
    for (const auto& c : v.checks)
      if (!c.passed) s += " " + c.criterion + " (" + c.detail + ")";
    return s;
  }
  DayVerdict verdict_;
};

class CampaignFailedError : public std::runtime_error {
 public:
  explicit CampaignFailedError(CampaignReport r)
      : std::runtime_error("campaign '" + r.campaign_id + "': every point failed"), report_(std::move(r)) {}
  const CampaignReport& report() const noexcept { return report_; }

 private:
  CampaignReport report_;
};

/**
 * segment -> stabilize -> aggregate -> match control -> UTCI offset, per
 * point in plan order. Per-point failures are collected; the campaign fails
 * only when no point yields a result. With an onsite fixed station the
 * report carries a drift diagnostic of its UTCI offset over the traverse.
 */
inline CampaignOutput process_campaign(const CampaignPlan& plan, std::span<const MobileSample> log,
                                       const StationSeries& control, const DayVerdict& day,
                                       const StationSeries* onsite = nullptr, const CampaignOptions& opt = {}) {
  plan.validate();
  if (!day.accepted && !opt.override_day_filter) throw DayRejectedError(day);

  CampaignOutput out;
  auto& rep = out.report;
  rep.campaign_id = plan.campaign_id;
  rep.day = day;
  rep.day_filter_overridden = !day.accepted;

  auto segments = segment_stops(log, plan, opt.segments);
  rep.segments = segments.size();
  std::optional<Instant> span_start, span_end;

  for (const auto& point : plan.points) {
    try {
      const StopSegment* chosen = nullptr;
      bool any = false;
      for (auto& seg : segments) {
        if (seg.point_id != point.point_id || seg.too_short) continue;
        any = true;
        mark_stabilization(seg, opt.stabilization);
        if (seg.stabilized) chosen = &seg;  // keep the latest
      }
      if (!any) throw UnusablePointError("no segment of at least " +
                                         std::to_string(opt.segments.min_duration.count()) + " s");
      if (!chosen) throw UnusablePointError("black globe did not stabilize");

      PointResult r;
      r.point_id = point.point_id;
      r.drivers = aggregate_point(*chosen, opt.globe, opt.wind);
      r.timestamp = r.drivers.center;
      const auto match = match_control(r.timestamp, control, opt.match_tolerance);
      r.reference = match.reference;
      r.offset = thermal::utci_offset(r.drivers.utci_drivers(), match.reference, point.point_id, r.timestamp,
                                      match.control_time);
      r.utci_mobile = r.offset.utci_mobile;
      r.utci_ref = r.offset.utci_ref;
      r.category = thermal::heat_stress_category(r.utci_mobile);

      const auto tod0 = local_time_of_day(chosen->start(), plan.utc_offset_minutes);
      const auto tod1 = local_time_of_day(chosen->end(), plan.utc_offset_minutes);
      if (tod0 < plan.window_start || tod1 > plan.window_end)
        rep.warnings.push_back("point '" + point.point_id + "' measured outside the planned window");
      span_start = span_start ? std::min(*span_start, chosen->start()) : chosen->start();
      span_end = span_end ? std::max(*span_end, chosen->end()) : chosen->end();
      out.results.push_back(std::move(r));
    } catch (const UnusablePointError& e) {
      rep.failures.push_back({point.point_id, e.what()});
    } catch (const DataMissingError& e) {
      rep.failures.push_back({point.point_id, e.what()});
    } catch (const DomainError& e) {
      rep.failures.push_back({point.point_id, e.what()});
    } catch (const RangeError& e) {
      rep.failures.push_back({point.point_id, e.what()});
    }
  }
  rep.points_ok = out.results.size();
  if (out.results.empty()) throw CampaignFailedError(rep);

  if (onsite) {
    try {
      series::OffsetOptions oo;
      oo.match_tolerance = opt.match_tolerance;
      oo.derivation.globe = opt.globe;
      oo.derivation.roughness_length = opt.onsite_roughness_length;
      const auto offsets = series::offset_series(*onsite, control, series::Parameter::utci_offset, oo);
      rep.drift = series::drift_diagnostic(offsets, *span_start, *span_end, opt.drift);
    } catch (const DataMissingError& e) {
      rep.warnings.push_back(std::string{"drift check skipped: "} + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

inline void write_point_results_csv(std::ostream& os, const CampaignPlan& plan, std::span<const PointResult> results) {
  using text::format_double;
  os << "campaign_id,phase,point_id,displaced_from,environment,lon,lat,timestamp,control_time,"
        "t_air,rh,t_globe,wind,t_mrt,wind_10m,ref_t_air,ref_rh,utci_mobile,utci_ref,offset_c,"
        "stress_category,n_samples\n";
  for (const auto& r : results) {
    const auto* p = plan.find(r.point_id);
    if (!p) throw std::invalid_argument("result for unknown point '" + r.point_id + "'");
    const auto& d = r.drivers;
    os << plan.campaign_id << ',' << to_string(plan.phase) << ',' << r.point_id << ','
       << p->displaced_from.value_or("") << ',' << to_string(p->environment) << ','
       << text::format_fixed(p->location.lon, 6) << ',' << text::format_fixed(p->location.lat, 6) << ','
       << format_timestamp(r.timestamp, plan.utc_offset_minutes) << ','
       << format_timestamp(r.offset.control_time, plan.utc_offset_minutes) << ',' << format_double(d.t_air) << ','
       << format_double(d.rh) << ',' << format_double(d.t_globe) << ',' << format_double(d.wind) << ','
       << format_double(d.t_mrt) << ',' << format_double(d.wind_10m) << ',' << format_double(r.reference.t_air)
       << ',' << format_double(r.reference.rh) << ',' << format_double(r.utci_mobile) << ','
       << format_double(r.utci_ref) << ',' << format_double(r.offset.value) << ','
       << thermal::to_string(r.category) << ',' << d.n_samples << '\n';
  }
}

// One row of a written point-result table, as needed for cross-campaign comparison.
struct PointRecord {
  std::string campaign_id;
  Phase phase = Phase::before;
  std::string point_id;
  std::optional<std::string> displaced_from;
  Environment environment = Environment::full_sun;
  GeoPoint location;
  double utci_mobile = 0.0;
  double utci_ref = 0.0;
  double offset = 0.0;
};

inline std::vector<PointRecord> parse_point_results_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!text::getline_any(in, line)) throw SchemaError(source + ": missing header row");
  const auto header = text::split_csv(line);
  auto col = [&](const char* name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw SchemaError(source + ": missing column '" + std::string{name} + "'");
  };
  const auto c_id = col("campaign_id"), c_phase = col("phase"), c_point = col("point_id"),
             c_disp = col("displaced_from"), c_env = col("environment"), c_lon = col("lon"), c_lat = col("lat"),
             c_um = col("utci_mobile"), c_ur = col("utci_ref"), c_off = col("offset_c");
  std::vector<PointRecord> out;
  while (text::getline_any(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto f = text::split_csv(line);
    if (f.size() < header.size()) throw SchemaError(source + ": short row");
    PointRecord r;
    r.campaign_id = f[c_id];
    r.phase = parse_phase(f[c_phase]);
    r.point_id = f[c_point];
    if (!f[c_disp].empty()) r.displaced_from = f[c_disp];
    r.environment = parse_environment(f[c_env]);
    auto num = [&](std::size_t i) {
      auto v = text::parse_double(f[i]);
      if (!v) throw SchemaError(source + ": bad number '" + f[i] + "'");
      return *v;
    };
    r.location = {num(c_lon), num(c_lat)};
    r.utci_mobile = num(c_um);
    r.utci_ref = num(c_ur);
    r.offset = num(c_off);
    out.push_back(std::move(r));
  }
  return out;
}

inline nlohmann::ordered_json to_json(const series::DriftReport& d, int utc_offset_minutes) {
  nlohmann::ordered_json j;
  j["parameter"] = std::string{series::to_string(d.parameter)};
  j["window_start"] = format_timestamp(d.window_start, utc_offset_minutes);
  j["window_end"] = format_timestamp(d.window_end, utc_offset_minutes);
  j["samples"] = d.samples;
  j["amplitude_c"] = d.amplitude;
  j["trend_slope_c_per_h"] = d.trend_slope;
  j["threshold_c"] = d.threshold;
  j["verdict"] = std::string{series::to_string(d.verdict)};
  return j;
}

inline nlohmann::ordered_json to_json(const CampaignReport& r, int utc_offset_minutes) {
  nlohmann::ordered_json j;
  j["campaign_id"] = r.campaign_id;
  auto& day = j["day_filter"];
  day["accepted"] = r.day.accepted;
  day["overridden"] = r.day_filter_overridden;
  day["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.day.checks)
    day["checks"].push_back(nlohmann::ordered_json{{"criterion", c.criterion}, {"passed", c.passed}, {"detail", c.detail}});
  j["segments"] = r.segments;
  j["points_ok"] = r.points_ok;
  j["failures"] = nlohmann::ordered_json::array();
  for (const auto& f : r.failures) j["failures"].push_back(nlohmann::ordered_json{{"point_id", f.point_id}, {"reason", f.reason}});
  j["warnings"] = r.warnings;
  j["drift"] = r.drift ? to_json(*r.drift, utc_offset_minutes) : nlohmann::ordered_json(nullptr);
  return j;
}

}  // namespace utcimap::campaign

#pragma once

/**
 * @file series.hpp
 * @brief Fixed-station time series: CSV ingestion with gap annotation,
 *        centred moving-average smoothing, case-minus-control offsets and
 *        offset drift diagnostics.
 *
 * Series are immutable once parsed. Gaps are annotated, never interpolated.
 */

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "utcimap/errors.hpp"
#include "utcimap/text.hpp"
#include "utcimap/thermal.hpp"
#include "utcimap/time.hpp"

namespace utcimap::series {

enum class StationRole { case_station, control, onsite_fixed };

enum class Parameter {
  t_air,
  rh,
  t_globe,
  wind,
  net_radiation,
  vapor_pressure,
  t_mrt,
  utci,
  utci_offset,  // case UTCI minus the control-derived reference UTCI
};

inline std::string_view to_string(Parameter p) {
  switch (p) {
    case Parameter::t_air: return "t_air";
    case Parameter::rh: return "rh";
    case Parameter::t_globe: return "t_globe";
    case Parameter::wind: return "wind";
    case Parameter::net_radiation: return "net_radiation";
    case Parameter::vapor_pressure: return "vapor_pressure";
    case Parameter::t_mrt: return "t_mrt";
    case Parameter::utci: return "utci";
    case Parameter::utci_offset: return "utci_offset";
  }
  return "unknown";
}

inline Parameter parse_parameter(std::string_view s) {
  for (auto p : {Parameter::t_air, Parameter::rh, Parameter::t_globe, Parameter::wind, Parameter::net_radiation,
                 Parameter::vapor_pressure, Parameter::t_mrt, Parameter::utci, Parameter::utci_offset}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown parameter '" + std::string{s} + "'");
}

inline std::string_view to_string(StationRole r) {
  switch (r) {
    case StationRole::case_station: return "case";
    case StationRole::control: return "control";
    case StationRole::onsite_fixed: return "onsite_fixed";
  }
  return "unknown";
}

inline StationRole parse_station_role(std::string_view s) {
  if (s == "case") return StationRole::case_station;
  if (s == "control") return StationRole::control;
  if (s == "onsite_fixed" || s == "onsite") return StationRole::onsite_fixed;
  throw ConfigError("unknown station role '" + std::string{s} + "'");
}

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
};

struct WeatherSample {
  Instant timestamp{};
  double t_air = 0.0;
  double rh = 0.0;
  std::optional<double> t_globe;
  std::optional<double> wind;
  std::optional<double> net_radiation;

  bool operator==(const WeatherSample&) const = default;
};

// Missing stretch between two consecutive samples further apart than twice
// the cadence. `missing` excludes the one nominal interval.
struct GapAnnotation {
  Instant last_before{};
  Instant first_after{};
  Seconds missing{};

  bool operator==(const GapAnnotation&) const = default;
};

struct StationMeta {
  std::string station_id;
  StationRole role = StationRole::control;
  GeoPoint location;
  std::map<std::string, double> sensor_heights;  // parameter -> m
  Seconds cadence{60};
  int utc_offset_minutes = 0;                    // zone used for output and naive timestamps
};

struct StationSeries {
  StationMeta meta;
  std::vector<WeatherSample> samples;
  std::vector<GapAnnotation> gaps;

  const std::string& station_id() const { return meta.station_id; }
  bool empty() const { return samples.empty(); }
  Instant front_time() const { return samples.front().timestamp; }
  Instant back_time() const { return samples.back().timestamp; }

  double sensor_height(const std::string& parameter, double fallback) const {
    auto it = meta.sensor_heights.find(parameter);
    return it == meta.sensor_heights.end() ? fallback : it->second;
  }
};

inline std::vector<GapAnnotation> annotate_gaps(const std::vector<Instant>& times, Seconds cadence) {
  std::vector<GapAnnotation> gaps;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const auto dt = times[i] - times[i - 1];
    if (dt > 2 * cadence) gaps.push_back({times[i - 1], times[i], dt - cadence});
  }
  return gaps;
}

// Canonical column -> column name in the file.
struct CsvSchema {
  std::map<std::string, std::string> columns;
  char delimiter = ',';

  std::string column_for(const std::string& canonical) const {
    auto it = columns.find(canonical);
    return it == columns.end() ? canonical : it->second;
  }
};

struct LoadReport {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> drop_reasons;  // "line N: reason"
  std::vector<GapAnnotation> gaps;

  std::string to_text(int utc_offset_minutes = 0) const {
    std::ostringstream os;
    os << "source: " << source << "\n"
       << "rows_read: " << rows_read << "\n"
       << "rows_kept: " << rows_kept << "\n"
       << "dropped_rows: " << dropped_rows << "\n";
    for (const auto& r : drop_reasons) os << "  dropped: " << r << "\n";
    os << "gaps: " << gaps.size() << "\n";
    for (const auto& g : gaps)
      os << "  gap: " << format_timestamp(g.last_before, utc_offset_minutes) << " -> "
         << format_timestamp(g.first_after, utc_offset_minutes) << " missing_s=" << g.missing.count() << "\n";
    return os.str();
  }
};

struct ParsedStation {
  StationSeries series;
  LoadReport report;
};

namespace detail {

// Lower median of the spacings; empty input gives nullopt.
inline std::optional<Seconds> median_gap(std::vector<Seconds::rep> d) {
  if (d.empty()) return std::nullopt;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>((d.size() - 1) / 2);
  std::nth_element(d.begin(), mid, d.end());
  return Seconds{*mid};
}

inline std::optional<std::size_t> find_column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (text::trim(header[i]) == name) return i;
  return std::nullopt;
}

}  // namespace detail

/**
 * Reads a station CSV: header row, then one sample per row. Required columns
 * are timestamp, t_air and rh; t_globe, wind and net_radiation are optional.
 *
 * Rows with unparseable or out-of-bounds values, or with a timestamp not
 * after the previous kept row, are dropped and listed in the report.
 */
inline ParsedStation parse_station_csv(std::istream& in, StationMeta meta, const CsvSchema& schema = {},
                                       std::string source = "<stream>") {
  ParsedStation out;
  out.report.source = std::move(source);
  std::string line;
  if (!text::getline_any(in, line)) throw SchemaError(out.report.source + ": missing header row");
  const auto header = text::split_csv(line, schema.delimiter);

  std::map<std::string, std::size_t> idx;
  for (const char* required : {"timestamp", "t_air", "rh"}) {
    const auto name = schema.column_for(required);
    auto i = detail::find_column(header, name);
    if (!i) throw SchemaError(out.report.source + ": missing mandatory column '" + name + "'");
    idx[required] = *i;
  }
  for (const char* optional : {"t_globe", "wind", "net_radiation"}) {
    if (auto i = detail::find_column(header, schema.column_for(optional))) idx[optional] = *i;
  }

  auto& samples = out.series.samples;
  std::size_t line_no = 1;
  // spacings between rows adjacent in the file, so dropped rows do not skew the cadence check
  std::vector<Seconds::rep> spacings;
  bool previous_kept = false;
  while (text::getline_any(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++out.report.rows_read;
    const auto fields = text::split_csv(line, schema.delimiter);
    auto drop = [&](const std::string& why) {
      previous_kept = false;
      ++out.report.dropped_rows;
      out.report.drop_reasons.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    auto field = [&](const char* key) -> std::optional<std::string_view> {
      auto it = idx.find(key);
      if (it == idx.end() || it->second >= fields.size()) return std::nullopt;
      return std::string_view{fields[it->second]};
    };

    WeatherSample s;
    const auto ts = parse_timestamp(field("timestamp").value_or(""), meta.utc_offset_minutes);
    if (!ts) {
      drop("malformed timestamp");
      continue;
    }
    s.timestamp = *ts;
    const auto ta = text::parse_double(field("t_air").value_or(""));
    const auto rh = text::parse_double(field("rh").value_or(""));
    if (!ta || !rh) {
      drop("malformed t_air or rh");
      continue;
    }
    if (*rh < 0.0 || *rh > 100.0 || *ta <= -60.0 || *ta >= 60.0) {
      drop("t_air or rh out of bounds");
      continue;
    }
    s.t_air = *ta;
    s.rh = *rh;
    bool bad = false;
    auto opt = [&](const char* key, std::optional<double>& dst) {
      auto f = field(key);
      if (!f || text::trim(*f).empty()) return;
      auto v = text::parse_double(*f);
      if (!v) {
        bad = true;
        return;
      }
      dst = v;
    };
    opt("t_globe", s.t_globe);
    opt("wind", s.wind);
    opt("net_radiation", s.net_radiation);
    if (bad) {
      drop("malformed optional value");
      continue;
    }
    if (s.wind && *s.wind < 0.0) {
      drop("negative wind");
      continue;
    }
    if (!samples.empty() && s.timestamp <= samples.back().timestamp) {
      drop("timestamp not after previous row");
      continue;
    }
    if (previous_kept) spacings.push_back((s.timestamp - samples.back().timestamp).count());
    previous_kept = true;
    samples.push_back(s);
  }

  if (samples.empty()) throw EmptyInputError(out.report.source + ": no valid rows");
  if (meta.cadence.count() <= 0) throw SchemaError(out.report.source + ": cadence must be positive");
  if (const auto med = detail::median_gap(std::move(spacings))) {
    const double rel = std::abs(static_cast<double>((*med - meta.cadence).count())) /
                       static_cast<double>(meta.cadence.count());
    if (rel > 0.10)
      throw SchemaError(out.report.source + ": declared cadence " + std::to_string(meta.cadence.count()) +
                        " s does not match median sample spacing " + std::to_string(med->count()) + " s");
  }

  std::vector<Instant> times;
  times.reserve(samples.size());
  for (const auto& s : samples) times.push_back(s.timestamp);
  out.series.gaps = annotate_gaps(times, meta.cadence);
  out.series.meta = std::move(meta);
  out.report.rows_kept = samples.size();
  out.report.gaps = out.series.gaps;
  return out;
}

inline ParsedStation parse_station_csv(const std::filesystem::path& path, StationMeta meta,
                                       const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw DataMissingError("cannot open station file " + path.string());
  return parse_station_csv(in, std::move(meta), schema, path.string());
}

inline void write_station_csv(std::ostream& out, const StationSeries& s) {
  out << "timestamp,t_air,rh,t_globe,wind,net_radiation\n";
  auto opt = [](const std::optional<double>& v) { return v ? text::format_double(*v) : std::string{}; };
  for (const auto& w : s.samples) {
    out << format_timestamp(w.timestamp, s.meta.utc_offset_minutes) << ',' << text::format_double(w.t_air) << ','
        << text::format_double(w.rh) << ',' << opt(w.t_globe) << ',' << opt(w.wind) << ','
        << opt(w.net_radiation) << '\n';
  }
}

struct TimedValue {
  Instant time{};
  double value = 0.0;

  bool operator==(const TimedValue&) const = default;
};

struct TimeSeries {
  Parameter parameter = Parameter::t_air;
  std::vector<TimedValue> values;
  Seconds cadence{60};
  std::vector<GapAnnotation> gaps;
  std::size_t skipped = 0;  // samples without a usable value

  bool empty() const { return values.empty(); }
  std::size_t size() const { return values.size(); }
};

struct DerivationOptions {
  thermal::GlobeSpec globe;
  double roughness_length = 0.01;  // m, log wind profile
};

namespace detail {

inline void finish(TimeSeries& ts) {
  std::vector<Instant> times;
  times.reserve(ts.values.size());
  for (const auto& v : ts.values) times.push_back(v.time);
  ts.gaps = annotate_gaps(times, ts.cadence);
}

inline std::optional<thermal::UtciDrivers> drivers(const WeatherSample& s, const StationSeries& st,
                                                   const DerivationOptions& opt) {
  if (!s.t_globe || !s.wind) return std::nullopt;
  const double t_mrt = thermal::mrt_from_globe(*s.t_globe, s.t_air, *s.wind, opt.globe, st.station_id());
  const double v10 = thermal::wind_at_10m(*s.wind, st.sensor_height("wind", 10.0), opt.roughness_length);
  return thermal::UtciDrivers{s.t_air, s.rh, t_mrt, v10};
}

}  // namespace detail

/// Value of `p` for one sample; nullopt when inputs are missing or outside a formula's domain.
inline std::optional<double> derive(const WeatherSample& s, const StationSeries& st, Parameter p,
                                    const DerivationOptions& opt = {}) {
  try {
    switch (p) {
      case Parameter::t_air: return s.t_air;
      case Parameter::rh: return s.rh;
      case Parameter::t_globe: return s.t_globe;
      case Parameter::wind: return s.wind;
      case Parameter::net_radiation: return s.net_radiation;
      case Parameter::vapor_pressure: return thermal::vapor_pressure(s.t_air, s.rh);
      case Parameter::t_mrt:
        if (!s.t_globe || !s.wind) return std::nullopt;
        return thermal::mrt_from_globe(*s.t_globe, s.t_air, *s.wind, opt.globe, st.station_id());
      case Parameter::utci: {
        auto d = detail::drivers(s, st, opt);
        if (!d) return std::nullopt;
        return thermal::utci(d->utci_input());
      }
      case Parameter::utci_offset:
        throw std::invalid_argument("utci_offset needs a control series; use offset_series");
    }
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const RangeError&) {
    return std::nullopt;
  }
  return std::nullopt;
}

inline TimeSeries extract(const StationSeries& st, Parameter p, const DerivationOptions& opt = {}) {
  TimeSeries ts;
  ts.parameter = p;
  ts.cadence = st.meta.cadence;
  for (const auto& s : st.samples) {
    if (auto v = derive(s, st, p, opt))
      ts.values.push_back({s.timestamp, *v});
    else
      ++ts.skipped;
  }
  detail::finish(ts);
  return ts;
}

/**
 * Centred moving average over `window` (all samples within +-window/2).
 * Edges use the partial window that is available; samples on the far side of
 * a gap annotation are excluded.
 */
inline TimeSeries smooth(const TimeSeries& in, Seconds window = Seconds{300}) {
  if (window < in.cadence) throw std::invalid_argument("smooth: window shorter than cadence");
  TimeSeries out = in;
  const auto& v = in.values;
  const auto n = v.size();
  // run id per sample; a new run starts after every gap
  std::vector<std::size_t> run(n, 0);
  for (std::size_t i = 1; i < n; ++i) run[i] = run[i - 1] + ((v[i].time - v[i - 1].time) > 2 * in.cadence ? 1 : 0);
  const auto half = window / 2;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (lo < i && (v[i].time - v[lo].time > half || run[lo] != run[i])) ++lo;
    double acc = 0.0;
    std::size_t k = 0;
    for (std::size_t j = lo; j < n && run[j] == run[i] && v[j].time - v[i].time <= half; ++j) {
      acc += v[j].value - v[i].value;
      ++k;
    }
    out.values[i].value = v[i].value + acc / static_cast<double>(k);
  }
  return out;
}

inline TimeSeries smooth(const StationSeries& st, Parameter p, Seconds window = Seconds{300},
                         const DerivationOptions& opt = {}) {
  return smooth(extract(st, p, opt), window);
}

struct OffsetOptions {
  Seconds match_tolerance{60};
  DerivationOptions derivation;
};

/// Index of the sample nearest to `t`, if within `tolerance`. Ties go to the earlier sample.
inline std::optional<std::size_t> nearest_sample(const StationSeries& st, Instant t, Seconds tolerance) {
  const auto& s = st.samples;
  if (s.empty()) return std::nullopt;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const WeatherSample& w, Instant x) { return w.timestamp < x; });
  std::optional<std::size_t> best;
  Seconds best_d{};
  auto consider = [&](std::size_t i) {
    const auto d = s[i].timestamp > t ? s[i].timestamp - t : t - s[i].timestamp;
    if (d <= tolerance && (!best || d < best_d)) {
      best = i;
      best_d = d;
    }
  };
  const auto i = static_cast<std::size_t>(it - s.begin());
  if (i > 0) consider(i - 1);
  if (i < s.size()) consider(i);
  return best;
}

/**
 * Case-minus-control series of `p`: for each case sample with a control
 * sample within the match tolerance, emit value(case) - value(control).
 * Derived parameters are computed per station before differencing; for
 * Parameter::utci_offset the control side is the shaded, sheltered
 * reference (MRT = air temperature, 0.5 m/s).
 */
inline TimeSeries offset_series(const StationSeries& case_series, const StationSeries& control, Parameter p,
                                const OffsetOptions& opt = {}) {
  if (case_series.empty() || control.empty() || case_series.back_time() < control.front_time() - opt.match_tolerance ||
      control.back_time() < case_series.front_time() - opt.match_tolerance)
    throw DataMissingError("offset_series: '" + case_series.station_id() + "' and '" + control.station_id() +
                           "' do not overlap in time");
  TimeSeries ts;
  ts.parameter = p;
  ts.cadence = case_series.meta.cadence;
  for (const auto& s : case_series.samples) {
    const auto j = nearest_sample(control, s.timestamp, opt.match_tolerance);
    if (!j) {
      ++ts.skipped;
      continue;
    }
    const auto& c = control.samples[*j];
    std::optional<double> value;
    if (p == Parameter::utci_offset) {
      try {
        if (auto d = detail::drivers(s, case_series, opt.derivation)) {
          const auto ref = thermal::ReferenceConditions::from_control(c.t_air, c.rh);
          value = thermal::utci_offset(*d, ref).value;
        }
      } catch (const DomainError&) {
      } catch (const RangeError&) {
      }
    } else {
      const auto a = derive(s, case_series, p, opt.derivation);
      const auto b = derive(c, control, p, opt.derivation);
      if (a && b) value = *a - *b;
    }
    if (value)
      ts.values.push_back({s.timestamp, *value});
    else
      ++ts.skipped;
  }
  detail::finish(ts);
  return ts;
}

enum class DriftVerdict { stable, drifting };

inline std::string_view to_string(DriftVerdict v) { return v == DriftVerdict::stable ? "stable" : "drifting"; }

struct DriftThresholds {
  double short_window_amplitude = 1.0;  // °C, windows up to short_window_max
  double long_window_amplitude = 2.0;   // °C, longer windows
  Seconds short_window_max{2 * 3600};
  Seconds smoothing{300};
  std::size_t min_samples = 10;
};

struct DriftReport {
  Parameter parameter = Parameter::utci_offset;
  Instant window_start{};
  Instant window_end{};
  double amplitude = 0.0;    // °C, max - min of the smoothed offsets
  double trend_slope = 0.0;  // °C per hour, least squares
  double threshold = 0.0;    // °C, amplitude limit applied
  std::size_t samples = 0;
  DriftVerdict verdict = DriftVerdict::stable;
};

/**
 * Checks that an offset series stays constant over [start, end]. The series is
 * smoothed first; amplitude is max - min over the window and the verdict is
 * "stable" iff amplitude <= the threshold for the window length.
 */
inline DriftReport drift_diagnostic(const TimeSeries& offsets, Instant start, Instant end,
                                    const DriftThresholds& th = {}) {
  if (offsets.empty() || !(start < end) || end < offsets.values.front().time || start > offsets.values.back().time)
    throw DataMissingError("drift_diagnostic: window outside series range");
  const auto smoothed = smooth(offsets, th.smoothing);
  std::vector<TimedValue> w;
  for (const auto& v : smoothed.values)
    if (v.time >= start && v.time <= end) w.push_back(v);
  if (w.size() < th.min_samples)
    throw DataMissingError("drift_diagnostic: " + std::to_string(w.size()) + " samples in window, need " +
                           std::to_string(th.min_samples));

  DriftReport r;
  r.parameter = offsets.parameter;
  r.window_start = start;
  r.window_end = end;
  r.samples = w.size();
  const auto [mn, mx] = std::minmax_element(w.begin(), w.end(), [](auto& a, auto& b) { return a.value < b.value; });
  r.amplitude = mx->value - mn->value;

  // mean taken as deviations from the first value so a constant series has exactly zero residuals
  double mt = 0.0, dy = 0.0;
  for (const auto& v : w) {
    mt += hours_between(start, v.time);
    dy += v.value - w.front().value;
  }
  mt /= static_cast<double>(w.size());
  const double my = w.front().value + dy / static_cast<double>(w.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& v : w) {
    const double dt = hours_between(start, v.time) - mt;
    sxy += dt * (v.value - my);
    sxx += dt * dt;
  }
  r.trend_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  r.threshold = (end - start) <= th.short_window_max ? th.short_window_amplitude : th.long_window_amplitude;
  r.verdict = r.amplitude <= r.threshold ? DriftVerdict::stable : DriftVerdict::drifting;
  return r;
}

}  // namespace utcimap::series

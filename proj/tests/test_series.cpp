#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "utcimap/series.hpp"

using namespace utcimap;
using namespace utcimap::series;

namespace {

constexpr double kPi = 3.14159265358979323846;

Instant at(const char* s) { return *parse_timestamp(s); }

StationMeta meta(const char* id, StationRole role = StationRole::case_station) {
  StationMeta m;
  m.station_id = id;
  m.role = role;
  m.utc_offset_minutes = 120;
  return m;
}

ParsedStation parse(const std::string& csv, StationMeta m = meta("s")) {
  std::istringstream in(csv);
  return parse_station_csv(in, std::move(m));
}

StationSeries minute_series(const char* id, Instant t0, int n, double (*ta)(int), double rh = 40.0) {
  StationSeries s;
  s.meta = meta(id);
  for (int i = 0; i < n; ++i) {
    WeatherSample w;
    w.timestamp = t0 + std::chrono::minutes{i};
    w.t_air = ta(i);
    w.rh = rh;
    w.t_globe = w.t_air + 3.0;
    w.wind = 1.0;
    s.samples.push_back(w);
  }
  return s;
}

TimeSeries offsets_from(Instant t0, int n, Seconds step, auto f) {
  TimeSeries ts;
  ts.parameter = Parameter::utci_offset;
  ts.cadence = step;
  for (int i = 0; i < n; ++i) ts.values.push_back({t0 + i * step, f(i)});
  return ts;
}

}  // namespace

TEST(ParseStation, WellFormedFile) {
  const auto p = parse(
      "timestamp,t_air,rh,t_globe,wind,net_radiation\n"
      "2019-07-25T10:00:00+02:00,30.1,40,35.2,1.1,510\n"
      "2019-07-25T10:01:00+02:00,30.2,39.5,,1.0,\n"
      "2019-07-25T10:02:00+02:00,30.3,39,35.5,,520\n");
  EXPECT_EQ(p.series.samples.size(), 3u);
  EXPECT_TRUE(p.series.gaps.empty());
  EXPECT_EQ(p.report.dropped_rows, 0u);
  EXPECT_FALSE(p.series.samples[1].t_globe);
  EXPECT_FALSE(p.series.samples[2].wind);
  EXPECT_EQ(p.series.samples[0].timestamp, at("2019-07-25T08:00:00Z"));
}

TEST(ParseStation, MalformedTimestampRowIsDropped) {
  const auto p = parse(
      "timestamp,t_air,rh\n"
      "2019-07-25T10:00:00+02:00,30.1,40\n"
      "2019-07-25 1O:01,30.2,39.5\n"
      "2019-07-25T10:02:00+02:00,30.3,39\n");
  EXPECT_EQ(p.series.samples.size(), 2u);
  EXPECT_EQ(p.report.dropped_rows, 1u);
  ASSERT_EQ(p.report.drop_reasons.size(), 1u);
  EXPECT_NE(p.report.drop_reasons[0].find("line 3"), std::string::npos);
}

TEST(ParseStation, OutOfBoundsAndDuplicateRowsAreDropped) {
  const auto p = parse(
      "timestamp,t_air,rh\n"
      "2019-07-25T10:00:00+02:00,30.1,40\n"
      "2019-07-25T10:01:00+02:00,30.2,140\n"
      "2019-07-25T10:01:00+02:00,30.2,40\n"
      "2019-07-25T10:01:00+02:00,30.2,41\n"
      "2019-07-25T10:02:00+02:00,30.3,39\n");
  EXPECT_EQ(p.series.samples.size(), 3u);
  EXPECT_EQ(p.report.dropped_rows, 2u);
}

TEST(ParseStation, TenMissingMinutesGiveOneGapOf600s) {
  std::string csv = "timestamp,t_air,rh\n";
  for (int m = 0; m < 30; ++m) {
    if (m >= 10 && m < 20) continue;
    char buf[64];
    std::snprintf(buf, sizeof buf, "2019-07-25T10:%02d:00+02:00,30,40\n", m);
    csv += buf;
  }
  const auto p = parse(csv);
  ASSERT_EQ(p.series.gaps.size(), 1u);
  EXPECT_EQ(p.series.gaps[0].missing, Seconds{600});
  EXPECT_EQ(p.series.gaps[0].last_before, at("2019-07-25T10:09:00+02:00"));
  EXPECT_EQ(p.series.gaps[0].first_after, at("2019-07-25T10:20:00+02:00"));
  EXPECT_NE(p.report.to_text(120).find("missing_s=600"), std::string::npos);
}

TEST(ParseStation, MissingMandatoryColumn) {
  EXPECT_THROW(parse("timestamp,t_air\n2019-07-25T10:00:00+02:00,30\n"), SchemaError);
}

TEST(ParseStation, NoValidRows) {
  EXPECT_THROW(parse("timestamp,t_air,rh\n"), EmptyInputError);
  EXPECT_THROW(parse("timestamp,t_air,rh\nbad,30,40\n"), EmptyInputError);
}

TEST(ParseStation, CadenceMustMatchMedianSpacing) {
  std::string csv = "timestamp,t_air,rh\n";
  for (int m = 0; m < 10; m += 2) csv += "2019-07-25T10:0" + std::to_string(m) + ":00+02:00,30,40\n";
  EXPECT_THROW(parse(csv), SchemaError);
  auto m = meta("s");
  m.cadence = Seconds{120};
  EXPECT_NO_THROW(parse(csv, m));
}

TEST(ParseStation, ColumnRemappingAndNaiveTimestamps) {
  CsvSchema schema;
  schema.columns = {{"timestamp", "time"}, {"t_air", "Ta"}, {"rh", "RH"}};
  schema.delimiter = ';';
  std::istringstream in("time;Ta;RH\n2019-07-25 10:00;30,5;40\n2019-07-25 10:01;31;41\n");
  const auto p = parse_station_csv(in, meta("s"), schema);
  // "30,5" is not a number with ';' as delimiter: that row is dropped
  ASSERT_EQ(p.series.samples.size(), 1u);
  EXPECT_EQ(p.series.samples[0].timestamp, at("2019-07-25T08:01:00Z"));
}

TEST(ParseStation, SerializeRoundTrip) {
  const auto src = parse(
      "timestamp,t_air,rh,t_globe,wind,net_radiation\n"
      "2019-07-25T10:00:00+02:00,30.123456789,40.5,35.2,1.1,510\n"
      "2019-07-25T10:01:00+02:00,0.1,39.5,,1.0,\n"
      "2019-07-25T10:05:00+02:00,-3.3e-05,39,35.5,,-20\n");
  std::ostringstream out;
  write_station_csv(out, src.series);
  const auto again = parse(out.str());
  EXPECT_EQ(again.series.samples, src.series.samples);
  EXPECT_EQ(again.series.gaps, src.series.gaps);
}

TEST(Smooth, ConstantSeriesIsUnchanged) {
  const auto ts = offsets_from(at("2019-07-25T10:00:00Z"), 50, Seconds{60}, [](int) { return 1.7; });
  const auto sm = smooth(ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_EQ(sm.values[i].value, 1.7);
    EXPECT_EQ(sm.values[i].time, ts.values[i].time);
  }
}

TEST(Smooth, FivePointSpikeCentreAndEdge) {
  const double v[] = {0, 0, 10, 0, 0};
  const auto ts = offsets_from(at("2019-07-25T10:00:00Z"), 5, Seconds{60}, [&](int i) { return v[i]; });
  const auto sm = smooth(ts, Seconds{300});
  EXPECT_DOUBLE_EQ(sm.values[2].value, 2.0);
  EXPECT_DOUBLE_EQ(sm.values[0].value, 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(sm.values[1].value, 2.5);
}

TEST(Smooth, GapsAreNotBridged) {
  auto ts = offsets_from(at("2019-07-25T10:00:00Z"), 6, Seconds{60}, [](int i) { return i < 3 ? 0.0 : 10.0; });
  for (std::size_t i = 3; i < 6; ++i) ts.values[i].time += Seconds{600};
  const auto sm = smooth(ts, Seconds{300});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(sm.values[i].value, 0.0);
  for (std::size_t i = 3; i < 6; ++i) EXPECT_EQ(sm.values[i].value, 10.0);
}

TEST(Smooth, WindowShorterThanCadence) {
  const auto ts = offsets_from(at("2019-07-25T10:00:00Z"), 5, Seconds{60}, [](int) { return 0.0; });
  EXPECT_THROW(smooth(ts, Seconds{30}), std::invalid_argument);
}

TEST(Smooth, UnknownParameterName) { EXPECT_THROW(parse_parameter("globe_temp"), std::invalid_argument); }

TEST(Smooth, PreservesMeanOnPeriodicInterior) {
  // Period equal to the 5-sample window: every full interior window averages to the series mean.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double period[5];
    for (double& p : period) p = u(rng);
    const auto ts = offsets_from(at("2019-07-25T10:00:00Z"), 60, Seconds{60}, [&](int i) { return period[i % 5]; });
    const double mean = (period[0] + period[1] + period[2] + period[3] + period[4]) / 5.0;
    const auto sm = smooth(ts, Seconds{300});
    for (std::size_t i = 2; i + 2 < sm.size(); ++i) EXPECT_NEAR(sm.values[i].value, mean, 1e-9);
  }
}

TEST(Extract, DerivedParameters) {
  const auto s = minute_series("c", at("2019-07-25T08:00:00Z"), 3, [](int i) { return 30.0 + i; });
  const auto vp = extract(s, Parameter::vapor_pressure);
  ASSERT_EQ(vp.size(), 3u);
  EXPECT_DOUBLE_EQ(vp.values[0].value, thermal::vapor_pressure(30.0, 40.0));
  EXPECT_EQ(extract(s, Parameter::utci).size(), 3u);
  EXPECT_EQ(extract(s, Parameter::net_radiation).skipped, 3u);
}

TEST(OffsetSeries, IdenticalSeriesGiveZero) {
  const auto s = minute_series("c", at("2019-07-25T08:00:00Z"), 30, [](int i) { return 25.0 + 0.1 * i; });
  for (auto p : {Parameter::t_air, Parameter::vapor_pressure, Parameter::t_mrt, Parameter::utci, Parameter::utci_offset}) {
    const auto off = offset_series(s, s, p);
    ASSERT_EQ(off.size(), 30u) << to_string(p);
    if (p == Parameter::utci_offset) continue;
    for (const auto& v : off.values) EXPECT_EQ(v.value, 0.0) << to_string(p);
  }
}

TEST(OffsetSeries, ControlWarmerByOneDegree) {
  const auto a = minute_series("a", at("2019-07-25T08:00:00Z"), 30, [](int i) { return 25.0 + 0.25 * i; });
  const auto b = minute_series("b", at("2019-07-25T08:00:00Z"), 30, [](int i) { return 26.0 + 0.25 * i; });
  for (const auto& v : offset_series(a, b, Parameter::t_air).values) EXPECT_EQ(v.value, -1.0);
}

TEST(OffsetSeries, Antisymmetric) {
  const auto a = minute_series("a", at("2019-07-25T08:00:00Z"), 30, [](int i) { return 25.0 + std::sin(i * 0.3); });
  const auto b = minute_series("b", at("2019-07-25T08:00:00Z"), 30, [](int i) { return 26.0 + std::cos(i * 0.2); });
  for (auto p : {Parameter::t_air, Parameter::vapor_pressure, Parameter::utci}) {
    const auto ab = offset_series(a, b, p), ba = offset_series(b, a, p);
    ASSERT_EQ(ab.size(), ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
      EXPECT_EQ(ab.values[i].time, ba.values[i].time);
      EXPECT_EQ(ab.values[i].value, -ba.values[i].value);
    }
  }
}

TEST(OffsetSeries, CaseSampleBeyondToleranceIsSkipped) {
  auto c = minute_series("case", at("2019-07-25T08:00:00Z"), 5, [](int) { return 25.0; });
  const auto k = minute_series("ctrl", at("2019-07-25T08:00:00Z"), 3, [](int) { return 25.0; });
  c.samples[4].timestamp = at("2019-07-25T08:03:30Z");  // 90 s after the last control sample
  c.samples[3].timestamp = at("2019-07-25T08:03:00Z");
  const auto off = offset_series(c, k, Parameter::t_air);
  EXPECT_EQ(off.size(), 4u);
  EXPECT_EQ(off.skipped, 1u);
}

TEST(OffsetSeries, NoOverlap) {
  const auto a = minute_series("a", at("2019-07-25T08:00:00Z"), 10, [](int) { return 25.0; });
  const auto b = minute_series("b", at("2019-07-26T08:00:00Z"), 10, [](int) { return 25.0; });
  EXPECT_THROW(offset_series(a, b, Parameter::t_air), DataMissingError);
}

TEST(NearestSample, TiesGoToEarlier) {
  const auto s = minute_series("a", at("2019-07-25T08:00:00Z"), 3, [](int i) { return 20.0 + i; });
  EXPECT_EQ(nearest_sample(s, at("2019-07-25T08:00:30Z"), Seconds{60}), 0u);
  EXPECT_EQ(nearest_sample(s, at("2019-07-25T08:00:31Z"), Seconds{60}), 1u);
  EXPECT_FALSE(nearest_sample(s, at("2019-07-25T08:04:01Z"), Seconds{60}));
}

TEST(Drift, ConstantOffsetIsStable) {
  const auto t0 = at("2019-07-25T08:00:00Z");
  const auto ts = offsets_from(t0, 300, Seconds{60}, [](int) { return 3.25; });
  const auto r = drift_diagnostic(ts, t0, t0 + std::chrono::hours{4});
  EXPECT_EQ(r.amplitude, 0.0);
  EXPECT_EQ(r.trend_slope, 0.0);
  EXPECT_EQ(r.verdict, DriftVerdict::stable);
  EXPECT_EQ(r.threshold, 2.0);
}

TEST(Drift, LinearDeclineSlope) {
  // -2.0 C over 5.5 h; the peak-to-peak amplitude of the smoothed series stays
  // just under the 2.0 C long-window threshold.
  const auto t0 = at("2019-07-25T09:00:00Z");
  const int n = 331;
  const auto ts = offsets_from(t0, n, Seconds{60}, [](int i) { return -2.0 * i / 330.0; });
  const auto r = drift_diagnostic(ts, t0, t0 + Seconds{330 * 60});
  EXPECT_NEAR(r.trend_slope, -2.0 / 5.5, 1e-3);
  EXPECT_NEAR(r.trend_slope, -0.364, 5e-4);
  EXPECT_LT(r.amplitude, 2.0);
  EXPECT_GT(r.amplitude, 1.95);
  EXPECT_EQ(r.verdict, DriftVerdict::stable);
}

TEST(Drift, LinearDeclineWithFluctuationIsDrifting) {
  const auto t0 = at("2019-07-25T09:00:00Z");
  const auto ts = offsets_from(t0, 331, Seconds{60},
                               [](int i) { return -2.0 * i / 330.0 + 0.3 * std::sin(2 * kPi * i / 60.0); });
  const auto r = drift_diagnostic(ts, t0, t0 + Seconds{330 * 60});
  EXPECT_GT(r.amplitude, 2.0);
  EXPECT_EQ(r.verdict, DriftVerdict::drifting);
  EXPECT_NEAR(r.trend_slope, -0.364, 0.05);
}

TEST(Drift, TwoHourSinusoidOfAmplitude08IsStable) {
  const auto t0 = at("2019-07-25T10:00:00Z");
  const auto ts = offsets_from(t0, 121, Seconds{60}, [](int i) { return 0.4 * std::sin(2 * kPi * i / 60.0); });
  const auto r = drift_diagnostic(ts, t0, t0 + std::chrono::hours{2});
  EXPECT_EQ(r.threshold, 1.0);
  EXPECT_LE(r.amplitude, 0.8);
  EXPECT_GT(r.amplitude, 0.7);
  EXPECT_EQ(r.verdict, DriftVerdict::stable);
}

TEST(Drift, VerdictInvariantUnderConstantShift) {
  const auto t0 = at("2019-07-25T10:00:00Z");
  auto f = [](int i) { return 0.7 * std::sin(i / 17.0) + 0.002 * i; };
  const auto a = offsets_from(t0, 200, Seconds{60}, f);
  for (double c : {-5.0, 0.5, 12.0}) {
    const auto b = offsets_from(t0, 200, Seconds{60}, [&](int i) { return f(i) + c; });
    const auto ra = drift_diagnostic(a, t0, t0 + std::chrono::hours{3});
    const auto rb = drift_diagnostic(b, t0, t0 + std::chrono::hours{3});
    EXPECT_EQ(ra.verdict, rb.verdict);
    EXPECT_NEAR(ra.amplitude, rb.amplitude, 1e-9);
    EXPECT_NEAR(ra.trend_slope, rb.trend_slope, 1e-9);
  }
}

TEST(Drift, WindowOutsideSeriesOrTooFewSamples) {
  const auto t0 = at("2019-07-25T10:00:00Z");
  const auto ts = offsets_from(t0, 60, Seconds{60}, [](int) { return 0.0; });
  EXPECT_THROW(drift_diagnostic(ts, t0 + std::chrono::hours{5}, t0 + std::chrono::hours{6}), DataMissingError);
  EXPECT_THROW(drift_diagnostic(ts, t0, t0 + Seconds{300}), DataMissingError);
}

TEST(Drift, Deterministic) {
  const auto t0 = at("2019-07-25T10:00:00Z");
  const auto ts = offsets_from(t0, 200, Seconds{60}, [](int i) { return std::sin(i / 9.0); });
  const auto a = drift_diagnostic(ts, t0, t0 + std::chrono::hours{3});
  const auto b = drift_diagnostic(ts, t0, t0 + std::chrono::hours{3});
  EXPECT_EQ(a.amplitude, b.amplitude);
  EXPECT_EQ(a.trend_slope, b.trend_slope);
  EXPECT_EQ(a.verdict, b.verdict);
}

TEST(Names, RolesAndParametersRoundTrip) {
  for (auto r : {StationRole::case_station, StationRole::control, StationRole::onsite_fixed})
    EXPECT_EQ(parse_station_role(to_string(r)), r);
  for (auto p : {Parameter::t_air, Parameter::rh, Parameter::t_globe, Parameter::wind, Parameter::net_radiation,
                 Parameter::vapor_pressure, Parameter::t_mrt, Parameter::utci, Parameter::utci_offset})
    EXPECT_EQ(parse_parameter(to_string(p)), p);
}

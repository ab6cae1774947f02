// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "../support/synthetic.hpp"
#include "utcimap/analysis.hpp"
#include "utcimap/app.hpp"

using namespace utcimap;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string{"exception: "} + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[192];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome utci_oracle() {
  const auto rows = synth::oracle_grid();
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& r : rows)
    worst = std::max(worst, std::abs(thermal::utci({r.t_air, r.t_mrt, r.wind_10m, r.vapor_pressure}) - r.utci));
  const double dt = seconds_since(t0);
  return {rows.size() == 1000 && worst <= 0.01 && dt < 1.0,
          fmt("n=%.0f max|diff|=%.3g C runtime=%.4f s", static_cast<double>(rows.size()), worst, dt)};
}

Outcome mrt_identity() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> t(-50.0, 50.0), v(0.0, 17.0);
  double worst = 0.0;
  for (auto f : {thermal::GlobeFormula::iso7726_forced, thermal::GlobeFormula::ashrae_standard_globe}) {
    thermal::GlobeSpec s;
    s.formula = f;
    for (int i = 0; i < 10000; ++i) {
      const double x = t(rng);
      worst = std::max(worst, std::abs(thermal::mrt_from_globe(x, x, v(rng), s) - x));
    }
  }
  return {worst <= 1e-9, fmt("2 x 10000 draws, max|mrt-t|=%.3g", worst)};
}

Outcome null_offset() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> t(-45.0, 45.0), u(0.0, 1.0);
  int nonzero = 0;
  for (int i = 0; i < 1000; ++i) {
    const double ta = t(rng);
    const double rh_max = std::min(100.0, 100.0 * thermal::kUtciMaxVaporPressure / thermal::saturation_vapor_pressure(ta));
    const auto ref = thermal::ReferenceConditions::from_control(ta, rh_max * u(rng));
    if (thermal::utci_offset(ref.drivers(), ref).value != 0.0) ++nonzero;
  }
  return {nonzero == 0, fmt("1000 draws, %.0f nonzero offsets", nonzero)};
}

Outcome day_filter_matrix() {
  int wrong = 0, cases = 0;
  for (double tmax : {24.9, 25.0, 25.1})
    for (double tmin : {15.9, 16.0, 16.1})
      for (int oktas : {2, 3, 4}) {
        campaign::DaySummary d;
        d.t_max = tmax;
        d.t_min = tmin;
        d.cloud_cover_oktas = oktas;
        d.stability_class = campaign::StabilityClass::A;
        const bool expected = tmax > 25.0 && tmin > 16.0 && oktas <= 3;
        if (campaign::day_filter(d).accepted != expected) ++wrong;
        ++cases;
      }
  return {wrong == 0, fmt("%.0f cases, %.0f mismatches", cases, wrong)};
}

series::TimeSeries minute_offsets(Instant t0, int minutes, const std::function<double(int)>& f) {
  series::TimeSeries ts;
  for (int i = 0; i <= minutes; ++i) ts.values.push_back({t0 + Seconds{60 * i}, f(i)});
  return ts;
}

Outcome drift_rules() {
  constexpr double pi = 3.14159265358979323846;
  const auto t0 = *parse_timestamp("2019-07-25T10:00:00Z");
  // 2 h: slow oscillation spanning 0.9 C; 5 h: ramp spanning 2.5 C
  const auto shortw = minute_offsets(t0, 120, [&](int i) { return 0.45 * std::sin(2 * pi * i / 120.0) + 1.0; });
  const auto longw = minute_offsets(t0, 300, [](int i) { return 2.5 * i / 300.0; });
  const auto a = series::drift_diagnostic(shortw, t0, t0 + std::chrono::hours{2});
  const auto b = series::drift_diagnostic(longw, t0, t0 + std::chrono::hours{5});
  const auto a2 = series::drift_diagnostic(shortw, t0, t0 + std::chrono::hours{2});
  const auto b2 = series::drift_diagnostic(longw, t0, t0 + std::chrono::hours{5});
  const bool same = a.amplitude == a2.amplitude && a.verdict == a2.verdict && b.amplitude == b2.amplitude &&
                    b.verdict == b2.verdict;
  const bool ok = a.verdict == series::DriftVerdict::stable && a.threshold == 1.0 &&
                  b.verdict == series::DriftVerdict::drifting && b.threshold == 2.0 && same;
  return {ok, fmt("2h amplitude=%.3f C ", a.amplitude) + std::string{series::to_string(a.verdict)} +
                  fmt(", 5h amplitude=%.3f C ", b.amplitude) + std::string{series::to_string(b.verdict)} +
                  (same ? ", repeatable" : ", NOT repeatable")};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  const auto c = synth::default_campaign();
  const auto d = campaign::summarize_day(c.control, c.plan.date, c.plan.utc_offset_minutes, 1);
  const auto out = campaign::process_campaign(c.plan, c.log, c.control, campaign::day_filter(d.summary), &c.onsite);
  const double dt = seconds_since(t0);
  double worst = 0.0;
  bool all = out.results.size() == c.points.size();
  for (std::size_t i = 0; all && i < c.points.size(); ++i)
    worst = std::max(worst, std::abs(out.results[i].offset.value - c.points[i].target));
  return {all && worst <= 0.2 && dt < 10.0,
          fmt("%.0f points, max|recovered-injected|=%.4f C, runtime=%.3f s", static_cast<double>(out.results.size()),
              worst, dt)};
}

Outcome ucp_anchors() {
  const bool anchors = geo::ucp_value(1.0, 0.0, 0.0) == 1.0 && geo::ucp_value(1.0, 0.0, 1.0) == 0.0 &&
                       geo::ucp_value(0.4, 0.2, 1.0) == 0.0;
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto layer = [&](geo::Semantic s) {
    geo::RasterLayer r;
    r.semantic = s;
    r.header.ncols = r.header.nrows = 8;
    r.values.resize(64);
    for (auto& v : r.values) v = u(rng);
    return r;
  };
  std::size_t outside = 0, cells = 0;
  for (int i = 0; i < 1000; ++i) {
    geo::UcpOptions opt;
    opt.formula = i % 2 ? geo::UcpFormula::weighted_sum : geo::UcpFormula::product;
    const auto r = geo::compute_ucp(layer(geo::Semantic::albedo), layer(geo::Semantic::vegetation_fraction),
                                    layer(geo::Semantic::irradiance_normalized), opt);
    for (double v : r.values) {
      ++cells;
      if (!(v >= 0.0 && v <= 1.0)) ++outside;
    }
  }
  return {anchors && outside == 0,
          std::string{anchors ? "anchors exact" : "anchors WRONG"} +
              fmt(", 1000 rasters, %.0f cells, %.0f outside [0,1]", static_cast<double>(cells),
                  static_cast<double>(outside))};
}

Outcome ucp_correlation() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = 40;
  std::vector<double> signal(n), eps(n);
  for (std::size_t i = 0; i < n; ++i) {
    signal[i] = 8.0 * u(rng);
    eps[i] = noise(rng);
  }
  auto sd = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  // scale noise so that sd(signal) / sd(noise) == 3
  const double k = sd(signal) / (3.0 * sd(eps));
  std::vector<analysis::OffsetUcpPair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    pairs.push_back({-1.0 + signal[i] + k * eps[i], signal[i] / 8.0, "S" + std::to_string(i)});
  const auto c = analysis::correlate_offset_ucp(pairs);
  return {c.spearman_rho > 0.7, fmt("n=%.0f SNR=3 spearman_rho=%.3f", static_cast<double>(n), c.spearman_rho)};
}

Outcome baci_recovery() {
  // case and control on a 1/256 grid so case - control is exact
  auto q = [](double x) { return std::round(x * 256.0) / 256.0; };
  auto station = [](const char* id, series::StationRole role) {
    series::StationSeries s;
    s.meta.station_id = id;
    s.meta.role = role;
    return s;
  };
  auto ctrl = station("ctrl", series::StationRole::control);
  auto cas = station("case", series::StationRole::onsite_fixed);
  constexpr double pi = 3.14159265358979323846;
  auto fill = [&](Date first, double effect) {
    const auto t0 = std::chrono::sys_days{first};
    std::mt19937_64 rng(113);  // same noise realisation in both periods
    std::normal_distribution<double> noise(0.0, 0.3);
    for (int m = 0; m < 10 * 24 * 60; ++m) {
      const Instant t = t0 + std::chrono::minutes{m};
      const double h = (m % 1440) / 60.0;
      const double base = q(24.0 + 6.0 * std::sin(2 * pi * (h - 9.0) / 24.0));
      const double diff = q(0.8 + 0.5 * std::sin(2 * pi * (h - 12.0) / 24.0) + noise(rng)) + effect;
      series::WeatherSample a, b;
      a.timestamp = b.timestamp = t;
      a.t_air = base;
      b.t_air = base + diff;
      ctrl.samples.push_back(a);
      cas.samples.push_back(b);
    }
  };
  fill(synth::ymd(2019, 6, 1), 0.0);
  fill(synth::ymd(2020, 6, 1), -1.0);
  const auto off = series::offset_series(cas, ctrl, series::Parameter::t_air);

  analysis::BaciDataset d;
  d.before.parameter = d.after.parameter = d.parameter = series::Parameter::t_air;
  const Instant split = std::chrono::sys_days{synth::ymd(2020, 1, 1)};
  for (const auto& v : off.values) (v.time < split ? d.before : d.after).values.push_back(v);
  analysis::BaciOptions o;
  o.seed = 20190725;
  const auto e1 = analysis::baci_effect(d, o);
  const auto e2 = analysis::baci_effect(d, o);
  const bool bits = std::memcmp(&e1.ci_low, &e2.ci_low, sizeof(double)) == 0 &&
                    std::memcmp(&e1.ci_high, &e2.ci_high, sizeof(double)) == 0 &&
                    std::memcmp(&e1.effect, &e2.effect, sizeof(double)) == 0;
  const bool ok = e1.effect == -1.0 && e1.ci_high < 0.0 && bits && e1.days_before == 10 && e1.days_after == 10 &&
                  e1.n_before == 14400 && e1.n_after == 14400;
  return {ok, fmt("effect=%.17g CI95=[%.4f, %.4f]", e1.effect, e1.ci_low, e1.ci_high) +
                  (bits ? ", bit-identical rerun" : ", rerun DIFFERS")};
}

Outcome process_determinism() {
  const auto dir = fs::temp_directory_path() / "utcimap_acceptance_determinism";
  const auto run = synth::write_run(dir, {synth::default_campaign()}, nlohmann::json::object(), true);
  auto cfg = app::load_run_config(run.config);
  const std::vector<std::string> files{"before_points.csv", "before_points.geojson", "before_points.svg"};
  std::vector<std::string> first;
  for (const char* sub : {"out_a", "out_b"}) {
    cfg.output_dir = dir / sub;
    std::ostringstream out, log;
    if (app::run_process(cfg, "before", {}, out, log) != app::kExitOk) return {false, "process failed: " + log.str()};
  }
  std::size_t differ = 0;
  for (const auto& f : files)
    if (text::read_file(dir / "out_a" / f) != text::read_file(dir / "out_b" / f)) ++differ;
  fs::remove_all(dir);
  return {differ == 0, fmt("%.0f output files compared, %.0f differ", static_cast<double>(files.size()),
                           static_cast<double>(differ))};
}

}  // namespace

int main() {
  report(1, "UTCI oracle equivalence", utci_oracle);
  report(2, "MRT identity", mrt_identity);
  report(3, "offset null case", null_offset);
  report(4, "day filter boundary matrix", day_filter_matrix);
  report(5, "drift diagnostics", drift_rules);
  report(6, "end-to-end synthetic campaign", end_to_end);
  report(7, "UCP anchors and range", ucp_anchors);
  report(8, "offset/UCP correlation", ucp_correlation);
  report(9, "BACI synthetic recovery", baci_recovery);
  report(10, "process determinism", process_determinism);
  return failures == 0 ? 0 : 1;
}

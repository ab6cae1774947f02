#pragma once

/**
 * @file analysis.hpp
 * @brief BACI effect estimation on case-minus-control offsets and the
 *        association between UTCI offsets and UCP.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "utcimap/errors.hpp"
#include "utcimap/series.hpp"
#include "utcimap/text.hpp"
#include "utcimap/time.hpp"

namespace utcimap::analysis {

// ---------------------------------------------------------------------------
// Deterministic random streams
// ---------------------------------------------------------------------------

// SplitMix64. Each bootstrap resample draws from its own stream derived from
// (seed, resample index), so results do not depend on evaluation order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    g.next();
    return g;
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t r = next();
    while (r < threshold) r = next();
    return r % n;
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// BACI
// ---------------------------------------------------------------------------

struct Period {
  Instant start{};
  Instant end{};
};

struct BaciDataset {
  series::TimeSeries before;  // case - control offsets
  series::TimeSeries after;
  series::Parameter parameter = series::Parameter::t_air;
  std::optional<Period> before_period;
  std::optional<Period> after_period;
  int utc_offset_minutes = 0;  // local days and hours for blocking and hour filtering

  void validate() const {
    if (before.parameter != parameter || after.parameter != parameter)
      throw std::invalid_argument("baci: before/after series carry a different parameter");
    if (!before.empty() && !after.empty()) {
      const bool disjoint = before.values.back().time < after.values.front().time ||
                            after.values.back().time < before.values.front().time;
      if (!disjoint) throw std::invalid_argument("baci: before and after periods overlap");
    }
  }
};

struct BaciOptions {
  std::optional<std::pair<int, int>> hour_filter;  // local hours [h1, h2)
  std::size_t bootstrap_n = 2000;
  double confidence = 0.95;
  std::uint64_t seed = 0;
};

struct EffectEstimate {
  double effect = 0.0;  // mean(after) - mean(before)
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_before = 0;
  std::size_t n_after = 0;
  std::size_t days_before = 0;
  std::size_t days_after = 0;
  std::string method = "baci-bootstrap";
};

namespace detail {

struct DayBlock {
  double sum = 0.0;
  std::size_t count = 0;
};

inline std::vector<DayBlock> day_blocks(const series::TimeSeries& ts, const std::optional<Period>& period,
                                        const BaciOptions& opt, int utc_offset) {
  std::map<std::chrono::sys_days, DayBlock> by_day;
  for (const auto& v : ts.values) {
    if (period && (v.time < period->start || v.time > period->end)) continue;
    if (opt.hour_filter) {
      const auto h = std::chrono::duration_cast<std::chrono::hours>(local_time_of_day(v.time, utc_offset)).count();
      if (h < opt.hour_filter->first || h >= opt.hour_filter->second) continue;
    }
    auto& b = by_day[std::chrono::sys_days{local_date(v.time, utc_offset)}];
    b.sum += v.value;
    ++b.count;
  }
  std::vector<DayBlock> out;
  out.reserve(by_day.size());
  for (const auto& [d, b] : by_day) out.push_back(b);
  return out;
}

// mean_a - mean_b as a single rounding of the cross-multiplied difference
inline double mean_difference(double sum_a, double n_a, double sum_b, double n_b) {
  return (sum_a * n_b - sum_b * n_a) / (n_a * n_b);
}

inline double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(i);
  if (i + 1 >= s.size()) return s.back();
  return s[i] + frac * (s[i + 1] - s[i]);
}

}  // namespace detail

/**
 * BACI effect: mean after-period offset minus mean before-period offset.
 * The percentile confidence interval resamples whole local days within each
 * period, keeping the serial correlation of minute data inside a block.
 */
inline EffectEstimate baci_effect(const BaciDataset& data, const BaciOptions& opt = {}) {
  data.validate();
  if (opt.bootstrap_n == 0) throw std::invalid_argument("baci: bootstrap_n must be > 0");
  if (!(opt.confidence > 0.0 && opt.confidence < 1.0)) throw std::invalid_argument("baci: confidence must be in (0,1)");
  const auto before = detail::day_blocks(data.before, data.before_period, opt, data.utc_offset_minutes);
  const auto after = detail::day_blocks(data.after, data.after_period, opt, data.utc_offset_minutes);
  if (before.empty()) throw EmptyInputError("baci: before period is empty after filtering");
  if (after.empty()) throw EmptyInputError("baci: after period is empty after filtering");

  auto totals = [](const std::vector<detail::DayBlock>& blocks) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& b : blocks) s += b.sum, n += b.count;
    return std::pair{s, n};
  };
  const auto [sb, nb] = totals(before);
  const auto [sa, na] = totals(after);

  EffectEstimate est;
  est.n_before = nb;
  est.n_after = na;
  est.days_before = before.size();
  est.days_after = after.size();
  est.effect = detail::mean_difference(sa, static_cast<double>(na), sb, static_cast<double>(nb));

  std::vector<double> boot(opt.bootstrap_n);
  for (std::size_t k = 0; k < opt.bootstrap_n; ++k) {
    auto rng = SplitMix64::stream(opt.seed, k);
    auto draw = [&rng](const std::vector<detail::DayBlock>& blocks) {
      double s = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[rng.below(blocks.size())];
        s += b.sum;
        n += b.count;
      }
      return std::pair{s, n};
    };
    const auto [bs, bn] = draw(before);
    const auto [as, an] = draw(after);
    boot[k] = detail::mean_difference(as, static_cast<double>(an), bs, static_cast<double>(bn));
  }
  std::sort(boot.begin(), boot.end());
  const double alpha = 1.0 - opt.confidence;
  est.ci_low = std::min(detail::quantile_sorted(boot, alpha / 2), est.effect);
  est.ci_high = std::max(detail::quantile_sorted(boot, 1.0 - alpha / 2), est.effect);
  return est;
}

inline std::string to_text(const EffectEstimate& e) {
  std::ostringstream os;
  os << "method: " << e.method << "\n"
     << "effect_c: " << text::format_fixed(e.effect, 4) << "\n"
     << "ci95_low_c: " << text::format_fixed(e.ci_low, 4) << "\n"
     << "ci95_high_c: " << text::format_fixed(e.ci_high, 4) << "\n"
     << "n_before: " << e.n_before << " (" << e.days_before << " days)\n"
     << "n_after: " << e.n_after << " (" << e.days_after << " days)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Offset vs UCP association
// ---------------------------------------------------------------------------

struct OffsetUcpPair {
  double offset = 0.0;  // °C
  double ucp = 0.0;
  std::string label;
};

struct Correlation {
  double spearman_rho = 0.0;
  double pearson_r = 0.0;
  std::size_t n = 0;
};

/// Ranks starting at 1; tied values share the average of their ranks.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline Correlation correlate_offset_ucp(std::span<const OffsetUcpPair> pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("correlate_offset_ucp: need at least 3 pairs");
  std::vector<double> off, ucp;
  for (const auto& p : pairs) {
    if (!std::isfinite(p.offset)) throw DomainError("correlate_offset_ucp: non-finite offset");
    if (!(p.ucp >= 0.0 && p.ucp <= 1.0))
      throw RangeError("ucp", "correlate_offset_ucp: ucp " + text::format_double(p.ucp) + " outside [0, 1]");
    off.push_back(p.offset);
    ucp.push_back(p.ucp);
  }
  Correlation c;
  c.n = pairs.size();
  c.pearson_r = pearson(ucp, off);
  const auto ro = average_ranks(off);
  const auto ru = average_ranks(ucp);
  c.spearman_rho = pearson(ru, ro);
  return c;
}

// ---------------------------------------------------------------------------
// Scatter export
// ---------------------------------------------------------------------------

inline std::string scatter_csv(std::span<const OffsetUcpPair> pairs) {
  std::ostringstream os;
  os << "label,ucp,offset_c\n";
  for (const auto& p : pairs) os << p.label << ',' << text::format_double(p.ucp) << ',' << text::format_double(p.offset) << '\n';
  return os.str();
}

/// Static scatter plot, UCP on x (0..1) and UTCI offset on y. Byte-identical for identical input.
inline std::string scatter_svg(std::span<const OffsetUcpPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("scatter_svg: no pairs");
  constexpr double W = 640, H = 480, L = 70, R = 20, T = 20, B = 60;
  double lo = 0.0, hi = 0.0;
  for (const auto& p : pairs) lo = std::min(lo, p.offset), hi = std::max(hi, p.offset);
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi - lo < 1.0) hi = lo + 1.0;
  const double step = std::max(1.0, std::ceil((hi - lo) / 8.0));
  lo = std::floor(lo / step) * step;
  hi = std::ceil(hi / step) * step;

  auto px = [&](double u) { return L + u * (W - L - R); };
  auto py = [&](double o) { return H - B - (o - lo) / (hi - lo) * (H - T - B); };
  auto f = [](double v) { return text::format_fixed(v, 2); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
     << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
     << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << f(L) << "\" y1=\"" << f(H - B) << "\" x2=\"" << f(W - R) << "\" y2=\"" << f(H - B) << "\"/>\n"
     << "<line x1=\"" << f(L) << "\" y1=\"" << f(T) << "\" x2=\"" << f(L) << "\" y2=\"" << f(H - B) << "\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double x = px(i / 5.0);
    os << "<line x1=\"" << f(x) << "\" y1=\"" << f(H - B) << "\" x2=\"" << f(x) << "\" y2=\"" << f(H - B + 5) << "\"/>\n";
  }
  for (double o = lo; o <= hi + 1e-9; o += step) {
    const double y = py(o);
    os << "<line x1=\"" << f(L - 5) << "\" y1=\"" << f(y) << "\" x2=\"" << f(L) << "\" y2=\"" << f(y) << "\"/>\n";
  }
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int i = 0; i <= 5; ++i)
    os << "<text x=\"" << f(px(i / 5.0)) << "\" y=\"" << f(H - B + 20) << "\" text-anchor=\"middle\">"
       << text::format_fixed(i / 5.0, 1) << "</text>\n";
  for (double o = lo; o <= hi + 1e-9; o += step)
    os << "<text x=\"" << f(L - 8) << "\" y=\"" << f(py(o) + 4) << "\" text-anchor=\"end\">" << text::format_fixed(o, 0)
       << "</text>\n";
  os << "<text x=\"" << f(L + (W - L - R) / 2) << "\" y=\"" << f(H - 15) << "\" text-anchor=\"middle\">UCP (-)</text>\n"
     << "<text x=\"15\" y=\"" << f(T + (H - T - B) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
     << f(T + (H - T - B) / 2) << ")\">UTCI offset (&#176;C)</text>\n"
     << "</g>\n<g fill=\"#c0392b\" stroke=\"black\" stroke-width=\"0.5\">\n";
  for (const auto& p : pairs)
    os << "<circle cx=\"" << f(px(std::clamp(p.ucp, 0.0, 1.0))) << "\" cy=\"" << f(py(p.offset)) << "\" r=\"4\"/>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

/// Writes <stem>.csv and <stem>.svg atomically.
inline void export_scatter(std::span<const OffsetUcpPair> pairs, const std::filesystem::path& stem) {
  if (pairs.empty()) throw std::invalid_argument("export_scatter: no pairs");
  auto csv = stem;
  csv += ".csv";
  auto svg = stem;
  svg += ".svg";
  text::write_file_atomic(csv, scatter_csv(pairs));
  text::write_file_atomic(svg, scatter_svg(pairs));
}

}  // namespace utcimap::analysis

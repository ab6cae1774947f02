#pragma once

/**
 * @file geo.hpp
 * @brief ESRI ASCII grids, the Urban Cooling Potential (UCP) indicator,
 *        point sampling and GeoJSON heat-map export.
 *
 * Coordinates are planar; rasters and traverse points must share one
 * coordinate system.
 */

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "utcimap/campaign.hpp"
#include "utcimap/errors.hpp"
#include "utcimap/text.hpp"

namespace utcimap::geo {

enum class Semantic {
  albedo,
  vegetation_fraction,
  irradiance_normalized,
  ucp,
  physical,  // unbounded quantity, e.g. raw irradiance in W/m²
};

inline std::string_view to_string(Semantic s) {
  switch (s) {
    case Semantic::albedo: return "albedo";
    case Semantic::vegetation_fraction: return "vegetation_fraction";
    case Semantic::irradiance_normalized: return "irradiance_normalized";
    case Semantic::ucp: return "ucp";
    case Semantic::physical: return "physical";
  }
  return "unknown";
}

inline bool is_unit_interval(Semantic s) { return s != Semantic::physical; }

struct GridHeader {
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  double xll = 0.0;  // lower-left corner of the grid
  double yll = 0.0;
  double cellsize = 1.0;
  std::optional<double> nodata;
  std::vector<std::string> lines;  // header text as read, echoed on write

  bool same_geometry(const GridHeader& o) const {
    return ncols == o.ncols && nrows == o.nrows && xll == o.xll && yll == o.yll && cellsize == o.cellsize;
  }
};

/// Row-major grid, first row northernmost. Nodata cells hold the header's sentinel.
struct RasterLayer {
  GridHeader header;
  Semantic semantic = Semantic::physical;
  std::vector<double> values;

  std::size_t ncols() const { return header.ncols; }
  std::size_t nrows() const { return header.nrows; }
  double at(std::size_t row, std::size_t col) const { return values[row * header.ncols + col]; }
  bool is_nodata(double v) const { return header.nodata && v == *header.nodata; }

  double x_center(std::size_t col) const { return header.xll + (static_cast<double>(col) + 0.5) * header.cellsize; }
  double y_center(std::size_t row) const {
    return header.yll + (static_cast<double>(header.nrows - row) - 0.5) * header.cellsize;
  }

  void validate() const {
    if (values.size() != header.ncols * header.nrows)
      throw SchemaError("raster: value count " + std::to_string(values.size()) + " != ncols*nrows " +
                        std::to_string(header.ncols * header.nrows));
    if (!is_unit_interval(semantic)) return;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      if (is_nodata(v)) continue;
      if (!(v >= 0.0 && v <= 1.0))
        throw RangeError(std::string{to_string(semantic)}, "raster: " + std::string{to_string(semantic)} +
                                                               " value " + text::format_double(v) + " at cell " +
                                                               std::to_string(i) + " outside [0, 1]");
    }
  }
};

using UcpRaster = RasterLayer;

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out{s};
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline double header_number(const std::string& token, const std::string& key) {
  auto v = text::parse_double(token);
  if (!v) throw SchemaError("ascii grid: bad value for " + key);
  return *v;
}

}  // namespace detail

inline RasterLayer parse_ascii_grid(std::istream& in, Semantic semantic, const std::string& source = "<stream>") {
  RasterLayer r;
  r.semantic = semantic;
  bool have_cols = false, have_rows = false, have_x = false, have_y = false, have_cell = false;
  bool x_center = false, y_center = false;
  std::string line;
  std::streampos data_start = in.tellg();
  while (true) {
    data_start = in.tellg();
    if (!std::getline(in, line)) break;
    std::istringstream ls(line);
    std::string key, value;
    ls >> key;
    if (key.empty()) continue;
    if (!std::isalpha(static_cast<unsigned char>(key[0]))) break;
    ls >> value;
    const auto k = detail::lower(key);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    r.header.lines.push_back(line);
    if (k == "ncols") {
      r.header.ncols = static_cast<std::size_t>(detail::header_number(value, k));
      have_cols = true;
    } else if (k == "nrows") {
      r.header.nrows = static_cast<std::size_t>(detail::header_number(value, k));
      have_rows = true;
    } else if (k == "xllcorner" || k == "xllcenter") {
      r.header.xll = detail::header_number(value, k);
      x_center = k == "xllcenter";
      have_x = true;
    } else if (k == "yllcorner" || k == "yllcenter") {
      r.header.yll = detail::header_number(value, k);
      y_center = k == "yllcenter";
      have_y = true;
    } else if (k == "cellsize") {
      r.header.cellsize = detail::header_number(value, k);
      have_cell = true;
    } else if (k == "nodata_value") {
      r.header.nodata = detail::header_number(value, k);
    } else {
      throw SchemaError(source + ": unknown header key '" + key + "'");
    }
  }
  if (!have_cols || !have_rows || !have_x || !have_y || !have_cell || r.header.ncols == 0 || r.header.nrows == 0 ||
      !(r.header.cellsize > 0.0))
    throw SchemaError(source + ": malformed ascii grid header");
  if (x_center) r.header.xll -= r.header.cellsize / 2;
  if (y_center) r.header.yll -= r.header.cellsize / 2;

  in.clear();
  in.seekg(data_start);
  std::string tok;
  while (in >> tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw SchemaError(source + ": bad grid value '" + tok + "'");
    r.values.push_back(v);
  }
  r.validate();
  return r;
}

inline RasterLayer parse_ascii_grid(const std::filesystem::path& path, Semantic semantic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataMissingError("cannot open grid " + path.string());
  return parse_ascii_grid(in, semantic, path.string());
}

/// Header lines are written exactly as read; values in shortest round-trip form.
inline void write_ascii_grid(std::ostream& os, const RasterLayer& r) {
  for (const auto& l : r.header.lines) os << l << '\n';
  for (std::size_t row = 0; row < r.nrows(); ++row) {
    for (std::size_t col = 0; col < r.ncols(); ++col) {
      if (col) os << ' ';
      os << text::format_double(r.at(row, col));
    }
    os << '\n';
  }
}

inline std::string to_ascii_grid(const RasterLayer& r) {
  std::ostringstream os;
  write_ascii_grid(os, r);
  return os.str();
}

/// Raw irradiance (W/m²) divided by an explicit unobstructed-sky reference, clamped to [0, 1].
inline RasterLayer normalize_irradiance(const RasterLayer& raw, double reference_wm2) {
  if (!(reference_wm2 > 0.0)) throw std::invalid_argument("normalize_irradiance: reference must be > 0");
  RasterLayer out = raw;
  out.semantic = Semantic::irradiance_normalized;
  for (auto& v : out.values)
    if (!raw.is_nodata(v)) v = std::clamp(v / reference_wm2, 0.0, 1.0);
  out.validate();
  return out;
}

enum class UcpFormula { product, weighted_sum };

struct UcpOptions {
  UcpFormula formula = UcpFormula::product;
  // weighted_sum only; normalised by their sum
  double weight_irradiance = 1.0;
  double weight_albedo = 1.0;
  double weight_vegetation = 1.0;
};

/// UCP for one cell from normalised irradiance, albedo and vegetation fraction.
inline double ucp_value(double irradiance, double albedo, double vegetation, const UcpOptions& opt = {}) {
  double v = 0.0;
  if (opt.formula == UcpFormula::product) {
    v = irradiance * (1.0 - albedo) * (1.0 - vegetation);
  } else {
    const double w = opt.weight_irradiance + opt.weight_albedo + opt.weight_vegetation;
    if (!(w > 0.0)) throw std::invalid_argument("ucp weights must sum to > 0");
    v = (opt.weight_irradiance * irradiance + opt.weight_albedo * (1.0 - albedo) +
         opt.weight_vegetation * (1.0 - vegetation)) / w;
  }
  return std::clamp(v, 0.0, 1.0);
}

/**
 * Urban Cooling Potential: 1 for fully sunlit, zero-albedo, unvegetated
 * ground; 0 under full vegetation cover. Nodata in any input gives nodata.
 */
inline UcpRaster compute_ucp(const RasterLayer& albedo, const RasterLayer& vegetation, const RasterLayer& irradiance,
                             const UcpOptions& opt = {}) {
  if (albedo.semantic != Semantic::albedo || vegetation.semantic != Semantic::vegetation_fraction ||
      irradiance.semantic != Semantic::irradiance_normalized)
    throw std::invalid_argument("compute_ucp: layers must be albedo, vegetation_fraction, irradiance_normalized");
  if (!albedo.header.same_geometry(vegetation.header) || !albedo.header.same_geometry(irradiance.header))
    throw RegistrationError("compute_ucp: layers are not co-registered");
  albedo.validate();
  vegetation.validate();
  irradiance.validate();

  UcpRaster out;
  out.semantic = Semantic::ucp;
  out.header = albedo.header;
  const bool any_nodata = albedo.header.nodata || vegetation.header.nodata || irradiance.header.nodata;
  if (any_nodata && !out.header.nodata) {
    out.header.nodata = -9999.0;
    out.header.lines.push_back("NODATA_value -9999");
  }
  out.values.resize(albedo.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double a = albedo.values[i], f = vegetation.values[i], s = irradiance.values[i];
    if (albedo.is_nodata(a) || vegetation.is_nodata(f) || irradiance.is_nodata(s))
      out.values[i] = *out.header.nodata;
    else
      out.values[i] = ucp_value(s, a, f, opt);
  }
  out.validate();
  return out;
}

/**
 * Bilinear interpolation between the four surrounding cell centres. Falls back
 * to the containing cell when a neighbour is nodata; nullopt when that cell is
 * nodata too. Throws std::out_of_range outside the grid extent.
 */
inline std::optional<double> sample_at(const RasterLayer& r, double x, double y) {
  const auto& h = r.header;
  const double width = static_cast<double>(h.ncols) * h.cellsize;
  const double height = static_cast<double>(h.nrows) * h.cellsize;
  if (!(x >= h.xll && x <= h.xll + width && y >= h.yll && y <= h.yll + height))
    throw std::out_of_range("sample_at: (" + text::format_double(x) + ", " + text::format_double(y) +
                            ") outside raster extent");
  const double max_c = static_cast<double>(h.ncols - 1);
  const double max_r = static_cast<double>(h.nrows - 1);
  const double fc = std::clamp((x - h.xll) / h.cellsize - 0.5, 0.0, max_c);
  const double fr = std::clamp((h.yll + height - y) / h.cellsize - 0.5, 0.0, max_r);  // from top
  const auto c0 = static_cast<std::size_t>(std::floor(fc));
  const auto r0 = static_cast<std::size_t>(std::floor(fr));
  const auto c1 = std::min(c0 + 1, h.ncols - 1);
  const auto r1 = std::min(r0 + 1, h.nrows - 1);
  const double tx = fc - static_cast<double>(c0);
  const double ty = fr - static_cast<double>(r0);
  const double v00 = r.at(r0, c0), v01 = r.at(r0, c1), v10 = r.at(r1, c0), v11 = r.at(r1, c1);
  if (r.is_nodata(v00) || r.is_nodata(v01) || r.is_nodata(v10) || r.is_nodata(v11)) {
    const auto col = std::min(static_cast<std::size_t>((x - h.xll) / h.cellsize), h.ncols - 1);
    const auto row = std::min(static_cast<std::size_t>((h.yll + height - y) / h.cellsize), h.nrows - 1);
    const double v = r.at(row, col);
    if (r.is_nodata(v)) return std::nullopt;
    return v;
  }
  const double top = v00 + tx * (v01 - v00);
  const double bottom = v10 + tx * (v11 - v10);
  return top + ty * (bottom - top);
}

inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

/**
 * GeoJSON FeatureCollection with one Point feature per result. Properties are
 * emitted in a fixed order; "ucp" is added when a raster is supplied (null
 * where the point falls outside it or on nodata).
 */
inline nlohmann::ordered_json export_heat_map(const campaign::CampaignPlan& plan,
                                              std::span<const campaign::PointResult> results,
                                              const UcpRaster* ucp = nullptr) {
  if (results.empty()) throw std::invalid_argument("export_heat_map: no point results");
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    const auto* p = plan.find(r.point_id);
    if (!p) throw std::invalid_argument("export_heat_map: unknown point '" + r.point_id + "'");
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"},
                     {"coordinates", nlohmann::ordered_json::array({round6(p->location.lon), round6(p->location.lat)})}};
    auto& props = f["properties"];
    props["point_id"] = r.point_id;
    props["phase"] = std::string{campaign::to_string(plan.phase)};
    props["environment"] = std::string{campaign::to_string(p->environment)};
    props["utci_mobile"] = r.utci_mobile;
    props["utci_ref"] = r.utci_ref;
    props["offset_c"] = r.offset.value;
    props["stress_category"] = std::string{thermal::to_string(r.category)};
    if (p->displaced_from) props["displaced_from"] = *p->displaced_from;
    if (ucp) {
      std::optional<double> v;
      try {
        v = sample_at(*ucp, p->location.lon, p->location.lat);
      } catch (const std::out_of_range&) {
      }
      props["ucp"] = v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    }
    fc["features"].push_back(std::move(f));
  }
  return fc;
}

namespace detail {

inline const char* offset_fill(double offset) {
  if (offset <= -2.0) return "#2166ac";
  if (offset <= -0.5) return "#67a9cf";
  if (offset < 0.5) return "#f7f7f7";
  if (offset < 2.0) return "#ef8a62";
  return "#b2182b";
}

}  // namespace detail

/// Point map of UTCI offsets on an equal-scale lon/lat frame. Byte-identical for identical input.
inline std::string heat_map_svg(const campaign::CampaignPlan& plan, std::span<const campaign::PointResult> results) {
  if (results.empty()) throw std::invalid_argument("heat_map_svg: no point results");
  constexpr double W = 640, H = 480, M = 40;
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  for (const auto& r : results) {
    const auto* p = plan.find(r.point_id);
    if (!p) throw std::invalid_argument("heat_map_svg: unknown point '" + r.point_id + "'");
    if (first) {
      x0 = x1 = p->location.lon;
      y0 = y1 = p->location.lat;
      first = false;
    }
    x0 = std::min(x0, p->location.lon), x1 = std::max(x1, p->location.lon);
    y0 = std::min(y0, p->location.lat), y1 = std::max(y1, p->location.lat);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double scale = std::min(W - 2 * M, H - 2 * M) / span;
  const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  auto f = [](double v) { return text::format_fixed(v, 2); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n"
     << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
     << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << plan.campaign_id << " ("
     << campaign::to_string(plan.phase) << ") UTCI offset</text>\n"
     << "<g font-family=\"sans-serif\" font-size=\"11\" stroke-width=\"0.8\">\n";
  for (const auto& r : results) {
    const auto* p = plan.find(r.point_id);
    const double x = W / 2 + (p->location.lon - cx) * scale;
    const double y = H / 2 - (p->location.lat - cy) * scale;
    os << "<circle cx=\"" << f(x) << "\" cy=\"" << f(y) << "\" r=\"8\" fill=\"" << detail::offset_fill(r.offset.value)
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << f(x + 11) << "\" y=\"" << f(y + 4) << "\">" << r.point_id << " "
       << text::format_fixed(r.offset.value, 1) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace utcimap::geo

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lastmile/detail/format.hpp"
#include "lastmile/error.hpp"

namespace lastmile {

// Weights and rates of the three-component cost model. Weight defaults of 1
// are a declared convention; the demand scale and capacity defaults give a
// stable surface for spoke gaps above sqrt(lambda0/mu) km.
struct CostParams {
  double alpha = 1.0;   // travel weight
  double beta = 1.0;    // time weight
  double gamma = 1.0;   // congestion weight
  double lambda0 = 100.0;  // demand scale, mail*km^2/h
  double mu = 10.0;        // hub capacity, mail/h
  double speed_kmh = 48.28032;
  double d_min_km = 0.1;  // demand clamp floor; caps the 1/d_s^2 singularity

  void validate() const {
    if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
      throw Error(ErrorCode::ConfigInvalid, "cost weights must be >= 0");
    }
    if (!(alpha + beta + gamma > 0.0)) {
      throw Error(ErrorCode::ConfigInvalid, "alpha+beta+gamma must be > 0");
    }
    if (!(mu > 0.0)) throw Error(ErrorCode::ConfigInvalid, "mu must be > 0");
    if (!(speed_kmh > 0.0)) throw Error(ErrorCode::ConfigInvalid, "speed_kmh must be > 0");
    if (!(d_min_km > 0.0)) throw Error(ErrorCode::ConfigInvalid, "d_min_km must be > 0");
    if (!(lambda0 >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "lambda0 must be >= 0");
  }
};

// Interaction demand falls off with the square of spoke separation.
inline double demand_rate(double d_s_km, const CostParams& params) {
  const double d = std::max(d_s_km, params.d_min_km);
  return params.lambda0 / (d * d);
}

// Demand-weighted route distance per hour.
inline double travel_cost(double d_s_km, double d_h_km, double lambda_eff) {
  return lambda_eff * (2.0 * d_h_km + d_s_km);
}

// Demand-weighted per-item latency: travel plus mean hub service time.
inline double time_cost(double d_s_km, double d_h_km, double lambda_eff, const CostParams& params) {
  return lambda_eff * ((2.0 * d_h_km + d_s_km) / params.speed_kmh + 1.0 / params.mu);
}

// Demand-weighted M/M/1 queueing delay, lambda*W_q with
// W_q = lambda/(mu*(mu-lambda)). Empty optional marks the unstable regime
// (lambda >= mu), reported rather than thrown so sweeps can paint such cells.
inline std::optional<double> congestion_cost(double lambda_eff, const CostParams& params) {
  if (lambda_eff >= params.mu) return std::nullopt;
  const double wait_q = lambda_eff / (params.mu * (params.mu - lambda_eff));
  return lambda_eff * wait_q;
}

struct CostBreakdown {
  double lambda_eff = 0.0;
  double travel = 0.0;
  double time = 0.0;
  std::optional<double> congestion;  // empty in the unstable regime
  std::optional<double> total;       // empty whenever congestion is

  bool stable() const { return congestion.has_value(); }
};

inline CostBreakdown total_cost(double d_s_km, double d_h_km, const CostParams& params) {
  params.validate();
  CostBreakdown b;
  b.lambda_eff = demand_rate(d_s_km, params);
  b.travel = travel_cost(d_s_km, d_h_km, b.lambda_eff);
  b.time = time_cost(d_s_km, d_h_km, b.lambda_eff, params);
  b.congestion = congestion_cost(b.lambda_eff, params);
  if (b.congestion) {
    b.total = params.alpha * b.travel + params.beta * b.time + params.gamma * *b.congestion;
  }
  return b;
}

// Interior-cell classification by discrete second differences along the two
// axes. A cell is Flat as soon as either axis curvature is below tolerance;
// otherwise the sign pair decides. Border cells and cells whose 5-point
// stencil touches an undefined value get no class.
enum class CellClass : std::uint8_t { None, Min, Max, Saddle, Flat, Unstable };

inline const char* cell_class_name(CellClass c) {
  switch (c) {
    case CellClass::None: return "";
    case CellClass::Min: return "min";
    case CellClass::Max: return "max";
    case CellClass::Saddle: return "saddle";
    case CellClass::Flat: return "flat";
    case CellClass::Unstable: return "unstable";
  }
  return "";
}

inline constexpr double kFlatToleranceRel = 1e-9;

namespace detail {

// Second difference generalized to uneven spacing: the change in slope across
// the cell, scaled by the mean spacing so it reduces to f[i-1]-2f[i]+f[i+1]
// on uniform axes.
inline double second_difference(double f_prev, double f_mid, double f_next, double h_prev,
                                double h_next) {
  const double slope_fwd = (f_next - f_mid) / h_next;
  const double slope_back = (f_mid - f_prev) / h_prev;
  return (slope_fwd - slope_back) * (0.5 * (h_prev + h_next));
}

}  // namespace detail

// Value-level classifier; `values` is row-major over s then h
// (values[i*|h|+j] belongs to s_axis[i], h_axis[j]). NaN marks undefined
// cells. Exposed separately from classify_grid so canonical surfaces can be
// classified directly in tests.
inline std::vector<CellClass> classify_cells(const std::vector<double>& s_axis,
                                             const std::vector<double>& h_axis,
                                             const std::vector<double>& values,
                                             double tolerance_rel = kFlatToleranceRel) {
  const std::size_t ns = s_axis.size();
  const std::size_t nh = h_axis.size();
  if (ns < 3 || nh < 3) {
    throw Error(ErrorCode::AxisTooShort, "grid axes need at least 3 points");
  }
  if (!std::is_sorted(s_axis.begin(), s_axis.end()) ||
      std::adjacent_find(s_axis.begin(), s_axis.end()) != s_axis.end() ||
      !std::is_sorted(h_axis.begin(), h_axis.end()) ||
      std::adjacent_find(h_axis.begin(), h_axis.end()) != h_axis.end()) {
    throw Error(ErrorCode::ConfigInvalid, "grid axes must be strictly ascending");
  }
  if (values.size() != ns * nh) {
    throw Error(ErrorCode::ConfigInvalid, "values size does not match axes");
  }

  double max_abs = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) max_abs = std::max(max_abs, std::abs(v));
  }
  const double tol = tolerance_rel * max_abs;

  std::vector<CellClass> classes(ns * nh, CellClass::None);
  auto value_at = [&](std::size_t i, std::size_t j) { return values[i * nh + j]; };
  for (std::size_t i = 1; i + 1 < ns; ++i) {
    for (std::size_t j = 1; j + 1 < nh; ++j) {
      const double center = value_at(i, j);
      if (std::isnan(center)) {
        classes[i * nh + j] = CellClass::Unstable;
        continue;
      }
      const double stencil[4] = {value_at(i - 1, j), value_at(i + 1, j), value_at(i, j - 1),
                                 value_at(i, j + 1)};
      if (std::isnan(stencil[0]) || std::isnan(stencil[1]) || std::isnan(stencil[2]) ||
          std::isnan(stencil[3])) {
        continue;  // neighbor undefined: curvature not computable
      }
      const double dss = detail::second_difference(
          stencil[0], center, stencil[1], s_axis[i] - s_axis[i - 1], s_axis[i + 1] - s_axis[i]);
      const double dhh = detail::second_difference(
          stencil[2], center, stencil[3], h_axis[j] - h_axis[j - 1], h_axis[j + 1] - h_axis[j]);
      if (std::abs(dss) <= tol || std::abs(dhh) <= tol) {
        classes[i * nh + j] = CellClass::Flat;
      } else if (dss > 0.0 && dhh > 0.0) {
        classes[i * nh + j] = CellClass::Min;
      } else if (dss < 0.0 && dhh < 0.0) {
        classes[i * nh + j] = CellClass::Max;
      } else {
        classes[i * nh + j] = CellClass::Saddle;
      }
    }
  }
  return classes;
}

struct GridSurface {
  std::vector<double> d_s_axis_km;
  std::vector<double> d_h_axis_km;
  std::vector<CostBreakdown> cells;    // row-major over d_s then d_h
  std::vector<CellClass> classes;

  const CostBreakdown& cell(std::size_t i, std::size_t j) const {
    return cells[i * d_h_axis_km.size() + j];
  }
  CellClass cell_class(std::size_t i, std::size_t j) const {
    return classes[i * d_h_axis_km.size() + j];
  }
};

// Evaluates the total cost over the grid and classifies every interior cell.
inline GridSurface classify_grid(const CostParams& params, std::vector<double> d_s_axis_km,
                                 std::vector<double> d_h_axis_km) {
  params.validate();
  if (d_s_axis_km.size() < 3 || d_h_axis_km.size() < 3) {
    throw Error(ErrorCode::AxisTooShort, "grid axes need at least 3 points");
  }
  GridSurface surface;
  surface.d_s_axis_km = std::move(d_s_axis_km);
  surface.d_h_axis_km = std::move(d_h_axis_km);
  const std::size_t nh = surface.d_h_axis_km.size();
  surface.cells.reserve(surface.d_s_axis_km.size() * nh);
  std::vector<double> totals;
  totals.reserve(surface.d_s_axis_km.size() * nh);
  for (double d_s : surface.d_s_axis_km) {
    for (double d_h : surface.d_h_axis_km) {
      CostBreakdown b = total_cost(d_s, d_h, params);
      totals.push_back(b.total ? *b.total : std::numeric_limits<double>::quiet_NaN());
      surface.cells.push_back(std::move(b));
    }
  }
  surface.classes = classify_cells(surface.d_s_axis_km, surface.d_h_axis_km, totals);
  return surface;
}

// Surface CSV, one row per cell, row-major over d_s then d_h. Unstable cells
// leave congestion/total empty and carry class "unstable".
inline void write_surface_csv(std::ostream& out, const GridSurface& surface) {
  out << "d_s_km,d_h_km,travel,time,congestion,total,class\n";
  const std::size_t nh = surface.d_h_axis_km.size();
  for (std::size_t i = 0; i < surface.d_s_axis_km.size(); ++i) {
    for (std::size_t j = 0; j < nh; ++j) {
      const CostBreakdown& b = surface.cells[i * nh + j];
      out << detail::fmt_double(surface.d_s_axis_km[i]) << ','
          << detail::fmt_double(surface.d_h_axis_km[j]) << ',' << detail::fmt_double(b.travel) << ','
          << detail::fmt_double(b.time) << ','
          << (b.congestion ? detail::fmt_double(*b.congestion) : std::string()) << ','
          << (b.total ? detail::fmt_double(*b.total) : std::string()) << ','
          << cell_class_name(surface.classes[i * nh + j]) << '\n';
    }
  }
}

}  // namespace lastmile

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ib/interpolate.hpp"
#include "ib/spread.hpp"
#include "ib/stats.hpp"

namespace {

using ib::CosineKernel;
using ib::GridField;
using ib::LagrangianValues;
using ib::PointSet;
using ib::SpreadWorkspace;
using ib::StaggeredGrid;
using ib::Vec;

const CosineKernel kCosine;

// Dense reference evaluated straight from positions: delta_h(x_k - X_j) for
// every (grid point, point) pair, minimal image on periodic axes. Shares no
// cell, shift, or key machinery with the library.
template <std::size_t D>
double dense_delta(const Vec<D>& grid_point, const Vec<D>& x,
                   const StaggeredGrid<D>& g) {
  double w = 1.0;
  for (std::size_t a = 0; a < D; ++a) {
    double d = grid_point[a] - x[a];
    if (g.is_periodic(a)) {
      const double len = g.axis_length(a);
      d -= len * std::round(d / len);
    }
    w *= kCosine.phi(d / g.spacing()) / g.spacing();
  }
  return w;
}

template <std::size_t D>
void for_each_grid_point(const StaggeredGrid<D>& g,
                         const std::function<void(std::size_t, const Vec<D>&)>& fn) {
  ib::CellIndex<D> i{};
  for (std::size_t flat = 0; flat < g.point_count(); ++flat) {
    fn(flat, ib::point_of(i, g));
    for (std::size_t a = 0; a < D; ++a) {
      if (++i[a] < g.extent(a)) break;
      i[a] = 0;
    }
  }
}

template <std::size_t D>
std::vector<double> dense_spread(const PointSet<D>& points,
                                 const LagrangianValues& values,
                                 const StaggeredGrid<D>& g) {
  std::vector<double> out(g.point_count(), 0.0);
  for_each_grid_point<D>(g, [&](std::size_t k, const Vec<D>& xk) {
    for (std::size_t j = 0; j < points.size(); ++j)
      out[k] += dense_delta(xk, ib::wrap_position(points[j], g), g) * values[j];
  });
  return out;
}

template <std::size_t D>
LagrangianValues dense_interpolate(const GridField<D>& field,
                                   const PointSet<D>& points) {
  const auto& g = field.grid;
  const double hd = std::pow(g.spacing(), static_cast<double>(D));
  LagrangianValues out(points.size(), 0.0);
  for_each_grid_point<D>(g, [&](std::size_t k, const Vec<D>& xk) {
    for (std::size_t j = 0; j < points.size(); ++j)
      out[j] += dense_delta(xk, ib::wrap_position(points[j], g), g) *
                field.values[k] * hd;
  });
  return out;
}

double max_rel_deviation(std::span<const double> got, std::span<const double> want) {
  double scale = 0.0;
  for (double v : want) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  double dev = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    dev = std::max(dev, std::abs(got[i] - want[i]));
  return dev / scale;
}

template <std::size_t D>
PointSet<D> random_points(const StaggeredGrid<D>& g, std::size_t n, std::mt19937& rng) {
  PointSet<D> pts(n);
  for (auto& p : pts) {
    for (std::size_t a = 0; a < D; ++a) {
      // Straddle boundaries: periodic axes roam past the domain, closed axes
      // stay within it.
      if (g.is_periodic(a)) {
        std::uniform_real_distribution<double> c(-g.axis_length(a),
                                                 2.0 * g.axis_length(a));
        p[a] = g.origin()[a] + c(rng);
      } else {
        std::uniform_real_distribution<double> c(0.0, g.axis_length(a));
        p[a] = g.origin()[a] + c(rng);
      }
    }
  }
  return pts;
}

LagrangianValues random_values(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  LagrangianValues out(n);
  for (auto& x : out) x = v(rng);
  return out;
}

TEST(Interpolate, ConstantFieldReturnsConstant) {
  StaggeredGrid<3> g({12, 12, 12}, 0.5, {0.0, 0.5, 0.5}, {true, true, true});
  GridField<3> field(g);
  const double c = 2.75;
  std::fill(field.values.begin(), field.values.end(), c);
  std::mt19937 rng(31);
  const auto pts = random_points(g, 200, rng);
  const auto e = ib::interpolate(field, pts, kCosine, 2);
  for (double v : e) ASSERT_NEAR(v, c, 1e-13 * std::abs(c));
}

TEST(Interpolate, AllSupportCellsOutsideGivesZero) {
  StaggeredGrid<2> g({6, 6}, 1.0, {0.0, 0.0}, {false, false});
  GridField<2> field(g);
  std::fill(field.values.begin(), field.values.end(), 5.0);
  const PointSet<2> pts = {{-20.0, 3.0}};
  const auto e = ib::interpolate(field, pts, kCosine, 1);
  EXPECT_EQ(e[0], 0.0);
}

TEST(Interpolate, WorkerCountDoesNotChangeResult) {
  StaggeredGrid<3> g({10, 10, 10}, 0.25, {0.5, 0.5, 0.0}, {true, false, true});
  GridField<3> field(g);
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (auto& x : field.values) x = v(rng);
  const auto pts = random_points(g, 500, rng);
  const auto serial = ib::interpolate(field, pts, kCosine, 1);
  const auto parallel = ib::interpolate(field, pts, kCosine, 8);
  EXPECT_LE(max_rel_deviation(parallel, serial), 1e-12);
  EXPECT_EQ(parallel, serial);  // blocking never changes per-point arithmetic
}

TEST(Interpolate, MatchesDenseReference) {
  std::mt19937 rng(41);
  StaggeredGrid<2> g({8, 8}, 0.5, {0.0, 0.5}, {true, false});
  GridField<2> field(g);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (auto& x : field.values) x = v(rng);
  const auto pts = random_points(g, 40, rng);
  const auto got = ib::interpolate(field, pts, kCosine, 3);
  const auto want = dense_interpolate(field, pts);
  EXPECT_LE(max_rel_deviation(got, want), 1e-13);
}

TEST(SpreadSerial, SinglePointConservesUnitValue) {
  StaggeredGrid<3> g({8, 8, 8}, 0.25, {0.5, 0.0, 0.5}, {true, true, true});
  const PointSet<3> pts = {{0.37, 1.91, 0.04}};
  const LagrangianValues values = {1.0};
  const auto field = ib::spread_serial(pts, values, g, kCosine);
  double total = 0.0;
  for (double v : field.values) total += v;
  const double hd = std::pow(g.spacing(), 3.0);
  EXPECT_NEAR(total * hd, 1.0, 1e-13);
}

TEST(SpreadSerial, ZeroValuesGiveZeroField) {
  StaggeredGrid<2> g({8, 8}, 0.5, {0.0, 0.0}, {true, true});
  std::mt19937 rng(43);
  const auto pts = random_points(g, 50, rng);
  const LagrangianValues values(pts.size(), 0.0);
  const auto field = ib::spread_serial(pts, values, g, kCosine);
  for (double v : field.values) EXPECT_EQ(v, 0.0);
}

TEST(SpreadSerial, CoincidentPointsAddLinearly) {
  StaggeredGrid<2> g({8, 8}, 0.5, {0.5, 0.5}, {true, true});
  const Vec<2> x = {1.23, 0.47};
  const auto two = ib::spread_serial<2>({x, x}, LagrangianValues{0.7, -0.2}, g, kCosine);
  const auto one = ib::spread_serial<2>({x}, LagrangianValues{0.5}, g, kCosine);
  EXPECT_LE(max_rel_deviation(two.values, one.values), 1e-13);
}

TEST(SpreadSerial, MatchesDenseReference) {
  std::mt19937 rng(47);
  for (int periodic = 0; periodic < 2; ++periodic) {
    StaggeredGrid<2> g({8, 6}, 0.5, {0.5, 0.0},
                       {periodic == 1, periodic == 0});
    const auto pts = random_points(g, 30, rng);
    const auto values = random_values(pts.size(), rng);
    const auto got = ib::spread_serial(pts, values, g, kCosine);
    const auto want = dense_spread(pts, values, g);
    ASSERT_LE(max_rel_deviation(got.values, want), 1e-13);
  }
}

TEST(SpreadFused, SchematicConfigurationGroupsSharedCell) {
  // Five points in a 3x2 block of cells; points 3 and 5 share one cell.
  StaggeredGrid<2> g({4, 4}, 1.0, {0.0, 0.0}, {false, false});
  const PointSet<2> pts = {
      {0.6, 0.6}, {2.3, 1.1}, {1.8, 1.3}, {2.2, 0.4}, {1.1, 1.1}};
  const LagrangianValues values = {1.0, 2.0, 4.0, 8.0, 16.0};
  SpreadWorkspace<2> ws(pts.size(), g);
  const auto parallel = ib::spread_fused(pts, values, g, kCosine, ws, 2);
  EXPECT_EQ(ws.perm, (std::vector<std::uint32_t>{0, 3, 2, 4, 1}));
  EXPECT_EQ(ws.run_count, 4u);
  const auto serial = ib::spread_serial(pts, values, g, kCosine);
  EXPECT_LE(max_rel_deviation(parallel.values, serial.values), 1e-12);
}

TEST(SpreadFused, OnePointPerCellMatchesSerialExactly) {
  // Well-separated points: no grid point receives from two points, so the
  // accumulation order coincides with the serial loop.
  StaggeredGrid<2> g({32, 32}, 1.0, {0.0, 0.0}, {true, true});
  PointSet<2> pts;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) pts.push_back({8.0 * i + 2.4, 8.0 * j + 3.1});
  std::mt19937 rng(53);
  const auto values = random_values(pts.size(), rng);
  SpreadWorkspace<2> ws(pts.size(), g);
  const auto parallel = ib::spread_fused(pts, values, g, kCosine, ws, 3);
  EXPECT_EQ(ws.run_count, pts.size());
  const auto serial = ib::spread_serial(pts, values, g, kCosine);
  EXPECT_EQ(parallel.values, serial.values);
}

struct RandomCase {
  int workers;
  int sweep_width;
};

template <std::size_t D>
void check_variants_against_serial(std::mt19937& rng, int cases) {
  std::uniform_int_distribution<int> extent_dist(4, 12);
  std::uniform_int_distribution<int> n_dist(0, 300);
  std::uniform_int_distribution<int> bool_dist(0, 1);
  std::uniform_int_distribution<int> worker_dist(1, 8);
  std::uniform_real_distribution<double> alpha_dist(0.0, 0.999);
  const std::array<int, 4> widths = {1, 4, 8, 64};
  for (int trial = 0; trial < cases; ++trial) {
    std::array<int, D> extents;
    Vec<D> alpha;
    std::array<bool, D> periodic;
    for (std::size_t a = 0; a < D; ++a) {
      extents[a] = extent_dist(rng);
      alpha[a] = alpha_dist(rng);
      periodic[a] = bool_dist(rng) == 1;
    }
    const StaggeredGrid<D> g(extents, 0.5, alpha, periodic);
    const auto pts = random_points(g, static_cast<std::size_t>(n_dist(rng)), rng);
    const auto values = random_values(pts.size(), rng);
    const int workers = worker_dist(rng);
    const int b = widths[static_cast<std::size_t>(trial) % widths.size()];

    const auto oracle = ib::spread_serial(pts, values, g, kCosine);

    SpreadWorkspace<D> ws(pts.size(), g);
    const auto fused = ib::spread_fused(pts, values, g, kCosine, ws, workers);
    ASSERT_LE(max_rel_deviation(fused.values, oracle.values), 1e-12);

    SpreadWorkspace<D> wsb(pts.size(), g, b);
    const auto buffered = ib::spread_buffered(pts, values, g, kCosine, wsb, workers);
    ASSERT_LE(max_rel_deviation(buffered.values, oracle.values), 1e-12);

    const auto otf = ib::spread_buffered_otf(pts, values, g, kCosine, b, workers);
    ASSERT_EQ(otf.values, buffered.values);  // same algorithm, fresh buffers
  }
}

TEST(SpreadVariants, MatchSerialOracleOnRandomConfigurations) {
  std::mt19937 rng(59);
  check_variants_against_serial<1>(rng, 12);
  check_variants_against_serial<2>(rng, 12);
  check_variants_against_serial<3>(rng, 12);
}

TEST(SpreadBuffered, WidthOneMatchesFusedExactly) {
  StaggeredGrid<3> g({8, 8, 8}, 0.5, {0.5, 0.5, 0.0}, {true, false, true});
  std::mt19937 rng(61);
  const auto pts = random_points(g, 200, rng);
  const auto values = random_values(pts.size(), rng);
  SpreadWorkspace<3> ws_fused(pts.size(), g);
  SpreadWorkspace<3> ws_b1(pts.size(), g, 1);
  const auto fused = ib::spread_fused(pts, values, g, kCosine, ws_fused, 4);
  const auto b1 = ib::spread_buffered(pts, values, g, kCosine, ws_b1, 4);
  EXPECT_EQ(b1.values, fused.values);
}

TEST(SpreadBuffered, SingleSweepCoversAllShifts) {
  StaggeredGrid<3> g({8, 8, 8}, 0.5, {0.0, 0.0, 0.0}, {true, true, true});
  std::mt19937 rng(67);
  const auto pts = random_points(g, 150, rng);
  const auto values = random_values(pts.size(), rng);
  SpreadWorkspace<3> ws(pts.size(), g, 64);  // 4^3 shifts in one sweep
  const auto got = ib::spread_buffered(pts, values, g, kCosine, ws, 4);
  const auto oracle = ib::spread_serial(pts, values, g, kCosine);
  EXPECT_LE(max_rel_deviation(got.values, oracle.values), 1e-12);
}

TEST(SpreadBuffered, EmptyPointSetGivesZeroField) {
  StaggeredGrid<2> g({6, 6}, 1.0, {0.0, 0.0}, {true, true});
  const auto field = ib::spread_buffered_otf(PointSet<2>{}, LagrangianValues{}, g,
                                             kCosine, 1, 4);
  for (double v : field.values) EXPECT_EQ(v, 0.0);
}

TEST(SpreadFused, RepeatedCallsAreBitwiseIdentical) {
  StaggeredGrid<3> g({10, 10, 10}, 0.25, {0.5, 0.5, 0.0}, {true, true, true});
  std::mt19937 rng(71);
  const auto pts = random_points(g, 800, rng);
  const auto values = random_values(pts.size(), rng);
  SpreadWorkspace<3> ws(pts.size(), g);
  const auto first = ib::spread_fused(pts, values, g, kCosine, ws, 4);
  const auto second = ib::spread_fused(pts, values, g, kCosine, ws, 4);
  EXPECT_EQ(first.values, second.values);
}

TEST(Coupling, AdjointnessOfSpreadAndInterpolate) {
  std::mt19937 rng(73);
  StaggeredGrid<3> g({8, 8, 8}, 0.5, {0.0, 0.5, 0.5}, {true, false, true});
  const double hd = std::pow(g.spacing(), 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = random_points(g, 120, rng);
    const auto weights = random_values(pts.size(), rng);
    GridField<3> e(g);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    for (auto& x : e.values) x = v(rng);

    const auto spread = ib::spread_serial(pts, weights, g, kCosine);
    double grid_side = 0.0;
    for (std::size_t k = 0; k < e.values.size(); ++k)
      grid_side += spread.values[k] * e.values[k];
    grid_side *= hd;

    const auto interp = ib::interpolate(e, pts, kCosine, 2);
    double point_side = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      point_side += weights[j] * interp[j];
      scale += std::abs(weights[j] * interp[j]);
    }
    ASSERT_NEAR(grid_side, point_side, 1e-12 * std::max(scale, 1e-30));
  }
}

TEST(Coupling, PeriodicSpreadConservesTotal) {
  std::mt19937 rng(79);
  StaggeredGrid<3> g({8, 8, 8}, 0.25, {0.5, 0.5, 0.5}, {true, true, true});
  const double hd = std::pow(g.spacing(), 3.0);
  const auto pts = random_points(g, 300, rng);
  const auto values = random_values(pts.size(), rng);

  double total_in = 0.0, scale = 0.0;
  for (double v : values) {
    total_in += v;
    scale += std::abs(v);
  }
  for (auto algorithm : {ib::SpreadAlgorithm::serial, ib::SpreadAlgorithm::fused}) {
    SpreadWorkspace<3> ws(pts.size(), g);
    const auto field = algorithm == ib::SpreadAlgorithm::serial
                           ? ib::spread_serial(pts, values, g, kCosine)
                           : ib::spread_fused(pts, values, g, kCosine, ws, 3);
    double total_out = 0.0;
    for (double v : field.values) total_out += v;
    ASSERT_NEAR(total_out * hd, total_in, 1e-13 * std::max(scale, 1.0));
  }
}

TEST(Coupling, SpreadIsLinearInValues) {
  std::mt19937 rng(83);
  StaggeredGrid<2> g({12, 12}, 0.5, {0.0, 0.5}, {true, true});
  const auto pts = random_points(g, 100, rng);
  const auto v1 = random_values(pts.size(), rng);
  const auto v2 = random_values(pts.size(), rng);
  const double a = 1.7;
  LagrangianValues combo(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) combo[i] = a * v1[i] + v2[i];

  SpreadWorkspace<2> ws(pts.size(), g);
  const auto s1 = ib::spread_fused(pts, v1, g, kCosine, ws, 2);
  const auto s2 = ib::spread_fused(pts, v2, g, kCosine, ws, 2);
  const auto sc = ib::spread_fused(pts, combo, g, kCosine, ws, 2);
  std::vector<double> expect(sc.values.size());
  for (std::size_t k = 0; k < expect.size(); ++k)
    expect[k] = a * s1.values[k] + s2.values[k];
  EXPECT_LE(max_rel_deviation(sc.values, expect), 1e-12);
}

TEST(Coupling, OperationCountsIndependentOfGridSize) {
  std::mt19937 rng(89);
  const CosineKernel kernel;
  const std::size_t n = 64;
  const std::int64_t per_call = static_cast<std::int64_t>(n) * 64;  // n * s^3
  for (int refinement : {8, 16, 32}) {
    StaggeredGrid<3> g({refinement, refinement, refinement}, 1.0 / refinement,
                       {0.5, 0.5, 0.5}, {true, true, true});
    const auto pts = random_points(g, n, rng);
    const auto values = random_values(n, rng);
    GridField<3> field(g);

    ib::stats::reset_delta_evaluations();
    ib::interpolate(field, pts, kernel, 3);
    ASSERT_EQ(ib::stats::delta_evaluations(), static_cast<std::uint64_t>(per_call));

    ib::stats::reset_delta_evaluations();
    SpreadWorkspace<3> ws(n, g);
    ib::spread_fused(pts, values, g, kernel, ws, 3);
    ASSERT_EQ(ib::stats::delta_evaluations(), static_cast<std::uint64_t>(per_call));

    ib::stats::reset_delta_evaluations();
    ib::spread_serial(pts, values, g, kernel);
    ASSERT_EQ(ib::stats::delta_evaluations(), static_cast<std::uint64_t>(per_call));

    ib::stats::reset_delta_evaluations();
    ib::spread_buffered_otf(pts, values, g, kernel, 8, 3);
    ASSERT_EQ(ib::stats::delta_evaluations(), static_cast<std::uint64_t>(per_call));
  }
}

std::array<StaggeredGrid<3>, 3> mac_test_grids(int extent, double h) {
  const std::array<bool, 3> periodic = {true, true, true};
  return {StaggeredGrid<3>({extent, extent, extent}, h, {0.0, 0.5, 0.5}, periodic),
          StaggeredGrid<3>({extent, extent, extent}, h, {0.5, 0.0, 0.5}, periodic),
          StaggeredGrid<3>({extent, extent, extent}, h, {0.5, 0.5, 0.0}, periodic)};
}

TEST(VectorCoupling, ComponentsMatchScalarOperations) {
  const auto grids = mac_test_grids(8, 0.5);
  std::mt19937 rng(97);
  std::vector<GridField<3>> fields;
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (const auto& g : grids) {
    GridField<3> f(g);
    for (auto& x : f.values) x = v(rng);
    fields.push_back(std::move(f));
  }
  const auto pts = random_points(grids[0], 150, rng);

  const auto vec = ib::interpolate_vector<3>(fields, pts, kCosine, 2);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto scalar = ib::interpolate(fields[c], pts, kCosine, 1);
    ASSERT_LE(max_rel_deviation(vec[c], scalar), 1e-12);
  }

  std::array<LagrangianValues, 3> values;
  for (auto& comp : values) comp = random_values(pts.size(), rng);
  SpreadWorkspace<3> ws(pts.size(), grids[0]);
  const auto spread = ib::spread_vector<3>(pts, values, grids, kCosine,
                                           ib::SpreadAlgorithm::fused, 0, &ws, 2);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto scalar = ib::spread_serial(pts, values[c], grids[c], kCosine);
    ASSERT_LE(max_rel_deviation(spread[c].values, scalar.values), 1e-12);
  }
}

TEST(VectorCoupling, UniformFieldInterpolatesToConstantVector) {
  const auto grids = mac_test_grids(8, 0.5);
  const Vec<3> u = {1.25, -0.5, 3.0};
  std::vector<GridField<3>> fields;
  for (std::size_t c = 0; c < 3; ++c) {
    GridField<3> f(grids[c]);
    std::fill(f.values.begin(), f.values.end(), u[c]);
    fields.push_back(std::move(f));
  }
  std::mt19937 rng(101);
  const auto pts = random_points(grids[0], 100, rng);
  const auto vec = ib::interpolate_vector<3>(fields, pts, kCosine, 2);
  for (std::size_t c = 0; c < 3; ++c)
    for (double val : vec[c]) ASSERT_NEAR(val, u[c], 1e-13 * std::abs(u[c]));
}

TEST(VectorCoupling, ZeroForceSpreadsToZeroField) {
  const auto grids = mac_test_grids(6, 0.5);
  std::mt19937 rng(103);
  const auto pts = random_points(grids[0], 40, rng);
  std::array<LagrangianValues, 3> values;
  for (auto& comp : values) comp.assign(pts.size(), 0.0);
  const auto spread = ib::spread_vector<3>(pts, values, grids, kCosine,
                                           ib::SpreadAlgorithm::otf, 8, nullptr, 2);
  for (const auto& f : spread)
    for (double v : f.values) ASSERT_EQ(v, 0.0);
}

TEST(SpreadWorkspace, SizeMismatchesAreRejected) {
  StaggeredGrid<2> g({8, 8}, 0.5, {0.0, 0.0}, {true, true});
  StaggeredGrid<2> other({10, 10}, 0.5, {0.0, 0.0}, {true, true});
  const PointSet<2> pts = {{1.0, 1.0}, {2.0, 2.0}};
  const LagrangianValues values = {1.0, 2.0};
  SpreadWorkspace<2> ws(5, g);
  EXPECT_THROW(ib::spread_fused(pts, values, g, kCosine, ws, 1),
               std::invalid_argument);
  SpreadWorkspace<2> ws_other(pts.size(), other);
  EXPECT_THROW(ib::spread_fused(pts, values, g, kCosine, ws_other, 1),
               std::invalid_argument);
  SpreadWorkspace<2> no_buffers(pts.size(), g);
  EXPECT_THROW(ib::spread_buffered(pts, values, g, kCosine, no_buffers, 1),
               std::invalid_argument);
  EXPECT_THROW(ib::spread_buffered_otf(pts, values, g, kCosine, 0, 1),
               std::invalid_argument);
  EXPECT_THROW(ib::spread_vector<2>(pts, {values, values},
                                    std::array<StaggeredGrid<2>, 2>{g, g}, kCosine,
                                    ib::SpreadAlgorithm::fused, 0, nullptr, 1),
               std::invalid_argument);
}

}  // namespace

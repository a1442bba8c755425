#pragma once

#include <cstdint>
#include <stdexcept>

#include "ib/kernel.hpp"
#include "ib/spread.hpp"

namespace ib::bench {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tethered-points benchmark configuration. Lengths are micrometers and the
/// time step microseconds at this interface; everything runs in CGS (cm, s,
/// dyn) internally, which makes the spring constant literal.
struct BenchmarkConfig {
  double domain_edge_um = 16.0;  // triply periodic cube edge
  int refinement = 64;           // grid points per edge, per axis
  std::uint64_t point_count = std::uint64_t{1} << 16;
  int workers = 1;
  SpreadAlgorithm algorithm = SpreadAlgorithm::fused;
  int sweep_width = 8;  // b for the buffered spreading variants
  int steps = 100;
  double dt_us = 0.1;
  double shear_rate = 1000.0;     // 1/s
  double spring_constant = 0.01;  // dyn/cm
  std::uint64_t seed = 1;

  double domain_edge_cm() const { return domain_edge_um * 1e-4; }
  double spacing_cm() const { return domain_edge_cm() / refinement; }
  double dt_s() const { return dt_us * 1e-6; }
};

inline void validate(const BenchmarkConfig& c) {
  if (!(c.domain_edge_um > 0.0)) throw ConfigError("domain edge must be positive");
  if (c.refinement < CosineKernel{}.support())
    throw ConfigError("refinement must be at least the kernel support size");
  if (c.workers < 1) throw ConfigError("worker count must be >= 1");
  if (c.sweep_width < 1) throw ConfigError("sweep width must be >= 1");
  if (c.steps < 0) throw ConfigError("step count must be >= 0");
  if (!(c.dt_us >= 0.0)) throw ConfigError("time step must be >= 0");
  if (!(c.spring_constant >= 0.0)) throw ConfigError("spring constant must be >= 0");
}

}  // namespace ib::bench

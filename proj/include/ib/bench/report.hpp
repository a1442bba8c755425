#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ib/bench/run.hpp"

namespace ib::bench {

inline constexpr std::string_view csv_header =
    "algorithm,refinement,n_points,workers,sweep_width,operation,calls,mean_s,min_s,"
    "max_s,seed";

inline std::string_view algorithm_name(SpreadAlgorithm a) {
  switch (a) {
    case SpreadAlgorithm::serial: return "serial";
    case SpreadAlgorithm::fused: return "fused";
    case SpreadAlgorithm::buffered: return "buffered";
    case SpreadAlgorithm::otf: return "otf";
  }
  return "unknown";
}

inline std::optional<SpreadAlgorithm> parse_algorithm(std::string_view name) {
  if (name == "serial") return SpreadAlgorithm::serial;
  if (name == "fused") return SpreadAlgorithm::fused;
  if (name == "buffered") return SpreadAlgorithm::buffered;
  if (name == "otf") return SpreadAlgorithm::otf;
  return std::nullopt;
}

namespace detail {

inline std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9e", s);
  return buf;
}

inline void write_csv_row(std::ostream& os, const TimingReport& report,
                          const OperationTiming& op) {
  const BenchmarkConfig& c = report.config;
  os << algorithm_name(c.algorithm) << ',' << c.refinement << ',' << c.point_count
     << ',' << c.workers << ',' << c.sweep_width << ',' << op.operation << ','
     << op.calls() << ',' << format_seconds(op.mean()) << ','
     << format_seconds(op.min()) << ',' << format_seconds(op.max()) << ',' << c.seed
     << '\n';
}

}  // namespace detail

inline void write_csv(std::ostream& os, std::span<const TimingReport> reports) {
  os << csv_header << '\n';
  for (const TimingReport& report : reports) {
    detail::write_csv_row(os, report, report.interpolate_timing);
    detail::write_csv_row(os, report, report.spread_timing);
  }
}

inline nlohmann::json to_json(const TimingReport& report) {
  const BenchmarkConfig& c = report.config;
  nlohmann::json ops = nlohmann::json::array();
  for (const OperationTiming* op : {&report.interpolate_timing, &report.spread_timing}) {
    ops.push_back({{"operation", op->operation},
                   {"calls", op->calls()},
                   {"mean_s", op->mean()},
                   {"min_s", op->min()},
                   {"max_s", op->max()},
                   {"samples", op->seconds}});
  }
  char fingerprint[19];
  std::snprintf(fingerprint, sizeof(fingerprint), "0x%016llx",
                static_cast<unsigned long long>(report.physics_fingerprint));
  return {{"config",
           {{"algorithm", algorithm_name(c.algorithm)},
            {"refinement", c.refinement},
            {"n_points", c.point_count},
            {"workers", c.workers},
            {"sweep_width", c.sweep_width},
            {"steps", c.steps},
            {"dt_us", c.dt_us},
            {"shear_rate", c.shear_rate},
            {"spring_constant", c.spring_constant},
            {"domain_edge_um", c.domain_edge_um},
            {"seed", c.seed}}},
          {"operations", ops},
          {"physics_fingerprint", fingerprint}};
}

inline void write_json(std::ostream& os, std::span<const TimingReport> reports) {
  nlohmann::json all = nlohmann::json::array();
  for (const TimingReport& report : reports) all.push_back(to_json(report));
  os << all.dump(2) << '\n';
}

}  // namespace ib::bench

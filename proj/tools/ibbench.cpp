// Benchmark and verification driver for the Eulerian-Lagrangian coupling
// library: randomly tethered points in a triply periodic shear-flow box,
// timed interpolation and spreading, and scaling sweeps with CSV/JSON
// output.

#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ib/bench/config.hpp"
#include "ib/bench/report.hpp"
#include "ib/bench/run.hpp"
#include "ib/bench/sweep.hpp"
#include "ib/bench/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitVerificationFailure = 2;

struct CliOptions {
  ib::bench::BenchmarkConfig config;
  std::string algorithm = "fused";
  std::string output_path;
  std::string format = "csv";
};

void add_common_options(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--points", opt.config.point_count, "Number of tethered points");
  sub->add_option("--refinement", opt.config.refinement,
                  "Grid points per domain edge, per axis");
  sub->add_option("--workers", opt.config.workers, "Worker (thread) count");
  sub->add_option("--algorithm", opt.algorithm,
                  "Spreading algorithm: serial|fused|buffered|otf")
      ->check(CLI::IsMember({"serial", "fused", "buffered", "otf"}));
  sub->add_option("--sweep-width", opt.config.sweep_width,
                  "Shifts per sweep (b) for the buffered variants");
  sub->add_option("--steps", opt.config.steps, "Time steps to run");
  sub->add_option("--dt-us", opt.config.dt_us, "Time step in microseconds");
  sub->add_option("--shear-rate", opt.config.shear_rate, "Shear rate in 1/s");
  sub->add_option("--spring-constant", opt.config.spring_constant,
                  "Tether spring constant in dyn/cm");
  sub->add_option("--seed", opt.config.seed, "PRNG seed for point placement");
  sub->add_option("--output", opt.output_path, "Write the report here (default stdout)");
  sub->add_option("--format", opt.format, "Report format")
      ->check(CLI::IsMember({"csv", "json"}));
}

void emit(const CliOptions& opt, const std::vector<ib::bench::TimingReport>& reports) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!opt.output_path.empty()) {
    file.open(opt.output_path);
    if (!file) throw ib::bench::ConfigError("cannot open output file " + opt.output_path);
    os = &file;
  }
  if (opt.format == "json")
    ib::bench::write_json(*os, reports);
  else
    ib::bench::write_csv(*os, reports);
}

ib::bench::ProgressFn progress_to_stderr() {
  return [](const ib::bench::BenchmarkConfig& cfg) {
    std::cerr << "running: algorithm=" << ib::bench::algorithm_name(cfg.algorithm)
              << " refinement=" << cfg.refinement << " points=" << cfg.point_count
              << " workers=" << cfg.workers << " steps=" << cfg.steps << '\n';
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Immersed-boundary coupling benchmarks (velocity interpolation and "
               "force spreading on tethered random points)"};
  app.require_subcommand(1);

  CliOptions opt;
  CLI::App* bench = app.add_subcommand("bench", "Run the tethered-points benchmark");
  CLI::App* sweep_strong =
      app.add_subcommand("sweep-strong", "Fixed problem, worker counts 1,2,4,...");
  CLI::App* sweep_weak =
      app.add_subcommand("sweep-weak", "Points and workers double together");
  CLI::App* sweep_grid =
      app.add_subcommand("sweep-grid", "Fixed problem across grid refinements");
  for (CLI::App* sub : {bench, sweep_strong, sweep_weak, sweep_grid})
    add_common_options(sub, opt);

  std::uint64_t verify_seed = 1;
  int verify_workers = 4;
  CLI::App* verify =
      app.add_subcommand("verify", "Run the oracle and invariant suite");
  verify->add_option("--seed", verify_seed, "PRNG seed for randomized checks");
  verify->add_option("--workers", verify_workers, "Worker count for parallel paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (verify->parsed()) {
      ib::bench::VerifyOptions vopt;
      vopt.seed = verify_seed;
      vopt.workers = verify_workers;
      const auto results = ib::bench::run_verification(vopt);
      bool all_pass = true;
      for (const auto& r : results) {
        std::cout << (r.pass ? "[ ok ] " : "[FAIL] ") << r.name << " -- " << r.detail
                  << '\n';
        all_pass = all_pass && r.pass;
      }
      std::cout << (all_pass ? "verification passed" : "verification FAILED") << '\n';
      return all_pass ? kExitOk : kExitVerificationFailure;
    }

    if (const auto algorithm = ib::bench::parse_algorithm(opt.algorithm))
      opt.config.algorithm = *algorithm;
    else
      throw ib::bench::ConfigError("unknown algorithm " + opt.algorithm);
    ib::bench::validate(opt.config);

    std::vector<ib::bench::TimingReport> reports;
    if (bench->parsed()) {
      reports.push_back(ib::bench::run_benchmark(opt.config));
    } else if (sweep_strong->parsed()) {
      reports = ib::bench::sweep_strong(opt.config, progress_to_stderr());
    } else if (sweep_weak->parsed()) {
      reports = ib::bench::sweep_weak(opt.config, 4, progress_to_stderr());
    } else if (sweep_grid->parsed()) {
      // A grid sweep covers every algorithm unless one was named explicitly.
      std::vector<ib::SpreadAlgorithm> algorithms;
      if (sweep_grid->count("--algorithm") > 0)
        algorithms.push_back(opt.config.algorithm);
      else
        algorithms.assign(ib::bench::all_algorithms.begin(),
                          ib::bench::all_algorithms.end());
      const std::vector<int> refinements(ib::bench::default_refinements.begin(),
                                         ib::bench::default_refinements.end());
      reports = ib::bench::sweep_grid(opt.config, refinements, algorithms,
                                      progress_to_stderr());
    }
    emit(opt, reports);
    return kExitOk;
  } catch (const ib::bench::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerificationFailure;
  }
}

// bench: runs simulations A-D over the test set and writes a report table.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lldp/bench.hpp"
#include "lldp/testset.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_failure = 2;

struct Options {
  std::string sim;
  std::string problem = "all";
  std::string tol = "crude";
  double scale = 1.0;
  std::size_t refine = 4;
  std::string method = "both";
  std::vector<int> pade{3, 3};
  std::optional<double> hmax;
  std::string format = "csv";
  std::string out;
  bool no_timing = false;
};

std::vector<std::string> selected_problems(const std::string& problem) {
  if (problem != "all") {
    lldp::testset::make_problem(problem);  // rejects unknown names
    return {problem};
  }
  return {lldp::testset::problem_names.begin(), lldp::testset::problem_names.end()};
}

std::vector<lldp::bench::SimulationReport> run_one(const Options& o, const lldp::testset::NamedProblem& np,
                                                  const lldp::bench::ToleranceSet& tol,
                                                  const lldp::bench::SimulationOptions& so) {
  using namespace lldp::bench;
  switch (o.sim[0]) {
    case 'A':
      return simulation_a(np, tol, so);
    case 'B':
      return simulation_b(np, tol, so);
    case 'C':
      return simulation_c(np, tol, o.scale, so);
    default:
      return simulation_d(np, tol, o.refine, so);
  }
}

bool keep(const Options& o, lldp::Method m) {
  return o.method == "both" || o.method == lldp::method_name(m);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Benchmark the LLDP45 and DP45 integrators on the semilinear test set"};
  app.add_option("--sim", o.sim, "Simulation: A (same mesh), B (same tolerance), C (scaled LLDP tolerance), D (dense)")
      ->required()
      ->check(CLI::IsMember({"A", "B", "C", "D"}));
  app.add_option("--problem", o.problem, "Problem name or 'all'")->capture_default_str();
  app.add_option("--tol", o.tol, "Tolerance set")
      ->check(CLI::IsMember({"crude", "mild", "refined"}))
      ->capture_default_str();
  app.add_option("--scale", o.scale, "LLDP tolerance factor for simulation C")->capture_default_str();
  app.add_option("--refine", o.refine, "Dense points per step for simulation D")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--method", o.method, "Rows to keep")
      ->check(CLI::IsMember({"lldp45", "dp45", "both"}))
      ->capture_default_str();
  app.add_option("--pade", o.pade, "Pade orders p q")->expected(2);
  app.add_option("--hmax", o.hmax, "Maximum step size (default: a tenth of the interval)");
  app.add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();
  app.add_option("--out", o.out, "Report path ('-' for stdout)")->required();
  app.add_flag("--no-timing", o.no_timing, "Write wall time as zero for reproducible output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  std::vector<lldp::bench::SimulationReport> rows;
  bool any_failed = false;
  try {
    lldp::bench::SimulationOptions so;
    so.pade = lldp::PadeOrder{o.pade[0], o.pade[1]};
    lldp::require_valid(so.pade);
    if (o.hmax && !(*o.hmax > 0.0)) throw lldp::usage_error("--hmax must be positive");
    so.h_max = o.hmax;
    if (o.sim != "C" && o.scale != 1.0) throw lldp::usage_error("--scale only applies to simulation C");

    const auto tol = lldp::bench::tolerance_by_label(o.tol);
    for (const auto& name : selected_problems(o.problem)) {
      const auto np = lldp::testset::make_problem(name);
      for (auto& row : run_one(o, np, tol, so)) {
        if (!keep(o, row.method)) continue;
        if (row.status != lldp::bench::Status::ok) {
          any_failed = true;
          std::cerr << "bench: " << row.simulation << ' ' << row.problem << ' ' << lldp::method_name(row.method)
                    << ": " << lldp::bench::status_name(row.status) << ": " << row.message << '\n';
        }
        rows.push_back(std::move(row));
      }
    }

    lldp::bench::EmitOptions eo;
    eo.format = o.format == "csv" ? lldp::bench::Format::csv : lldp::bench::Format::markdown;
    eo.include_timing = !o.no_timing;
    if (o.out == "-") {
      lldp::bench::emit_report(rows, std::cout, eo);
    } else {
      lldp::bench::emit_report(rows, o.out, eo);
    }
  } catch (const lldp::usage_error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return exit_failure;
  }
  return any_failed ? exit_failure : exit_ok;
}

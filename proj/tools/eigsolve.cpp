#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "bspeig/harness/experiment.hpp"
#include "bspeig/harness/matrix_io.hpp"
#include "bspeig/harness/report.hpp"
#include "oracle/jacobi.hpp"

namespace {

using namespace bspeig;
using namespace bspeig::harness;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kVerifyFailed = 2;
constexpr int kNumerical = 3;

struct Common {
  ExperimentConfig cfg;
  double delta = 0.0;
  int c = 0;
  std::string report;
  std::string format = "json";
};

void add_common(CLI::App* app, Common& o) {
  app->add_option("--n", o.cfg.n, "matrix dimension");
  app->add_option("--p", o.cfg.p, "simulated processors")->required();
  auto* d = app->add_option("--delta", o.delta, "replication exponent in [1/2, 2/3]");
  auto* c = app->add_option("--c", o.c, "replication factor, c = p^(2 delta - 1)");
  d->excludes(c);
  app->add_option("--seed", o.cfg.seed, "generator seed");
  app->add_option("--generator", o.cfg.generator, "random | diag | laplacian | ones");
  app->add_option("--matrix", o.cfg.matrix_path, "read the matrix from a .csv or raw file");
  app->add_flag("--verify", o.cfg.verify, "compare against the Jacobi oracle");
  app->add_option("--tolerance", o.cfg.tolerance, "verification tolerance relative to ||A||_2");
  app->add_option("--report", o.report, "write the report here instead of stdout");
  app->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--H", o.cfg.machine.cache_words, "cache size in words");
  app->add_option("--M", o.cfg.machine.memory_words, "memory per processor in words");
  app->add_option("--gamma", o.cfg.machine.gamma);
  app->add_option("--beta", o.cfg.machine.beta);
  app->add_option("--nu", o.cfg.machine.nu);
  app->add_option("--alpha", o.cfg.machine.alpha);
  app->add_flag("--strict-memory", o.cfg.strict_memory, "fail when a processor exceeds M words");
}

void finish_common(CLI::App* app, Common& o) {
  if (app->count("--delta")) o.cfg.delta = o.delta;
  if (app->count("--c")) o.cfg.c = o.c;
  if (!app->count("--delta") && !app->count("--c")) o.cfg.delta = 0.5;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < list.size()) {
    const auto comma = list.find(',', pos);
    const std::string item = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) {
      double v = 0;
      const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || end != item.data() + item.size()) throw InvalidArgument("bad sweep value '" + item + "'");
      out.push_back(v);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_run(Common& o) {
  const CostReport r = run_experiment(o.cfg);
  emit(o.format == "csv" ? report_to_csv(r) : report_to_json(r).dump(2) + "\n", o.report);
  for (const std::string& note : r.notes) std::cerr << "note: " << note << '\n';
  if (r.verification && !r.verification->passed) {
    std::cerr << "verification failed: max eigenvalue delta " << r.verification->max_delta << " > "
              << r.verification->tolerance << " * " << r.verification->norm << '\n';
    return kVerifyFailed;
  }
  return kOk;
}

int cmd_sweep(Common& o, const std::string& axis, const std::string& values) {
  const SweepResult s = run_sweep(o.cfg, parse_axis(axis), parse_values(values));
  emit(o.format == "csv" ? sweep_to_csv(s) : sweep_to_json(s).dump(2) + "\n", o.report);
  int code = kOk;
  for (const SweepPoint& pt : s.points) {
    if (!pt.error.empty()) {
      std::cerr << axis << " = " << pt.value << ": " << pt.error << '\n';
      code = kNumerical;
    } else if (pt.report->verification && !pt.report->verification->passed && code == kOk) {
      code = kVerifyFailed;
    }
  }
  return code;
}

int cmd_oracle(const std::string& path) {
  std::vector<std::string> notes;
  const Matrix a = read_matrix(path, format_for_path(path), &notes);
  for (const std::string& note : notes) std::cerr << "note: " << note << '\n';
  const auto res = oracle::jacobi_eigenvalues(a.values(), static_cast<std::size_t>(a.rows()));
  const nlohmann::json j{{"n", a.rows()}, {"sweeps", res.sweeps}, {"off_norm", res.off_norm},
                         {"eigenvalues", res.eigenvalues}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eigenvalues of dense symmetric matrices on a simulated BSP machine"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts;
  auto* run = app.add_subcommand("run", "solve one matrix and print a cost report");
  add_common(run, run_opts);

  auto* sweep = app.add_subcommand("sweep", "run a series of experiments along one axis");
  add_common(sweep, sweep_opts);
  std::string axis, values;
  sweep->add_option("--axis", axis, "n | p | c | H")->required();
  sweep->add_option("--values", values, "comma-separated list")->required();

  auto* orc = app.add_subcommand("oracle", "eigenvalues from the Jacobi oracle only");
  std::string oracle_path;
  orc->add_option("--matrix", oracle_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run) {
      finish_common(run, run_opts);
      return cmd_run(run_opts);
    }
    if (*sweep) {
      finish_common(sweep, sweep_opts);
      return cmd_sweep(sweep_opts, axis, values);
    }
    return cmd_oracle(oracle_path);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numerical() ? kNumerical : kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const oracle::JacobiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}

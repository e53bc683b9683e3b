#include "bspeig/harness/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "bspeig/eigensolver.hpp"
#include "bspeig/harness/generators.hpp"
#include "bspeig/harness/matrix_io.hpp"
#include "oracle/jacobi.hpp"

namespace bspeig::harness {

void ExperimentConfig::validate() const {
  if (p < 1) throw InvalidArgument("p must be positive");
  if (matrix_path.empty()) {
    if (n < 1) throw InvalidArgument("n must be positive");
    const auto& names = generator_names();
    if (std::find(names.begin(), names.end(), generator) == names.end())
      throw InvalidArgument("unknown generator '" + generator + "'");
  }
  if (delta.has_value() == c.has_value()) throw InvalidArgument("give exactly one of delta and c");
  if (delta && (*delta < 0.5 - 1e-12 || *delta > 2.0 / 3.0 + 1e-12))
    throw InvalidArgument("delta must lie in [1/2, 2/3]");
  if (c) {
    if (*c < 1) throw InvalidArgument("c must be positive");
    if (p == 1 && *c != 1) throw InvalidArgument("c must be 1 when p = 1");
    const double d = resolved_delta();
    if (d > 2.0 / 3.0 + 1e-12) throw InvalidArgument("c must not exceed p^(1/3)");
  }
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  bsp::MachineParams m = machine;
  m.p = p;
  m.validate();
}

double ExperimentConfig::resolved_delta() const {
  if (delta) return *delta;
  if (!c || p <= 1) return 0.5;
  return 0.5 * (1.0 + std::log2(static_cast<double>(*c)) / std::log2(static_cast<double>(p)));
}

CostReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::string> notes;
  Matrix a = config.matrix_path.empty()
                 ? generate(config.generator, config.n, config.seed)
                 : read_matrix(config.matrix_path, format_for_path(config.matrix_path), &notes);
  CostReport r = run_experiment(config, a);
  r.notes.insert(r.notes.begin(), notes.begin(), notes.end());
  return r;
}

CostReport run_experiment(const ExperimentConfig& config, const Matrix& a) {
  config.validate();
  SolverOptions opts;
  opts.delta = config.resolved_delta();
  opts.machine = config.machine;
  opts.memory = config.strict_memory ? bsp::MemoryPolicy::strict : bsp::MemoryPolicy::warn;
  const EigenResult res = symmetric_eigenvalues(a, config.p, opts);

  CostReport r;
  r.config = config;
  r.n = a.rows();
  r.procs = res.procs;
  r.delta = opts.delta;
  r.b = res.schedule.b;
  r.padding = res.padding;
  bsp::MachineParams m = config.machine;
  m.p = res.procs;
  for (const StageRecord& st : res.stages) {
    r.stages.push_back({stage_name(st.stage.kind), st.stage.b_in, st.stage.b_out, st.stage.procs,
                        st.ledger.totals(), st.ledger.model_time(m)});
  }
  r.totals = res.ledger.totals();
  r.model_time = res.ledger.model_time(m);
  r.eigenvalues = res.eigenvalues;
  r.notes = res.notes;

  if (config.verify) {
    const auto ref = oracle::jacobi_eigenvalues(a.values(), static_cast<std::size_t>(a.rows())).eigenvalues;
    Verification v;
    v.tolerance = config.tolerance;
    v.norm = std::max(std::abs(ref.front()), std::abs(ref.back()));
    for (std::size_t i = 0; i < ref.size(); ++i)
      v.max_delta = std::max(v.max_delta, std::abs(ref[i] - r.eigenvalues[i]));
    v.passed = v.max_delta <= config.tolerance * std::max(v.norm, 1.0e-300);
    r.verification = v;
  }
  return r;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "n") return SweepAxis::n;
  if (name == "p") return SweepAxis::p;
  if (name == "c") return SweepAxis::c;
  if (name == "H") return SweepAxis::H;
  throw InvalidArgument("unknown sweep axis '" + name + "' (expected n, p, c or H)");
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::n: return "n";
    case SweepAxis::p: return "p";
    case SweepAxis::c: return "c";
    case SweepAxis::H: return "H";
  }
  return "?";
}

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values) {
  SweepResult out;
  out.axis = axis;
  for (double value : values) {
    SweepPoint pt;
    pt.value = value;
    ExperimentConfig cfg = base;
    const auto as_int = static_cast<std::int64_t>(std::llround(value));
    switch (axis) {
      case SweepAxis::n: cfg.n = as_int; break;
      case SweepAxis::p: cfg.p = static_cast<int>(as_int); break;
      case SweepAxis::c:
        cfg.c = static_cast<int>(as_int);
        cfg.delta.reset();
        break;
      case SweepAxis::H: cfg.machine.cache_words = as_int; break;
    }
    try {
      pt.report = run_experiment(cfg);
    } catch (const Error& ex) {
      pt.error = ex.what();
    }
    out.points.push_back(std::move(pt));
  }
  const SweepPoint* prev = nullptr;
  for (const SweepPoint& pt : out.points) {
    if (!pt.report) continue;
    if (prev) {
      auto ratio = [](std::int64_t a, std::int64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; };
      const auto& x = prev->report->totals;
      const auto& y = pt.report->totals;
      out.ratios.push_back({prev->value, pt.value, ratio(y.W, x.W), ratio(y.S, x.S), ratio(y.F, x.F)});
    }
    prev = &pt;
  }
  return out;
}

}  // namespace bspeig::harness

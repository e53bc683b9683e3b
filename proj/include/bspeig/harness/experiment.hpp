#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bspeig/bsp/ledger.hpp"
#include "bspeig/matrix.hpp"

namespace bspeig::harness {

struct ExperimentConfig {
  Index n = 0;  // ignored when the matrix comes from a file
  int p = 1;
  std::optional<double> delta;
  std::optional<int> c;
  std::uint64_t seed = 0;
  std::string generator = "random";
  std::string matrix_path;  // non-empty: read the matrix from this file
  bool verify = false;
  double tolerance = 1e-9;  // relative to ||A||_2
  bool strict_memory = false;
  bsp::MachineParams machine;

  // Exactly one of delta and c, with c = p^(2 delta - 1). Throws InvalidArgument.
  void validate() const;
  double resolved_delta() const;
};

struct StageRow {
  std::string stage;
  Index b_in = 0;
  Index b_out = 0;
  int procs = 0;
  bsp::CostTotals cost;
  double model_time = 0.0;
  bool operator==(const StageRow&) const = default;
};

struct Verification {
  double max_delta = 0.0;
  double norm = 0.0;  // ||A||_2 from the oracle spectrum
  double tolerance = 0.0;
  bool passed = false;
  bool operator==(const Verification&) const = default;
};

struct CostReport {
  ExperimentConfig config;
  Index n = 0;
  int procs = 0;
  double delta = 0.0;
  Index b = 0;
  Index padding = 0;
  std::vector<StageRow> stages;
  bsp::CostTotals totals;
  double model_time = 0.0;
  std::vector<double> eigenvalues;
  std::optional<Verification> verification;
  std::vector<std::string> notes;
};

// Runs the solver and, when asked, the oracle. Failures of the solver propagate.
CostReport run_experiment(const ExperimentConfig& config);
CostReport run_experiment(const ExperimentConfig& config, const Matrix& a);

enum class SweepAxis { n, p, c, H };
SweepAxis parse_axis(const std::string& name);
const char* axis_name(SweepAxis axis);

struct SweepPoint {
  double value = 0.0;
  std::optional<CostReport> report;
  std::string error;  // set when the point failed
};

struct SweepRatio {
  double from = 0.0;
  double to = 0.0;
  double W = 0.0;
  double S = 0.0;
  double F = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::n;
  std::vector<SweepPoint> points;
  std::vector<SweepRatio> ratios;  // consecutive successful points
};

SweepResult run_sweep(const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values);

}  // namespace bspeig::harness

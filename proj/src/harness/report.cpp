#include "bspeig/harness/report.hpp"

#include <sstream>

namespace bspeig::harness {

using nlohmann::json;

namespace {

json totals_json(const bsp::CostTotals& t) { return {{"F", t.F}, {"W", t.W}, {"Q", t.Q}, {"S", t.S}}; }

bsp::CostTotals totals_from(const json& j) {
  return {j.at("F").get<std::int64_t>(), j.at("W").get<std::int64_t>(), j.at("Q").get<std::int64_t>(),
          j.at("S").get<std::int64_t>()};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

json config_to_json(const ExperimentConfig& c) {
  json j{{"n", c.n},
         {"p", c.p},
         {"seed", c.seed},
         {"generator", c.generator},
         {"matrix", c.matrix_path},
         {"verify", c.verify},
         {"tolerance", c.tolerance},
         {"strict_memory", c.strict_memory},
         {"machine",
          {{"H", c.machine.cache_words},
           {"M", c.machine.memory_words},
           {"gamma", c.machine.gamma},
           {"beta", c.machine.beta},
           {"nu", c.machine.nu},
           {"alpha", c.machine.alpha}}}};
  j["delta"] = c.delta ? json(*c.delta) : json(nullptr);
  j["c"] = c.c ? json(*c.c) : json(nullptr);
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.n = j.at("n").get<Index>();
  c.p = j.at("p").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.generator = j.at("generator").get<std::string>();
  c.matrix_path = j.at("matrix").get<std::string>();
  c.verify = j.at("verify").get<bool>();
  c.tolerance = j.at("tolerance").get<double>();
  c.strict_memory = j.at("strict_memory").get<bool>();
  if (!j.at("delta").is_null()) c.delta = j.at("delta").get<double>();
  if (!j.at("c").is_null()) c.c = j.at("c").get<int>();
  const json& m = j.at("machine");
  c.machine.cache_words = m.at("H").get<std::int64_t>();
  c.machine.memory_words = m.at("M").get<std::int64_t>();
  c.machine.gamma = m.at("gamma").get<double>();
  c.machine.beta = m.at("beta").get<double>();
  c.machine.nu = m.at("nu").get<double>();
  c.machine.alpha = m.at("alpha").get<double>();
  return c;
}

json report_to_json(const CostReport& r) {
  json stages = json::array();
  for (const StageRow& s : r.stages) {
    stages.push_back({{"stage", s.stage},
                      {"b_in", s.b_in},
                      {"b_out", s.b_out},
                      {"procs", s.procs},
                      {"F", s.cost.F},
                      {"W", s.cost.W},
                      {"Q", s.cost.Q},
                      {"S", s.cost.S},
                      {"model_time", s.model_time}});
  }
  json j{{"config", config_to_json(r.config)},
         {"n", r.n},
         {"procs", r.procs},
         {"delta", r.delta},
         {"b", r.b},
         {"padding", r.padding},
         {"stages", stages},
         {"totals", totals_json(r.totals)},
         {"model_time", r.model_time},
         {"eigenvalues", r.eigenvalues},
         {"notes", r.notes}};
  if (r.verification) {
    const Verification& v = *r.verification;
    j["verification"] = {
        {"max_delta", v.max_delta}, {"norm", v.norm}, {"tolerance", v.tolerance}, {"passed", v.passed}};
  } else {
    j["verification"] = nullptr;
  }
  return j;
}

CostReport report_from_json(const json& j) {
  CostReport r;
  r.config = config_from_json(j.at("config"));
  r.n = j.at("n").get<Index>();
  r.procs = j.at("procs").get<int>();
  r.delta = j.at("delta").get<double>();
  r.b = j.at("b").get<Index>();
  r.padding = j.at("padding").get<Index>();
  for (const json& s : j.at("stages")) {
    r.stages.push_back({s.at("stage").get<std::string>(), s.at("b_in").get<Index>(), s.at("b_out").get<Index>(),
                        s.at("procs").get<int>(), totals_from(s), s.at("model_time").get<double>()});
  }
  r.totals = totals_from(j.at("totals"));
  r.model_time = j.at("model_time").get<double>();
  r.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  if (const json& v = j.at("verification"); !v.is_null()) {
    r.verification = Verification{v.at("max_delta").get<double>(), v.at("norm").get<double>(),
                                  v.at("tolerance").get<double>(), v.at("passed").get<bool>()};
  }
  return r;
}

std::string report_to_csv(const CostReport& r) {
  std::ostringstream os;
  os << "stage,b_in,b_out,procs,F,W,Q,S,model_time\n";
  for (const StageRow& s : r.stages)
    os << s.stage << ',' << s.b_in << ',' << s.b_out << ',' << s.procs << ',' << s.cost.F << ',' << s.cost.W << ','
       << s.cost.Q << ',' << s.cost.S << ',' << fmt(s.model_time) << '\n';
  os << "total,,," << r.procs << ',' << r.totals.F << ',' << r.totals.W << ',' << r.totals.Q << ',' << r.totals.S
     << ',' << fmt(r.model_time) << '\n';
  return os.str();
}

json sweep_to_json(const SweepResult& s) {
  json points = json::array();
  for (const SweepPoint& pt : s.points) {
    json p{{"value", pt.value}};
    p["report"] = pt.report ? report_to_json(*pt.report) : json(nullptr);
    p["error"] = pt.error.empty() ? json(nullptr) : json(pt.error);
    points.push_back(std::move(p));
  }
  json ratios = json::array();
  for (const SweepRatio& r : s.ratios)
    ratios.push_back({{"from", r.from}, {"to", r.to}, {"W", r.W}, {"S", r.S}, {"F", r.F}});
  return {{"axis", axis_name(s.axis)}, {"points", points}, {"summary", ratios}};
}

std::string sweep_to_csv(const SweepResult& s) {
  std::ostringstream os;
  os << axis_name(s.axis) << ",procs,b,F,W,Q,S,model_time,error\n";
  for (const SweepPoint& pt : s.points) {
    os << fmt(pt.value) << ',';
    if (pt.report) {
      const CostReport& r = *pt.report;
      os << r.procs << ',' << r.b << ',' << r.totals.F << ',' << r.totals.W << ',' << r.totals.Q << ','
         << r.totals.S << ',' << fmt(r.model_time) << ",\n";
    } else {
      std::string e = pt.error;
      for (char& ch : e)
        if (ch == ',' || ch == '\n') ch = ' ';
      os << ",,,,,,," << e << '\n';
    }
  }
  for (const SweepRatio& r : s.ratios)
    os << "ratio " << fmt(r.from) << "->" << fmt(r.to) << ",,," << fmt(r.F) << ',' << fmt(r.W) << ",," << fmt(r.S)
       << ",,\n";
  return os.str();
}

}  // namespace bspeig::harness

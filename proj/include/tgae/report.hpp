#pragma once

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tgae/experiments.hpp"

namespace tgae {

inline nlohmann::json to_json(const PhaseTimes& t) {
  return {{"features", t.features}, {"inference", t.inference}, {"matching", t.matching}};
}

inline nlohmann::json to_json(const Condition& c) {
  const Summary s = c.accuracy_summary();
  nlohmann::json times = nlohmann::json::array();
  for (const auto& t : c.times) times.push_back(to_json(t));
  nlohmann::json j{{"label", c.label},
                   {"model", to_string(c.model)},
                   {"level", c.level},
                   {"accuracy_mean", s.mean},
                   {"accuracy_std", s.std},
                   {"accuracy", c.accuracy},
                   {"edge_disagreement", c.edge_disagreement},
                   {"mean_times", to_json(c.mean_times())},
                   {"times", times}};
  if (!c.hit_ks.empty()) {
    nlohmann::json hits = nlohmann::json::object();
    for (std::size_t i = 0; i < c.hit_ks.size(); ++i) hits[std::to_string(c.hit_ks[i])] = c.hits[i];
    j["hits"] = hits;
  }
  return j;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : r.conditions) conds.push_back(to_json(c));
  return {{"task", to_string(r.task)}, {"dataset", r.dataset},          {"source", r.source},
          {"matcher", r.matcher},      {"trials", r.trials},            {"seed", r.seed},
          {"setup_seconds", r.setup_seconds}, {"warnings", r.warnings}, {"conditions", conds}};
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace detail

/// Aligned-column table: one line per condition, accuracy in percent.
inline void write_report_table(std::ostream& os, const ExperimentReport& r) {
  os << to_string(r.task) << "  dataset=" << r.dataset << "  source=" << r.source << "  matcher=" << r.matcher
     << "  trials=" << r.trials << "  seed=" << r.seed << '\n';
  const bool hits = !r.conditions.empty() && !r.conditions.front().hit_ks.empty();
  os << std::left << std::setw(16) << "condition" << std::setw(9) << "model" << std::right << std::setw(7)
     << "level" << std::setw(16) << "accuracy(%)" << std::setw(12) << "feat(s)" << std::setw(12) << "infer(s)"
     << std::setw(12) << "match(s)";
  if (hits)
    for (std::size_t k : r.conditions.front().hit_ks) os << std::setw(10) << ("Hit@" + std::to_string(k));
  os << '\n';
  for (const auto& c : r.conditions) {
    const Summary s = c.accuracy_summary();
    const PhaseTimes t = c.mean_times();
    os << std::left << std::setw(16) << c.label << std::setw(9) << to_string(c.model) << std::right << std::setw(7)
       << detail::fmt("%.3g", c.level) << std::setw(16)
       << (detail::fmt("%.1f", 100 * s.mean) + " +- " + detail::fmt("%.1f", 100 * s.std)) << std::setw(12)
       << detail::fmt("%.4f", t.features) << std::setw(12) << detail::fmt("%.4f", t.inference) << std::setw(12)
       << detail::fmt("%.4f", t.matching);
    for (double h : c.hits) os << std::setw(10) << detail::fmt("%.4f", h);
    os << '\n';
  }
  for (const auto& w : r.warnings) os << "warning: " << w << '\n';
}

/// One row per trial, for plotting.
inline void write_report_csv(std::ostream& os, const ExperimentReport& r) {
  os << "task,dataset,condition,model,level,trial,accuracy,edge_disagreement,features_s,inference_s,matching_s\n"
     << std::setprecision(10);
  for (const auto& c : r.conditions)
    for (std::size_t t = 0; t < c.accuracy.size(); ++t) {
      os << to_string(r.task) << ',' << r.dataset << ',' << c.label << ',' << to_string(c.model) << ','
         << c.level << ',' << t << ',' << c.accuracy[t] << ',';
      if (t < c.edge_disagreement.size()) os << c.edge_disagreement[t];
      os << ',';
      if (t < c.times.size()) os << c.times[t].features << ',' << c.times[t].inference << ',' << c.times[t].matching;
      else os << ",,";
      os << '\n';
    }
}

inline nlohmann::json to_json(const NodeMapping& m) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : m.pairs()) {
    nlohmann::json e{{"source", p.source}, {"target", p.target}};
    if (p.distance) e["distance"] = *p.distance;
    pairs.push_back(e);
  }
  return {{"matcher", to_string(m.tag())}, {"pairs", pairs}};
}

}  // namespace tgae

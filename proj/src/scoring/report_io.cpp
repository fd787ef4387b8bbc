#include "gridbench/scoring/report_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "gridbench/error.hpp"

namespace gridbench::scoring {

using nlohmann::json;

namespace {

char letter(Grade g) {
  switch (g) {
    case Grade::Great: return 'G';
    case Grade::Acceptable: return 'A';
    case Grade::Unacceptable: return 'U';
  }
  return '?';
}

std::string letters(const std::vector<Grade>& grades) {
  std::string s;
  for (std::size_t i = 0; i < grades.size(); ++i) {
    if (i) s += ' ';
    s += letter(grades[i]);
  }
  return s;
}

json grades_json(const std::vector<Grade>& g) {
  json a = json::array();
  for (Grade x : g) a.push_back(static_cast<int>(x));
  return a;
}

std::vector<Grade> grades_from(const json& a) {
  std::vector<Grade> g;
  for (const auto& x : a) {
    const int v = x.get<int>();
    if (v < 0 || v > 2) throw ValidationError("grade values must be 0, 1 or 2");
    g.push_back(static_cast<Grade>(v));
  }
  return g;
}

json split_json(const SplitScore& s, const std::vector<const char*>& ml_names,
                const std::vector<const char*>& ph_names) {
  json j;
  j["ml_grades"] = grades_json(s.ml_grades);
  j["physics_grades"] = grades_json(s.physics_grades);
  j["score_ml"] = s.ml;
  j["score_physics"] = s.physics;
  j["score"] = s.score;
  if (!s.ml_values.empty()) {
    json m = json::object();
    for (std::size_t i = 0; i < s.ml_values.size(); ++i) m[ml_names[i]] = s.ml_values[i];
    j["ml_values"] = m;
  }
  if (!s.physics_values.empty()) {
    json m = json::object();
    for (std::size_t i = 0; i < s.physics_values.size(); ++i) m[ph_names[i]] = s.physics_values[i];
    j["physics_values"] = m;
  }
  return j;
}

SplitScore split_from(const json& j, const std::vector<const char*>& ml_names,
                      const std::vector<const char*>& ph_names) {
  SplitScore s;
  s.ml_grades = grades_from(j.at("ml_grades"));
  s.physics_grades = grades_from(j.at("physics_grades"));
  s.ml = j.at("score_ml").get<double>();
  s.physics = j.at("score_physics").get<double>();
  s.score = j.at("score").get<double>();
  if (j.contains("ml_values")) {
    for (const char* n : ml_names) s.ml_values.push_back(j.at("ml_values").at(n).get<double>());
  }
  if (j.contains("physics_values")) {
    for (const char* n : ph_names) s.physics_values.push_back(j.at("physics_values").at(n).get<double>());
  }
  return s;
}

}  // namespace

std::string ml_report_json(const metrics::MLReport& r) {
  json j;
  const auto v = r.values();
  for (std::size_t i = 0; i < v.size(); ++i) j[metrics::kMlMetricNames[i]] = v[i];
  j["excluded_zero_truth"] = r.excluded_zero;
  j["units"] = {{"MAPE", "ratio"}, {"MAE", "kV"}};
  return j.dump(2);
}

std::string physics_report_json(const metrics::PhysicsReport& r) {
  json j;
  for (std::size_t i = 0; i < r.p.size(); ++i) j[metrics::kPhysicsMetricNames[i]] = r.p[i];
  j["gc_violation_rate"] = r.gc_violation;
  j["lc_violation_rate"] = r.lc_violation;
  j["joule_violation_rate"] = r.joule_violation;
  j["disconnected_entries"] = r.disconnected_entries;
  const auto& t = r.tolerances;
  j["tolerances"] = {{"EL_tolerance", t.el_tolerance},   {"loss_ratio_min", t.loss_ratio_min},
                     {"GC_tolerance", t.gc_tolerance},   {"LC_tolerance", t.lc_tolerance},
                     {"JOULE_tolerance", t.joule_tolerance}, {"nonnull_eps", t.nonnull_eps},
                     {"negative_eps", t.negative_eps},   {"node_floor_pu", t.node_floor_pu},
                     {"joule_form", t.joule == metrics::JouleForm::Squared ? "squared" : "unsquared"}};
  return j.dump(2);
}

std::string score_report_json(const ScoreReport& r) {
  json j;
  j["test"] = split_json(r.test, metrics::kMlMetricNames, metrics::kPhysicsMetricNames);
  j["test_ood"] = split_json(r.ood, metrics::kMlMetricNames, metrics::kPhysicsMetricNames);
  j["speedup_ratio"] = r.speedup_ratio;
  j["score_speedup"] = r.speedup;
  j["global"] = r.global;
  j["global_percent"] = r.global_percent();
  const auto& w = r.weights;
  j["weights"] = {{"test", w.test}, {"ood", w.ood},         {"speedup", w.speedup},      {"ml", w.ml},
                  {"physics", w.physics}, {"weibull_b", w.weibull_b}, {"weibull_c", w.weibull_c}};
  return j.dump(2);
}

ScoreReport parse_score_report(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    ScoreReport r;
    r.test = split_from(j.at("test"), metrics::kMlMetricNames, metrics::kPhysicsMetricNames);
    r.ood = split_from(j.at("test_ood"), metrics::kMlMetricNames, metrics::kPhysicsMetricNames);
    r.speedup_ratio = j.at("speedup_ratio").get<double>();
    r.speedup = j.at("score_speedup").get<double>();
    r.global = j.at("global").get<double>();
    const auto& w = j.at("weights");
    r.weights.test = w.at("test").get<double>();
    r.weights.ood = w.at("ood").get<double>();
    r.weights.speedup = w.at("speedup").get<double>();
    r.weights.ml = w.at("ml").get<double>();
    r.weights.physics = w.at("physics").get<double>();
    r.weights.weibull_b = w.at("weibull_b").get<double>();
    r.weights.weibull_c = w.at("weibull_c").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0, "score report");
  }
}

std::string render_score_table(const ScoreReport& r) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-9s %-13s %-17s %9s %9s %8s\n", "split", "ML", "Physics", "Score_ML",
                "Score_Phy", "Score");
  os << buf;
  for (const auto* s : {&r.test, &r.ood}) {
    std::snprintf(buf, sizeof buf, "%-9s %-13s %-17s %9.4f %9.4f %8.4f\n", s == &r.test ? "test" : "test_ood",
                  letters(s->ml_grades).c_str(), letters(s->physics_grades).c_str(), s->ml, s->physics, s->score);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "speed-up  ratio %.2f  score %.4f\n", r.speedup_ratio, r.speedup);
  os << buf;
  std::snprintf(buf, sizeof buf, "global    %.1f%%\n", r.global_percent());
  os << buf;
  return os.str();
}

std::string render_mean_std(const MeanStd& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%% ± %.1f", 100.0 * m.mean, 100.0 * m.std);
  return buf;
}

}  // namespace gridbench::scoring

#include "bpseval/framework.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bpseval/error.hpp"

namespace bpseval {

using ojson = nlohmann::ordered_json;

namespace {

// Runs fn(0..n-1) on up to `jobs` threads. Each index writes its own slot, so the
// reduction order is fixed by the caller. The lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Timestamp first_arrival(const EventLog& log) { return sorted_arrivals(log).front(); }

std::vector<std::string> collect_warnings(const SimulationResult& r, std::size_t replication) {
  std::vector<std::string> out;
  for (const auto& w : r.warnings) out.push_back("replication " + std::to_string(replication) + ": " + w);
  return out;
}

}  // namespace

void EvaluationConfig::validate() const {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw Error(Errc::InvalidArgument, "split ratio must lie in (0, 1)");
  if (replications < 1) throw Error(Errc::InvalidArgument, "replications must be >= 1");
  if (seeds < 1) throw Error(Errc::InvalidArgument, "seeds must be >= 1");
  if (!(role_threshold >= 0.0 && role_threshold <= 1.0)) {
    throw Error(Errc::InvalidArgument, "role threshold must lie in [0, 1]");
  }
  if (ngram_n < 1) throw Error(Errc::InvalidArgument, "n-gram order must be >= 1");
  if (mlp.hidden_units < 1 || mlp.batch_size < 1) throw Error(Errc::InvalidArgument, "MLP sizes must be >= 1");
  if (!(mlp.step_size > 0.0)) throw Error(Errc::InvalidArgument, "MLP step size must be > 0");
  scenario.validate();
}

EvaluationConfig config_from_json(std::string_view text, EvaluationConfig c) {
  try {
    const auto j = ojson::parse(text);
    if (!j.is_object()) throw Error(Errc::InvalidArgument, "config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
      if (key == "log") c.log_path = v.get<std::string>();
      else if (key == "split_ratio") c.split_ratio = v.get<double>();
      else if (key == "replications") c.replications = v.get<std::size_t>();
      else if (key == "seeds") c.seeds = v.get<std::size_t>();
      else if (key == "base_seed") c.base_seed = v.get<std::uint64_t>();
      else if (key == "scenario") c.scenario = Scenario::parse(v.get<std::string>());
      else if (key == "mode") c.mode = parse_distance_mode(v.get<std::string>());
      else if (key == "role_threshold") c.role_threshold = v.get<double>();
      else if (key == "ngram_n") c.ngram_n = v.get<std::size_t>();
      else if (key == "jobs") c.jobs = v.get<std::size_t>();
      else if (key == "mlp") {
        c.mlp.hidden_units = v.value("hidden_units", c.mlp.hidden_units);
        c.mlp.epochs = v.value("epochs", c.mlp.epochs);
        c.mlp.batch_size = v.value("batch_size", c.mlp.batch_size);
        c.mlp.step_size = v.value("step_size", c.mlp.step_size);
      } else {
        throw Error(Errc::InvalidArgument, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed config JSON: ") + e.what());
  }
  return c;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "mean of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / (n - 1.0))};
}

bool within_noise_band(const MeanStd& loss, const MeanStd& gt, double k) { return loss.mean <= gt.mean + k * gt.std; }

std::vector<std::array<double, kTaskCount>> compute_utility_loss(std::span<const TaskMetricVector> real,
                                                                 std::span<const TaskMetricVector> simulated) {
  if (real.empty() || simulated.empty()) throw Error(Errc::EmptySample, "utility loss needs real and simulated vectors");
  std::array<double, kTaskCount> real_mean{};
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    std::vector<double> v;
    for (const auto& m : real) v.push_back(m.values[t]);
    real_mean[t] = mean_std(v).mean;
  }
  std::vector<std::array<double, kTaskCount>> out;
  for (const auto& m : simulated) {
    std::array<double, kTaskCount> loss{};
    for (std::size_t t = 0; t < kTaskCount; ++t) loss[t] = std::abs(m.values[t] - real_mean[t]);
    out.push_back(loss);
  }
  return out;
}

PreparedEvaluation prepare_utility_evaluation(const EvaluationConfig& config, const EventLog& log) {
  config.validate();
  PreparedEvaluation p{temporal_split(log, config.split_ratio), {}, {}, {}};
  // Roles come from the real training log and label simulated resources too.
  p.roles = derive_roles(p.split.train, config.role_threshold);
  p.discovered = discover_model(p.split.train, config.role_threshold);
  p.real_vectors.resize(config.seeds);
  parallel_for(config.seeds, config.jobs, [&](std::size_t s) {
    p.real_vectors[s] = metric_vector(p.split.train, p.split.test, p.roles, config.base_seed + s, config.mlp);
  });
  return p;
}

UtilityReport evaluate_scenario(const EvaluationConfig& config, const PreparedEvaluation& p,
                                const Scenario& scenario) {
  config.validate();
  const BpsModel model = perturb_model(p.discovered, scenario);
  const std::size_t n_cases = p.split.train.size();
  const Timestamp start = first_arrival(p.split.train);

  UtilityReport rep;
  rep.scenario = scenario.id();
  rep.log_path = config.log_path;
  rep.split_ratio = config.split_ratio;
  rep.replications = config.replications;
  rep.seeds = config.seeds;
  rep.base_seed = config.base_seed;
  rep.role_threshold = config.role_threshold;
  rep.mlp = config.mlp;
  rep.train_cases = p.split.train.size();
  rep.test_cases = p.split.test.size();
  rep.real_vectors = p.real_vectors;
  rep.simulated_vectors.resize(config.replications);
  rep.warnings.resize(config.replications);

  parallel_for(config.replications, config.jobs, [&](std::size_t r) {
    const std::uint64_t seed = config.base_seed + r;
    const SimulationResult sim = simulate(model, n_cases, start, seed);
    rep.warnings[r] = collect_warnings(sim, r);
    rep.simulated_vectors[r] = metric_vector(sim.log, p.split.test, p.roles, seed, config.mlp);
  });

  rep.losses = compute_utility_loss(rep.real_vectors, rep.simulated_vectors);
  for (std::size_t t = 0; t < kTaskCount; ++t) {
    std::vector<double> real, sim, loss;
    for (const auto& m : rep.real_vectors) real.push_back(m.values[t]);
    for (const auto& m : rep.simulated_vectors) sim.push_back(m.values[t]);
    for (const auto& l : rep.losses) loss.push_back(l[t]);
    rep.tasks[t] = {mean_std(real), mean_std(sim), mean_std(loss)};
  }
  return rep;
}

UtilityReport run_utility_evaluation(const EvaluationConfig& config, const EventLog& log) {
  const PreparedEvaluation p = prepare_utility_evaluation(config, log);
  return evaluate_scenario(config, p, config.scenario);
}

UtilityReport run_utility_evaluation(const EvaluationConfig& config) {
  config.validate();
  return run_utility_evaluation(config, parse_event_log_csv(config.log_path));
}

StandardReport run_standard_practice_evaluation(const EvaluationConfig& config, const EventLog& log,
                                                ReferenceKind reference) {
  config.validate();
  const TemporalSplit split = temporal_split(log, config.split_ratio);
  const BpsModel model = perturb_model(discover_model(split.train, config.role_threshold), config.scenario);
  const EventLog& ref = reference == ReferenceKind::Test ? split.test : split.train;

  StandardReport rep;
  rep.scenario = config.scenario.id();
  rep.log_path = config.log_path;
  rep.reference = reference;
  rep.mode = config.mode;
  rep.split_ratio = config.split_ratio;
  rep.replications = config.replications;
  rep.base_seed = config.base_seed;
  rep.ngram_n = config.ngram_n;
  rep.reference_cases = ref.size();
  rep.simulation_start = first_arrival(ref);
  rep.runs.resize(config.replications);
  rep.warnings.resize(config.replications);

  parallel_for(config.replications, config.jobs, [&](std::size_t r) {
    const SimulationResult sim = simulate(model, ref.size(), rep.simulation_start, config.base_seed + r);
    rep.warnings[r] = collect_warnings(sim, r);
    rep.runs[r] = standard_practice_report(sim.log, ref, config.mode, reference, config.ngram_n);
  });
  rep.mean = mean_report(rep.runs);
  return rep;
}

StandardReport run_standard_practice_evaluation(const EvaluationConfig& config, ReferenceKind reference) {
  config.validate();
  return run_standard_practice_evaluation(config, parse_event_log_csv(config.log_path), reference);
}

// ---------------------------------------------------------------------------
// Rendering

std::string_view report_unit(Task task) {
  switch (task) {
    case Task::NAP:
    case Task::NRP: return "accuracy";
    case Task::NPP: return "min";
    case Task::NWP: return "hour";
    case Task::RTP: return "day";
  }
  return "";
}

std::string format_task_value(Task task, double value) {
  char buf[64];
  switch (task) {
    case Task::NAP:
    case Task::NRP: std::snprintf(buf, sizeof buf, "%.4f", value); break;
    case Task::NPP: std::snprintf(buf, sizeof buf, "%.2f", value); break;
    case Task::NWP: std::snprintf(buf, sizeof buf, "%.2f", value / 60.0); break;
    case Task::RTP: std::snprintf(buf, sizeof buf, "%.2f", value / 1440.0); break;
  }
  return buf;
}

namespace {

ojson to_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }
MeanStd mean_std_from(const ojson& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

ojson to_json(const MlpHyperparameters& h) {
  return {{"hidden_units", h.hidden_units}, {"epochs", h.epochs}, {"batch_size", h.batch_size},
          {"step_size", h.step_size}};
}

MlpHyperparameters mlp_from(const ojson& j) {
  return {j.at("hidden_units").get<std::size_t>(), j.at("epochs").get<std::size_t>(),
          j.at("batch_size").get<std::size_t>(), j.at("step_size").get<double>()};
}

ojson task_object(const std::array<double, kTaskCount>& v) {
  ojson o = ojson::object();
  for (Task t : kTasks) o[std::string(to_string(t))] = v[task_index(t)];
  return o;
}

std::array<double, kTaskCount> task_array(const ojson& o) {
  std::array<double, kTaskCount> v{};
  for (Task t : kTasks) v[task_index(t)] = o.at(std::string(to_string(t))).get<double>();
  return v;
}

ojson to_json(const TaskMetricVector& m) {
  ojson per_arch = ojson::object();
  for (std::size_t k = 0; k < kArchitectureCount; ++k) {
    per_arch[std::string(to_string(kArchitectures[k]))] = task_object(m.per_architecture[k]);
  }
  return {{"mean", task_object(m.values)}, {"per_architecture", per_arch}};
}

TaskMetricVector metric_vector_from(const ojson& j) {
  TaskMetricVector m;
  m.values = task_array(j.at("mean"));
  for (std::size_t k = 0; k < kArchitectureCount; ++k) {
    m.per_architecture[k] = task_array(j.at("per_architecture").at(std::string(to_string(kArchitectures[k]))));
  }
  return m;
}

ojson to_json(const DistanceReport& d) {
  return {{"NGD", d.ngd}, {"AEDD", d.aedd}, {"CADD", d.cadd}, {"CEDD", d.cedd}, {"REDD", d.redd}, {"CTDD", d.ctdd}};
}

DistanceReport distance_report_from(const ojson& j, DistanceMode mode, ReferenceKind ref) {
  DistanceReport d;
  d.ngd = j.at("NGD").get<double>();
  d.aedd = j.at("AEDD").get<double>();
  d.cadd = j.at("CADD").get<double>();
  d.cedd = j.at("CEDD").get<double>();
  d.redd = j.at("REDD").get<double>();
  d.ctdd = j.at("CTDD").get<double>();
  d.mode = mode;
  d.reference_kind = ref;
  return d;
}

template <typename F>
auto parse_report(std::string_view text, const char* schema, F body) {
  try {
    const auto j = ojson::parse(text);
    if (j.value("schema", std::string{}) != schema) {
      throw Error(Errc::InvalidArgument, std::string("report schema must be '") + schema + "'");
    }
    return body(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed report JSON: ") + e.what());
  }
}

constexpr const char* kUtilitySchema = "bpseval.utility_report/1";
constexpr const char* kStandardSchema = "bpseval.standard_report/1";

}  // namespace

std::string render_json(const UtilityReport& r) {
  ojson j;
  j["schema"] = kUtilitySchema;
  ojson units = ojson::object();
  for (Task t : kTasks) units[std::string(to_string(t))] = report_unit(t);
  j["config"] = {
      {"log", r.log_path},
      {"scenario", r.scenario},
      {"split_ratio", r.split_ratio},
      {"replications", r.replications},
      {"seeds", r.seeds},
      {"base_seed", r.base_seed},
      {"role_threshold", r.role_threshold},
      {"mlp", to_json(r.mlp)},
      {"simulation_alignment", "TRAIN"},
      {"ppm_evaluation", "TEST"},
      {"loss_pairing", "per_replication_vs_real_mean"},
      {"report_units", units},
  };
  j["train_cases"] = r.train_cases;
  j["test_cases"] = r.test_cases;

  ojson tasks = ojson::object();
  for (Task t : kTasks) {
    const auto& u = r.tasks[task_index(t)];
    tasks[std::string(to_string(t))] = {{"real", to_json(u.real)},
                                        {"simulated", to_json(u.simulated)},
                                        {"utility_loss", to_json(u.loss)}};
  }
  j["tasks"] = tasks;

  ojson real = ojson::array(), sim = ojson::array(), losses = ojson::array(), warnings = ojson::array();
  for (const auto& m : r.real_vectors) real.push_back(to_json(m));
  for (const auto& m : r.simulated_vectors) sim.push_back(to_json(m));
  for (const auto& l : r.losses) losses.push_back(task_object(l));
  for (const auto& w : r.warnings) warnings.push_back(w);
  j["real_vectors"] = real;
  j["simulated_vectors"] = sim;
  j["replication_losses"] = losses;
  j["replication_warnings"] = warnings;
  return j.dump(2) + "\n";
}

UtilityReport utility_report_from_json(std::string_view text) {
  return parse_report(text, kUtilitySchema, [](const ojson& j) {
    UtilityReport r;
    const auto& c = j.at("config");
    r.log_path = c.at("log").get<std::string>();
    r.scenario = c.at("scenario").get<std::string>();
    r.split_ratio = c.at("split_ratio").get<double>();
    r.replications = c.at("replications").get<std::size_t>();
    r.seeds = c.at("seeds").get<std::size_t>();
    r.base_seed = c.at("base_seed").get<std::uint64_t>();
    r.role_threshold = c.at("role_threshold").get<double>();
    r.mlp = mlp_from(c.at("mlp"));
    r.train_cases = j.at("train_cases").get<std::size_t>();
    r.test_cases = j.at("test_cases").get<std::size_t>();
    for (Task t : kTasks) {
      const auto& u = j.at("tasks").at(std::string(to_string(t)));
      r.tasks[task_index(t)] = {mean_std_from(u.at("real")), mean_std_from(u.at("simulated")),
                                mean_std_from(u.at("utility_loss"))};
    }
    for (const auto& m : j.at("real_vectors")) r.real_vectors.push_back(metric_vector_from(m));
    for (const auto& m : j.at("simulated_vectors")) r.simulated_vectors.push_back(metric_vector_from(m));
    for (const auto& l : j.at("replication_losses")) r.losses.push_back(task_array(l));
    for (const auto& w : j.at("replication_warnings")) r.warnings.push_back(w.get<std::vector<std::string>>());
    return r;
  });
}

std::string render_markdown(const UtilityReport& r) {
  std::ostringstream md;
  md << "# Utility report: " << r.scenario << "\n\n";
  md << "Train cases: " << r.train_cases << ", test cases: " << r.test_cases << ", R = " << r.replications
     << ", S = " << r.seeds << ", base seed " << r.base_seed << "\n\n";
  md << "| Task | Unit | Real | Simulated | Utility loss |\n";
  md << "|---|---|---|---|---|\n";
  for (Task t : kTasks) {
    const auto& u = r.tasks[task_index(t)];
    auto cell = [&](const MeanStd& m) { return format_task_value(t, m.mean) + " ± " + format_task_value(t, m.std); };
    md << "| " << to_string(t) << " | " << report_unit(t) << " | " << cell(u.real) << " | " << cell(u.simulated)
       << " | " << cell(u.loss) << " |\n";
  }
  std::size_t n_warnings = 0;
  for (const auto& w : r.warnings) n_warnings += w.size();
  if (n_warnings > 0) {
    md << "\nWarnings:\n\n";
    for (const auto& w : r.warnings) {
      for (const auto& line : w) md << "- " << line << "\n";
    }
  }
  return md.str();
}

std::string render_json(const StandardReport& r) {
  ojson j;
  j["schema"] = kStandardSchema;
  j["config"] = {
      {"log", r.log_path},
      {"scenario", r.scenario},
      {"reference", to_string(r.reference)},
      {"mode", to_string(r.mode)},
      {"split_ratio", r.split_ratio},
      {"replications", r.replications},
      {"base_seed", r.base_seed},
      {"ngram_n", r.ngram_n},
  };
  j["reference_cases"] = r.reference_cases;
  j["simulation_start"] = format_iso8601(r.simulation_start);
  j["mean"] = to_json(r.mean);
  ojson runs = ojson::array(), warnings = ojson::array();
  for (const auto& d : r.runs) runs.push_back(to_json(d));
  for (const auto& w : r.warnings) warnings.push_back(w);
  j["replications"] = runs;
  j["replication_warnings"] = warnings;
  return j.dump(2) + "\n";
}

StandardReport standard_report_from_json(std::string_view text) {
  return parse_report(text, kStandardSchema, [](const ojson& j) {
    StandardReport r;
    const auto& c = j.at("config");
    r.log_path = c.at("log").get<std::string>();
    r.scenario = c.at("scenario").get<std::string>();
    r.reference = parse_reference_kind(c.at("reference").get<std::string>());
    r.mode = parse_distance_mode(c.at("mode").get<std::string>());
    r.split_ratio = c.at("split_ratio").get<double>();
    r.replications = c.at("replications").get<std::size_t>();
    r.base_seed = c.at("base_seed").get<std::uint64_t>();
    r.ngram_n = c.at("ngram_n").get<std::size_t>();
    r.reference_cases = j.at("reference_cases").get<std::size_t>();
    const auto start = parse_iso8601(j.at("simulation_start").get<std::string>());
    if (!start) throw Error(Errc::InvalidArgument, "simulation_start is not an ISO-8601 timestamp");
    r.simulation_start = *start;
    r.mean = distance_report_from(j.at("mean"), r.mode, r.reference);
    for (const auto& d : j.at("replications")) r.runs.push_back(distance_report_from(d, r.mode, r.reference));
    for (const auto& w : j.at("replication_warnings")) r.warnings.push_back(w.get<std::vector<std::string>>());
    return r;
  });
}

}  // namespace bpseval

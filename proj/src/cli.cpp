#include "bpseval/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bpseval/error.hpp"
#include "bpseval/framework.hpp"

namespace bpseval::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "BPS_EVALKIT_OUT";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string default_out_dir() {
  const char* env = std::getenv(kOutEnv);
  return env != nullptr && *env != '\0' ? env : ".";
}

std::string log_to_csv(const EventLog& log) {
  std::ostringstream ss;
  write_event_log_csv(log, ss);
  return ss.str();
}

// Edit scenarios carry their row overrides as `KIND:path.json`.
Scenario load_scenario(const std::string& text, const std::string& overrides_path) {
  Scenario s = Scenario::parse(text);
  if (s.kind != ScenarioKind::SeqEdit && s.kind != ScenarioKind::GatewayEdit) {
    if (!overrides_path.empty()) throw Error(Errc::InvalidScenario, "--overrides only applies to SEQ_EDIT/GATEWAY_EDIT");
    return s;
  }
  std::string path = overrides_path;
  if (const auto colon = text.find(':'); colon != std::string::npos) path = text.substr(colon + 1);
  if (path.empty()) throw Error(Errc::InvalidScenario, text + ": needs an overrides JSON file (KIND:path or --overrides)");
  s.overrides = overrides_from_json(read_file(path));
  return s;
}

Timestamp parse_start(const std::string& text) {
  const auto t = parse_iso8601(text);
  if (!t) throw Error(Errc::InvalidArgument, "--start is not an ISO-8601 timestamp: '" + text + "'");
  return *t;
}

struct Pending {
  std::vector<std::pair<std::string, std::string>> files;  // path, content
  void add(std::string path, std::string content) { files.emplace_back(std::move(path), std::move(content)); }
};

// Shared evaluation flags; a flag given on the command line beats --config.
struct EvalFlags {
  std::string log, config, scenario, overrides, mode, out;
  double ratio = 0.0, role_threshold = 0.0;
  std::size_t replications = 0, seeds = 0, jobs = 0, ngram = 0;
  std::uint64_t seed = 0;
  CLI::Option *o_ratio = nullptr, *o_rep = nullptr, *o_seeds = nullptr, *o_seed = nullptr, *o_jobs = nullptr,
              *o_role = nullptr, *o_ngram = nullptr;

  void attach(CLI::App* cmd, bool with_seeds) {
    cmd->add_option("--log", log, "Input event log (CSV)");
    cmd->add_option("--config", config, "JSON config file");
    cmd->add_option("--scenario", scenario, "Perturbation KIND[:param]");
    cmd->add_option("--overrides", overrides, "Row overrides JSON for SEQ_EDIT/GATEWAY_EDIT");
    cmd->add_option("--mode", mode, "TIMESTAMP_SAMPLES or HOURLY_COUNTS");
    cmd->add_option("--out", out, "Output directory (default $BPS_EVALKIT_OUT or .)");
    o_ratio = cmd->add_option("--ratio", ratio, "Training share of cases");
    o_rep = cmd->add_option("--replications", replications, "Simulated replications R");
    if (with_seeds) o_seeds = cmd->add_option("--seeds", seeds, "Real-data PPM seeds S");
    o_seed = cmd->add_option("--seed", seed, "Base seed");
    o_jobs = cmd->add_option("--jobs", jobs, "Worker threads");
    o_role = cmd->add_option("--role-threshold", role_threshold, "Cosine threshold for role merging");
    o_ngram = cmd->add_option("--ngram", ngram, "n for NGD");
  }

  EvaluationConfig resolve() const {
    EvaluationConfig c;
    if (!config.empty()) c = config_from_json(read_file(config), c);
    if (!log.empty()) c.log_path = log;
    if (!scenario.empty() || !overrides.empty()) c.scenario = load_scenario(scenario.empty() ? "GT" : scenario, overrides);
    if (!mode.empty()) c.mode = parse_distance_mode(mode);
    if (o_ratio->count()) c.split_ratio = ratio;
    if (o_rep->count()) c.replications = replications;
    if (o_seeds != nullptr && o_seeds->count()) c.seeds = seeds;
    if (o_seed->count()) c.base_seed = seed;
    if (o_jobs->count()) c.jobs = jobs;
    if (o_role->count()) c.role_threshold = role_threshold;
    if (o_ngram->count()) c.ngram_n = ngram;
    if (c.log_path.empty()) throw Error(Errc::InvalidArgument, "--log is required (or 'log' in --config)");
    c.validate();
    return c;
  }
};

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(Errc::Io, "cannot create directory '" + target.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw Error(Errc::Io, "write failed for '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::Io, "cannot rename onto '" + path + "'");
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Business process simulation evaluation toolkit", "bps-evalkit"};
  app.require_subcommand(1, 1);
  Pending pending;
  std::function<void()> action;

  // gen-ref
  std::uint64_t gen_seed = 7;
  std::size_t gen_cases = 1000;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-ref", "Generate a log from the built-in reference process");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--cases", gen_cases, "Number of cases");
  gen->add_option("--out", gen_out, "Output CSV")->required();
  gen->callback([&] {
    action = [&] { pending.add(gen_out, log_to_csv(generate_reference_log(gen_seed, gen_cases))); };
  });

  // split
  std::string split_log, split_train, split_test;
  double split_ratio = 0.8;
  auto* split = app.add_subcommand("split", "Temporal train/test split by case arrival");
  split->add_option("--log", split_log, "Input CSV")->required();
  split->add_option("--ratio", split_ratio, "Training share");
  split->add_option("--out-train", split_train, "Training CSV")->required();
  split->add_option("--out-test", split_test, "Test CSV")->required();
  split->callback([&] {
    action = [&] {
      const TemporalSplit s = temporal_split(parse_event_log_csv(split_log), split_ratio);
      pending.add(split_train, log_to_csv(s.train));
      pending.add(split_test, log_to_csv(s.test));
    };
  });

  // discover
  std::string disc_log, disc_out;
  double disc_threshold = 0.7;
  auto* disc = app.add_subcommand("discover", "Discover a simulation model from a log");
  disc->add_option("--log", disc_log, "Input CSV")->required();
  disc->add_option("--out-model", disc_out, "Model JSON")->required();
  disc->add_option("--role-threshold", disc_threshold, "Cosine threshold for role merging");
  disc->callback([&] {
    action = [&] { pending.add(disc_out, model_to_json(discover_model(parse_event_log_csv(disc_log), disc_threshold))); };
  });

  // perturb
  std::string pert_model, pert_scenario, pert_overrides, pert_out;
  auto* pert = app.add_subcommand("perturb", "Apply a what-if scenario to a model");
  pert->add_option("--model", pert_model, "Model JSON")->required();
  pert->add_option("--scenario", pert_scenario, "KIND[:param]")->required();
  pert->add_option("--overrides", pert_overrides, "Row overrides JSON for SEQ_EDIT/GATEWAY_EDIT");
  pert->add_option("--out-model", pert_out, "Model JSON")->required();
  pert->callback([&] {
    action = [&] {
      const Scenario s = load_scenario(pert_scenario, pert_overrides);
      pending.add(pert_out, model_to_json(perturb_model(model_from_json(read_file(pert_model)), s)));
    };
  });

  // simulate
  std::string sim_model, sim_start, sim_out;
  std::size_t sim_cases = 0;
  std::uint64_t sim_seed = 1;
  auto* sim = app.add_subcommand("simulate", "Simulate a log from a model");
  sim->add_option("--model", sim_model, "Model JSON")->required();
  sim->add_option("--cases", sim_cases, "Number of cases")->required();
  sim->add_option("--start", sim_start, "First arrival (ISO-8601); default: the model's first_arrival");
  sim->add_option("--seed", sim_seed, "Seed");
  sim->add_option("--out", sim_out, "Output CSV")->required();
  sim->callback([&] {
    action = [&] {
      if (sim_cases == 0) throw Error(Errc::InvalidArgument, "--cases must be positive");
      const BpsModel m = model_from_json(read_file(sim_model));
      const Timestamp start = sim_start.empty() ? m.first_arrival : parse_start(sim_start);
      const SimulationResult r = simulate(m, sim_cases, start, sim_seed);
      for (const auto& w : r.warnings) err << "warning: " << w << "\n";
      pending.add(sim_out, log_to_csv(r.log));
    };
  });

  // eval-standard
  EvalFlags std_flags;
  std::string std_reference = "test";
  auto* std_cmd = app.add_subcommand("eval-standard", "Distance-based evaluation against the test or train log");
  std_flags.attach(std_cmd, false);
  std_cmd->add_option("--reference", std_reference, "test or train");
  std_cmd->callback([&] {
    action = [&] {
      const EvaluationConfig c = std_flags.resolve();
      const StandardReport rep = run_standard_practice_evaluation(c, parse_reference_kind(std_reference));
      const fs::path dir = std_flags.out.empty() ? default_out_dir() : std_flags.out;
      pending.add((dir / "standard_report.json").string(), render_json(rep));
    };
  });

  // eval-utility
  EvalFlags util_flags;
  auto* util_cmd = app.add_subcommand("eval-utility", "Utility (train-on-synthetic) evaluation");
  util_flags.attach(util_cmd, true);
  util_cmd->callback([&] {
    action = [&] {
      const EvaluationConfig c = util_flags.resolve();
      const UtilityReport rep = run_utility_evaluation(c);
      for (const auto& ws : rep.warnings) {
        for (const auto& w : ws) err << "warning: " << w << "\n";
      }
      const fs::path dir = util_flags.out.empty() ? default_out_dir() : util_flags.out;
      pending.add((dir / "utility_report.json").string(), render_json(rep));
      pending.add((dir / "utility_report.md").string(), render_markdown(rep));
    };
  });

  std::vector<const char*> argv;
  argv.push_back("bps-evalkit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "code=Usage msg=" << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (action) action();
    // Everything is computed before the first byte hits the disk.
    for (const auto& [path, content] : pending.files) {
      write_file_atomic(path, content);
      out << "wrote " << path << "\n";
    }
  } catch (const Error& e) {
    err << "code=" << errc_name(e.code()) << " msg=" << e.what() << "\n";
    return e.code() == Errc::Io ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "code=Internal msg=" << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace bpseval::cli

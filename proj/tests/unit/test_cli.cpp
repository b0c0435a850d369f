#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "bpseval/cli.hpp"
#include "bpseval/framework.hpp"
#include "support.hpp"

using namespace bpseval;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t file_count(const fs::path& dir) {
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator()));
}

// Small MLP so CLI evaluations stay quick.
constexpr const char* kQuickConfig =
    R"({"replications": 2, "seeds": 2, "base_seed": 3, "mlp": {"hidden_units": 8, "epochs": 2}})";

}  // namespace

TEST_CASE("gen-ref writes a parseable reference log") {
  const fs::path dir = testsupport::scratch_dir("cli_genref");
  const auto r = run({"gen-ref", "--seed", "7", "--cases", "100", "--out", (dir / "ref.csv").string()});
  CHECK(r.code == cli::kExitOk);
  const EventLog log = parse_event_log_csv(dir / "ref.csv");
  CHECK(log.size() == 100);
  CHECK(log == generate_reference_log(7, 100));
}

TEST_CASE("usage errors exit 1 and write nothing") {
  const fs::path dir = testsupport::scratch_dir("cli_usage");
  auto r = run({"gen-ref", "--bogus", "--out", (dir / "x.csv").string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("code=Usage") != std::string::npos);
  CHECK(file_count(dir) == 0);
  r = run({"no-such-command"});
  CHECK(r.code == cli::kExitValidation);
  r = run({"gen-ref", "--cases", "0", "--out", (dir / "x.csv").string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK(file_count(dir) == 0);
}

TEST_CASE("a missing input exits 2") {
  const fs::path dir = testsupport::scratch_dir("cli_missing");
  const auto r = run({"discover", "--log", (dir / "absent.csv").string(), "--out-model", (dir / "m.json").string()});
  CHECK(r.code == cli::kExitIo);
  CHECK(r.err.find("code=Io") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "m.json"));
}

TEST_CASE("malformed input exits 1 with the error code") {
  const fs::path dir = testsupport::scratch_dir("cli_malformed");
  testsupport::write_text(dir / "bad.csv", "case_id,activity\nc1,A\n");
  const auto r = run({"discover", "--log", (dir / "bad.csv").string(), "--out-model", (dir / "m.json").string()});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("code=MissingColumn") != std::string::npos);
}

TEST_CASE("pipeline commands chain through files") {
  const fs::path dir = testsupport::scratch_dir("cli_pipeline");
  const auto p = [&](const char* name) { return (dir / name).string(); };
  REQUIRE(run({"gen-ref", "--seed", "5", "--cases", "120", "--out", p("ref.csv")}).code == 0);
  REQUIRE(run({"split", "--log", p("ref.csv"), "--ratio", "0.75", "--out-train", p("train.csv"), "--out-test",
               p("test.csv")})
              .code == 0);
  CHECK(parse_event_log_csv(dir / "train.csv").size() == 90);
  CHECK(parse_event_log_csv(dir / "test.csv").size() == 30);
  REQUIRE(run({"discover", "--log", p("train.csv"), "--out-model", p("model.json")}).code == 0);
  REQUIRE(run({"perturb", "--model", p("model.json"), "--scenario", "DUR:2", "--out-model", p("dur.json")}).code == 0);
  const BpsModel base = model_from_json(testsupport::read_text(dir / "model.json"));
  const BpsModel dur = model_from_json(testsupport::read_text(dir / "dur.json"));
  CHECK(dur.durations.begin()->second.scale == 2.0);
  CHECK(base.durations.begin()->second.scale == 1.0);

  REQUIRE(run({"simulate", "--model", p("dur.json"), "--cases", "40", "--seed", "9", "--out", p("sim.csv")}).code ==
          0);
  const EventLog sim = parse_event_log_csv(dir / "sim.csv");
  CHECK(sim.size() == 40);
  CHECK(sim.earliest_arrival() >= base.first_arrival);

  testsupport::write_text(dir / "edit.json", R"({"Appraise property": {"AML check": 1}})");
  CHECK(run({"perturb", "--model", p("model.json"), "--scenario", "SEQ_EDIT:" + p("edit.json"), "--out-model",
             p("seq.json")})
            .code == 0);
  CHECK(model_from_json(testsupport::read_text(dir / "seq.json")).transitions.at("Appraise property").at("AML check") ==
        1.0);
  CHECK(run({"perturb", "--model", p("model.json"), "--scenario", "CAL:+5.5", "--out-model", p("cal.json")}).code ==
        cli::kExitValidation);
  CHECK_FALSE(fs::exists(dir / "cal.json"));
}

TEST_CASE("eval-utility writes reports and flags override the config file") {
  const fs::path dir = testsupport::scratch_dir("cli_eval");
  REQUIRE(run({"gen-ref", "--seed", "2", "--cases", "120", "--out", (dir / "ref.csv").string()}).code == 0);
  testsupport::write_text(dir / "config.json", kQuickConfig);
  const auto r = run({"eval-utility", "--log", (dir / "ref.csv").string(), "--config", (dir / "config.json").string(),
                      "--scenario", "DUR:3.0", "--replications", "3", "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const UtilityReport rep = utility_report_from_json(testsupport::read_text(dir / "out" / "utility_report.json"));
  CHECK(rep.scenario == "DUR:3");
  CHECK(rep.replications == 3);
  CHECK(rep.seeds == 2);
  CHECK(rep.mlp.epochs == 2);
  CHECK(rep[Task::NPP].loss.mean > 0.0);
  const std::string md = testsupport::read_text(dir / "out" / "utility_report.md");
  CHECK(md.find("| NPP |") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "utility_report.json.tmp"));
}

TEST_CASE("eval-standard honours BPS_EVALKIT_OUT") {
  const fs::path dir = testsupport::scratch_dir("cli_std");
  REQUIRE(run({"gen-ref", "--seed", "4", "--cases", "120", "--out", (dir / "ref.csv").string()}).code == 0);
  ::setenv("BPS_EVALKIT_OUT", (dir / "env_out").string().c_str(), 1);
  const auto r = run({"eval-standard", "--log", (dir / "ref.csv").string(), "--replications", "2", "--reference",
                      "train", "--mode", "hourly"});
  ::unsetenv("BPS_EVALKIT_OUT");
  REQUIRE(r.code == 0);
  const StandardReport rep = standard_report_from_json(testsupport::read_text(dir / "env_out" / "standard_report.json"));
  CHECK(rep.reference == ReferenceKind::Train);
  CHECK(rep.mode == DistanceMode::HourlyCounts);
  CHECK(rep.runs.size() == 2);
}

TEST_CASE("eval-utility output is byte-identical across runs") {
  const fs::path dir = testsupport::scratch_dir("cli_repro");
  REQUIRE(run({"gen-ref", "--seed", "8", "--cases", "100", "--out", (dir / "ref.csv").string()}).code == 0);
  testsupport::write_text(dir / "config.json", kQuickConfig);
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run({"eval-utility", "--log", (dir / "ref.csv").string(), "--config", (dir / "config.json").string(),
                 "--scenario", "RC", "--jobs", sub[0] == 'a' ? "1" : "2", "--out", (dir / sub).string()})
                .code == 0);
  }
  CHECK(testsupport::read_text(dir / "a" / "utility_report.json") ==
        testsupport::read_text(dir / "b" / "utility_report.json"));
  CHECK(testsupport::read_text(dir / "a" / "utility_report.md") ==
        testsupport::read_text(dir / "b" / "utility_report.md"));
}

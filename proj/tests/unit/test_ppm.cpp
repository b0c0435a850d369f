#include <doctest.h>

#include <algorithm>
#include <random>

#include "bpseval/error.hpp"
#include "bpseval/ppm.hpp"
#include "bpseval/simulator.hpp"
#include "support.hpp"

using namespace bpseval;
using testsupport::at_minutes;
using testsupport::ev;

namespace {

PrefixSample sample(const std::string& prev, const std::string& cur, const std::string& next, double rtp = 0.0) {
  PrefixSample s;
  s.activity_window.fill(kPadLabel);
  s.role_window.fill(kPadLabel);
  s.activity_window[kWindowSize - 2] = prev;
  s.activity_window[kWindowSize - 1] = cur;
  s.role_window[kWindowSize - 1] = "role_0";
  s.next_activity = next;
  s.rtp_minutes = rtp;
  return s;
}

MlpHyperparameters quick_mlp() {
  MlpHyperparameters h;
  h.hidden_units = 16;
  h.epochs = 200;
  h.step_size = 1e-2;
  return h;
}

}  // namespace

TEST_CASE("prefix samples of a two-event trace") {
  const EventLog log = EventLog::from_events({ev("c", "A", "R1", at_minutes(0), at_minutes(10)),
                                              ev("c", "B", "R2", at_minutes(25), at_minutes(40))});
  RoleMap roles;
  roles.roles = {"role_0", "role_1"};
  roles.role_of = {{"R1", "role_0"}, {"R2", "role_1"}};
  const auto s = extract_prefix_samples(log, roles);
  REQUIRE(s.size() == 2);

  CHECK(s[0].activity_window[kWindowSize - 1] == "A");
  CHECK(s[0].activity_window[kWindowSize - 2] == kPadLabel);
  CHECK(s[0].role_window[kWindowSize - 1] == "role_0");
  CHECK(s[0].elapsed_log1p == std::log1p(10.0));
  CHECK(s[0].hour_of_day == 0);
  CHECK(s[0].weekday == 0);
  CHECK(s[0].next_activity == "B");
  CHECK(s[0].next_role == "role_1");
  CHECK(s[0].npp_minutes == 15.0);
  CHECK(s[0].nwp_minutes == 15.0);
  CHECK(s[0].rtp_minutes == 30.0);

  CHECK(s[1].activity_window[kWindowSize - 2] == "A");
  CHECK(s[1].activity_window[kWindowSize - 1] == "B");
  CHECK(s[1].next_activity == kEndLabel);
  CHECK_FALSE(s[1].next_role.has_value());
  CHECK_FALSE(s[1].has_target(Task::NPP));
  CHECK_FALSE(s[1].has_target(Task::NWP));
  CHECK(s[1].has_target(Task::RTP));
  CHECK(s[1].rtp_minutes == 0.0);
  CHECK(s[1].elapsed_log1p == std::log1p(40.0));
}

TEST_CASE("window keeps the last ten events") {
  std::vector<std::string> acts;
  for (int i = 0; i < 12; ++i) acts.push_back("A" + std::to_string(i));
  const EventLog log = testsupport::chain_log(acts, 1);
  const auto s = extract_prefix_samples(log, derive_roles(log));
  REQUIRE(s.size() == 12);
  CHECK(s[11].activity_window.front() == "A2");
  CHECK(s[11].activity_window.back() == "A11");
  CHECK(std::count(s[3].activity_window.begin(), s[3].activity_window.end(), std::string(kPadLabel)) == 6);
}

TEST_CASE("vocabulary layout") {
  const std::vector<PrefixSample> a{sample("X", "Y", "Z")}, b{sample("Y", "W", kEndLabel)};
  const std::span<const PrefixSample> sets[] = {a, b};
  const Vocabulary v = Vocabulary::fit(sets);
  CHECK(v.activity_id(kPadLabel) == 0);
  CHECK(v.activity_id(kEndLabel) == 1);
  CHECK(v.activity_id("W") == 2);
  CHECK(v.activity_id("Z") == 5);
  CHECK(v.activity_id("nope") == -1);
  CHECK(v.role_id(kPadLabel) == 0);
  CHECK(v.role_id("role_0") == 1);
  CHECK(v.class_count(Task::NAP) == 6);
  CHECK(v.class_label(Task::NAP, 3) == "X");
}

TEST_CASE("frequency baseline backs off from order 3 to the global majority") {
  const std::vector<PrefixSample> train{
      sample("X", "Y", "P"), sample("X", "Y", "Q"), sample("X", "Y", "Q"), sample("Z", "Y", "P"),
      sample("Z", "Y", "P"), sample("Z", "W", "R"), sample("M", "N", "Q"), sample("M", "N", "P"),
  };
  PredictorSpec spec;
  const auto m = train_predictor(spec, train);
  CHECK(m->predict_label(sample("X", "Y", "")) == "Q");  // order 3: Q 2, P 1
  CHECK(m->predict_label(sample("K", "Y", "")) == "P");  // order 1 on Y: P 3, Q 2
  CHECK(m->predict_label(sample("Z", "W", "")) == "R");
  CHECK(m->predict_label(sample("M", "N", "")) == "P");  // tie goes to the smaller label
  CHECK(m->predict_label(sample("K", "V", "")) == "P");  // global: P 4, Q 3, R 1

  const std::vector<PrefixSample> test{sample("X", "Y", "Q"), sample("K", "Y", "Q"), sample("K", "V", "P"),
                                       sample("Z", "W", "R")};
  CHECK(evaluate_predictor(*m, test) == 0.75);
}

TEST_CASE("frequency regressor predicts the per-activity mean") {
  const std::vector<PrefixSample> train{sample("X", "Y", "P", 1.0), sample("X", "Y", "P", 2.0),
                                        sample("X", "Y", "P", 6.0), sample("X", "W", "P", 11.0)};
  PredictorSpec spec;
  spec.task = Task::RTP;
  const auto m = train_predictor(spec, train);
  CHECK(m->predict_minutes(sample("A", "Y", "")) == 3.0);
  CHECK(m->predict_minutes(sample("A", "W", "")) == 11.0);
  CHECK(m->predict_minutes(sample("A", "unseen", "")) == 5.0);
  const std::vector<PrefixSample> test{sample("A", "Y", "", 4.0), sample("A", "W", "", 10.0)};
  CHECK(evaluate_predictor(*m, test) == 1.0);
}

TEST_CASE("deterministic chain is learned perfectly") {
  const EventLog log = testsupport::chain_log({"A", "B", "C"}, 40, 10.0);
  const RoleMap roles = derive_roles(log);
  const auto samples = extract_prefix_samples(log, roles);
  for (Architecture arch : kArchitectures) {
    CAPTURE(to_string(arch));
    PredictorSpec spec;
    spec.architecture = arch;
    spec.seed = 3;
    spec.mlp = quick_mlp();
    spec.task = Task::NAP;
    CHECK(evaluate_predictor(*train_predictor(spec, samples), samples) == 1.0);
    spec.task = Task::NRP;
    CHECK(evaluate_predictor(*train_predictor(spec, samples), samples) == 1.0);
    spec.task = Task::NPP;
    const auto npp = train_predictor(spec, samples);
    if (arch == Architecture::FreqBaseline) {
      CHECK(npp->predict_minutes(samples[0]) == 10.0);
      CHECK(evaluate_predictor(*npp, samples) == 0.0);
    } else {
      CHECK(npp->predict_minutes(samples[0]) == doctest::Approx(10.0).epsilon(0.05));
    }
  }
}

TEST_CASE("MLP training is deterministic for a fixed seed") {
  const EventLog log = generate_reference_log(6, 60);
  const RoleMap roles = derive_roles(log);
  const auto samples = extract_prefix_samples(log, roles);
  PredictorSpec spec;
  spec.architecture = Architecture::Mlp;
  spec.mlp.epochs = 5;
  spec.seed = 11;
  for (Task task : {Task::NAP, Task::RTP}) {
    spec.task = task;
    const auto a = train_predictor(spec, samples);
    const auto b = train_predictor(spec, samples);
    for (const auto& s : samples) {
      if (is_classification(task)) {
        CHECK(a->predict_label(s) == b->predict_label(s));
      } else {
        CHECK(a->predict_minutes(s) == b->predict_minutes(s));
      }
    }
  }
}

TEST_CASE("property: remaining time covers the next wait and processing time") {
  const EventLog log = generate_reference_log(9, 200);
  for (const auto& s : extract_prefix_samples(log, derive_roles(log))) {
    CHECK(s.rtp_minutes >= 0.0);
    if (s.npp_minutes) {
      CHECK(*s.nwp_minutes >= 0.0);
      CHECK(s.rtp_minutes >= *s.npp_minutes + *s.nwp_minutes - 1e-9);
    }
  }
}

TEST_CASE("property: the frequency baseline ignores training sample order") {
  const EventLog log = generate_reference_log(10, 80);
  auto samples = extract_prefix_samples(log, derive_roles(log));
  const auto test = samples;
  std::mt19937_64 rng(1);
  for (Task task : kTasks) {
    PredictorSpec spec;
    spec.task = task;
    const double before = evaluate_predictor(*train_predictor(spec, samples), test);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(samples.begin(), samples.end(), rng);
      CHECK(evaluate_predictor(*train_predictor(spec, samples), test) == before);
    }
  }
}

TEST_CASE("metric_vector averages the architectures per task") {
  const EventLog log = generate_reference_log(13, 80);
  const TemporalSplit split = temporal_split(log, 0.75);
  const RoleMap roles = derive_roles(split.train);
  MlpHyperparameters mlp;
  mlp.epochs = 3;
  const TaskMetricVector m = metric_vector(split.train, split.test, roles, 5, mlp);
  for (Task task : kTasks) {
    const auto t = task_index(task);
    CHECK(m[task] == (m.per_architecture[0][t] + m.per_architecture[1][t]) / 2.0);
    CHECK(m[task] >= 0.0);
    if (is_classification(task)) CHECK(m[task] <= 1.0);
  }
  CHECK(metric_vector(split.train, split.test, roles, 5, mlp) == m);
}

TEST_CASE("error cases") {
  CHECK_THROWS_AS(extract_prefix_samples(EventLog{}, RoleMap{}), Error);
  const std::vector<PrefixSample> ends{sample("X", "Y", kEndLabel)};
  PredictorSpec spec;
  spec.task = Task::NRP;
  try {
    train_predictor(spec, ends);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoDefinedTargets);
  }
  spec.task = Task::RTP;
  const auto m = train_predictor(spec, ends);
  spec.task = Task::NWP;
  const std::vector<PrefixSample> waits{[] {
    auto s = sample("X", "Y", "Z");
    s.nwp_minutes = 1.0;
    return s;
  }()};
  const auto w = train_predictor(spec, waits);
  try {
    evaluate_predictor(*w, ends);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyTestSet);
  }
  CHECK(evaluate_predictor(*m, ends) == 0.0);
}

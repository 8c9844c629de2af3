#include <gtest/gtest.h>

#include "frap/assignment.hpp"
#include "frap/rta.hpp"
#include "frap/taskgen.hpp"
#include "support.hpp"

namespace frap {
namespace {

using testing::us;

Task make_task(std::string id, Priority p, ProcessorIndex m, std::int64_t wcet_us, std::int64_t period_us,
               std::map<ResourceIndex, std::int64_t> req = {}) {
  Task t;
  t.id = std::move(id);
  t.pure_wcet = us(wcet_us);
  t.period = t.deadline = us(period_us);
  t.priority = p;
  t.processor = m;
  t.requests = std::move(req);
  return t;
}

TEST(Preset, MsrpAndPwlpOnWorkedExample) {
  const auto f = testing::table3();
  const System& s = f.system;
  const auto msrp = preset(s, Preset::msrp);
  const auto pwlp = preset(s, Preset::pwlp);
  for (TaskIndex i = 0; i < s.tasks().size(); ++i) {
    for (const auto& [k, n] : s.task(i).requests) {
      EXPECT_EQ(msrp.at(i, k), 4);
      EXPECT_EQ(pwlp.at(i, k), s.task(i).priority);
    }
  }
  EXPECT_TRUE(validate(s, msrp).empty());
  EXPECT_TRUE(validate(s, pwlp).empty());
}

TEST(Preset, FrapInitialFollowsFrequencyTest) {
  GenConfig c;
  c.seed = 3;
  const System s = generate(c).system;
  const auto init = preset(s, Preset::frap_initial);
  for (TaskIndex i = 0; i < s.tasks().size(); ++i)
    for (const auto& [k, n] : s.task(i).requests)
      EXPECT_EQ(init.at(i, k), local_rate_dominates(s, i, k) ? s.task(i).priority : s.max_priority());
}

TEST(LocalRateDominates, LocalOnlyResourceHolds) {
  const System s(2, {make_task("a", 2, 0, 1, 1000, {{0, 1}}), make_task("b", 1, 0, 1, 1000, {{0, 4}})},
                 {Resource{"r", us(5)}});
  EXPECT_TRUE(local_rate_dominates(s, 0, 0));
  EXPECT_TRUE(local_rate_dominates(s, 1, 0));
}

TEST(LocalRateDominates, FrequentLocalRequesterHolds) {
  const System s(2, {make_task("a", 1, 0, 1, 100, {{0, 5}}), make_task("b", 1, 1, 1, 10000, {{0, 1}})},
                 {Resource{"r", us(5)}});
  // 5/100 >= 1/10000 + 1/100
  EXPECT_TRUE(local_rate_dominates(s, 0, 0));
}

TEST(LocalRateDominates, BusyRemoteRequesterFails) {
  const System s(2, {make_task("a", 1, 0, 1, 1000, {{0, 1}}), make_task("b", 1, 1, 1, 1000, {{0, 3}})},
                 {Resource{"r", us(5)}});
  // 1/T < 3/T + 3/T
  EXPECT_FALSE(local_rate_dominates(s, 0, 0));
}

// a, b on processor 0 and c on processor 1 share r (c = 10 µs).
System psi_fixture() {
  return System(2,
                {make_task("a", 2, 0, 10, 1000, {{0, 2}}), make_task("b", 1, 0, 10, 2000, {{0, 1}}),
                 make_task("c", 1, 1, 10, 400, {{0, 1}})},
                {Resource{"r", us(10)}});
}

TEST(Psi, HandComputedTerms) {
  // Rates in 1/µs; Ψ = (ẽ c + w̃ c + b̃ c) T.
  // a: local 2/1000, remote 1/400 + 1/1000 = 7/2000, ẽ = 4/2000, no hp tasks.
  //   PWLP: b spins below a, b̃ = 1/1000.            Ψ = (0.02 + 0.01) 1000 = 30
  //   MSRP: b̃ = 1/1000 + min(1/1000, 3/2000).       Ψ = (0.02 + 0.02) 1000 = 40
  // b: local 1/2000 + 2/1000 = 5/2000, remote 1/400 + 1/2000 = 6/2000.
  //   PWLP: a preempts spinning at 1, w̃ = min(1/1000, 1/2000). Ψ = (0.025 + 0.005) 2000 = 60
  //   MSRP: nothing preempts spinning at 2.         Ψ = 0.025 * 2000 = 50
  const System s = psi_fixture();
  const FrequencyModel model(s);
  const auto pwlp = preset(s, Preset::pwlp);
  const auto msrp = preset(s, Preset::msrp);
  EXPECT_EQ(psi(model, pwlp, 0), Rate(30000));
  EXPECT_EQ(psi(model, msrp, 0), Rate(40000));
  EXPECT_EQ(psi(model, pwlp, 1), Rate(60000));
  EXPECT_EQ(psi(model, msrp, 1), Rate(50000));
  EXPECT_EQ(psi(model, pwlp, 2), psi(model, msrp, 2));  // alone on its processor
}

TEST(Psi, IndividualRates) {
  const System s = psi_fixture();
  const FrequencyModel model(s);
  const auto pwlp = preset(s, Preset::pwlp);
  EXPECT_EQ(model.local_rate(1, 0), Rate(5, 2'000'000));
  EXPECT_EQ(model.remote_rate(1, 1, 0), Rate(6, 2'000'000));
  EXPECT_EQ(model.preemption_rate(pwlp, 1, 0), Rate(1, 1'000'000));
  EXPECT_EQ(model.additional_rate(pwlp, 1, 0), Rate(1, 2'000'000));
  EXPECT_EQ(model.arrival_rate(pwlp, 0, 0), Rate(1, 1'000'000));
}

TEST(Psi, ZeroWithoutSharedResources) {
  const System s(2, {make_task("a", 2, 0, 10, 1000), make_task("b", 1, 0, 10, 2000)}, {});
  const FrequencyModel model(s);
  EXPECT_EQ(psi(model, SpinAssignment(2), 0), Rate(0));
  EXPECT_EQ(psi(model, SpinAssignment(2), 1), Rate(0));
}

TEST(Psi, MsrpHasNoAdditionalRate) {
  GenConfig c;
  c.seed = 11;
  const System s = generate(c).system;
  const FrequencyModel model(s);
  const auto msrp = preset(s, Preset::msrp);
  for (TaskIndex i = 0; i < s.tasks().size(); ++i)
    for (ResourceIndex k = 0; k < s.resources().size(); ++k) EXPECT_EQ(model.additional_rate(msrp, i, k), Rate(0));
}

TEST(Slack, Formula) {
  const System lone(1, {make_task("a", 1, 0, 30, 100)}, {});
  EXPECT_EQ(slack(lone, 0), us(70));
  const System pair(1, {make_task("hi", 2, 0, 10, 50), make_task("lo", 1, 0, 30, 100)}, {});
  EXPECT_EQ(slack(pair, 1), us(100 - 30 - 2 * 10));
  const System crowded(1, {make_task("hi", 2, 0, 40, 50), make_task("lo", 1, 0, 30, 100)}, {});
  EXPECT_EQ(slack(crowded, 1), Duration{});
}

TEST(Maxk, SingleAndTiedCandidates) {
  // Two global resources with equal critical sections and equal use.
  const System s(2,
                 {make_task("hi", 2, 0, 10, 1000), make_task("lo", 1, 0, 10, 1000, {{0, 1}, {1, 1}}),
                  make_task("far", 1, 1, 10, 1000, {{0, 1}, {1, 1}})},
                 {Resource{"r1", us(5)}, Resource{"r2", us(5)}});
  const FrequencyModel model(s);
  EXPECT_EQ(maxk_arrival(model, preset(s, Preset::msrp), 0), ResourceIndex{0});
  EXPECT_FALSE(maxk_arrival(model, preset(s, Preset::msrp), 1).has_value());

  const System single(2,
                      {make_task("hi", 2, 0, 10, 1000), make_task("lo", 1, 0, 10, 1000, {{1, 1}}),
                       make_task("far", 1, 1, 10, 1000, {{1, 1}})},
                      {Resource{"r1", us(50)}, Resource{"r2", us(5)}});
  EXPECT_EQ(maxk_arrival(FrequencyModel(single), preset(single, Preset::msrp), 0), ResourceIndex{1});
}

TEST(Maxk, LongerCriticalSectionWinsAtEqualFrequency) {
  const System s(2,
                 {make_task("hi", 2, 0, 10, 1000), make_task("lo", 1, 0, 10, 1000, {{0, 1}, {1, 1}}),
                  make_task("far", 1, 1, 10, 1000, {{0, 1}, {1, 1}})},
                 {Resource{"short", us(5)}, Resource{"long", us(9)}});
  EXPECT_EQ(maxk_arrival(FrequencyModel(s), preset(s, Preset::msrp), 0), ResourceIndex{1});
}

TEST(Assign, UnloadedSystemKeepsInitialisation) {
  const System s(2,
                 {make_task("hi", 2, 0, 1, 10000), make_task("lo", 1, 0, 1, 10000, {{0, 1}}),
                  make_task("far", 1, 1, 1, 10000, {{0, 3}})},
                 {Resource{"r", us(5)}});
  EXPECT_EQ(assign(s), preset(s, Preset::frap_initial));
}

TEST(Assign, OverloadedTopLowersGlobalResource) {
  // top has 10 µs of slack; the busy remote requester keeps a and b at P̂ initially.
  const System s(2,
                 {make_task("top", 3, 0, 80, 100, {{0, 1}}), make_task("a", 2, 0, 10, 100000, {{0, 1}}),
                  make_task("b", 1, 0, 10, 100000, {{0, 1}}), make_task("far", 1, 1, 10, 100, {{0, 5}})},
                 {Resource{"r", us(10)}});
  const auto init = preset(s, Preset::frap_initial);
  ASSERT_EQ(init.at(1, 0), 3);
  ASSERT_EQ(init.at(2, 0), 3);
  const auto result = assign(s);
  EXPECT_EQ(result.at(1, 0), 2);
  EXPECT_LE(result.at(2, 0), 2);
  EXPECT_TRUE(validate(s, result).empty());
}

TEST(Assign, LocalDominantResourceStopsSearch) {
  // lo shares a long local resource with top and a short global one with far.
  const System s(2,
                 {make_task("top", 2, 0, 40, 100, {{0, 1}}), make_task("lo", 1, 0, 10, 100000, {{0, 1}, {1, 1}}),
                  make_task("far", 1, 1, 10, 100, {{1, 5}})},
                 {Resource{"local", us(50)}, Resource{"global", us(1)}});
  const auto init = preset(s, Preset::frap_initial);
  ASSERT_EQ(init.at(1, 1), 2);
  const FrequencyModel model(s);
  ASSERT_EQ(maxk_arrival(model, init, 0), ResourceIndex{0});
  EXPECT_EQ(assign(s), init);
}

TEST(Assign, ResultsAreValidAndNeverRaiseInitialisation) {
  GenConfig c;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    c.seed = seed;
    const System s = generate(c).system;
    const auto init = preset(s, Preset::frap_initial);
    for (AssignMode mode : {AssignMode::approx, AssignMode::exact}) {
      if (mode == AssignMode::exact && seed > 5) continue;
      const auto result = assign(s, mode);
      EXPECT_TRUE(validate(s, result).empty()) << "seed " << seed;
      for (TaskIndex i = 0; i < s.tasks().size(); ++i)
        for (const auto& [k, p] : result.of(i)) EXPECT_LE(p, init.at(i, k));
    }
  }
}

}  // namespace
}  // namespace frap

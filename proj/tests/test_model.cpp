#include <gtest/gtest.h>

#include "frap/model.hpp"
#include "support.hpp"

namespace frap {
namespace {

using testing::table3;
using testing::us;

Task make_task(std::string id, Priority p, ProcessorIndex m, std::map<ResourceIndex, std::int64_t> req = {}) {
  Task t;
  t.id = std::move(id);
  t.pure_wcet = us(10);
  t.period = us(1000);
  t.deadline = us(1000);
  t.priority = p;
  t.processor = m;
  t.requests = std::move(req);
  return t;
}

bool mentions(const std::vector<std::string>& lines, const std::string& needle) {
  for (const auto& l : lines)
    if (l.find(needle) != std::string::npos) return true;
  return false;
}

TEST(Model, WorkedExampleIsValid) {
  const auto f = table3();
  EXPECT_TRUE(validate(f.system).empty());
  ASSERT_TRUE(f.spin_priorities.has_value());
  EXPECT_TRUE(validate(f.system, *f.spin_priorities).empty());
}

TEST(Model, LocalRelations) {
  const auto f = table3();
  const System& s = f.system;
  const auto t = [&](const char* id) { return s.task_index(id); };
  EXPECT_EQ(s.lhp(t("t2")), (std::vector<TaskIndex>{t("t4"), t("t3")}));
  EXPECT_EQ(s.llp(t("t2")), (std::vector<TaskIndex>{t("t1")}));
  EXPECT_TRUE(s.lhp(t("t4")).empty());
  EXPECT_TRUE(s.lhp(t("t5")).empty());
  EXPECT_EQ(s.tasks_on(0), (std::vector<TaskIndex>{t("t4"), t("t3"), t("t2"), t("t1")}));
  EXPECT_EQ(s.max_priority(), 4);
}

TEST(Model, CeilingAndScope) {
  const auto f = table3();
  const System& s = f.system;
  const auto r = [&](const char* id) { return s.resource_index(id); };
  EXPECT_EQ(s.ceiling(r("r1"), 0), 4);
  EXPECT_EQ(s.ceiling(r("r2"), 0), 2);
  EXPECT_EQ(s.ceiling(r("r3"), 1), 1);
  for (ResourceIndex k = 0; k < 3; ++k) EXPECT_TRUE(s.is_global(k));
}

TEST(Model, TotalWcetAddsCriticalSections) {
  const auto f = table3();
  EXPECT_EQ(f.system.total_wcet(f.system.task_index("t2")), us(28));
  EXPECT_EQ(f.system.total_wcet(f.system.task_index("t6")), us(10 + 3 * 7 + 3 * 6 + 3 * 5));
}

TEST(Model, LocalOnlyResourceIsNotGlobal) {
  System s(2, {make_task("a", 2, 0, {{0, 1}}), make_task("b", 1, 0, {{0, 2}}), make_task("c", 1, 1)},
           {Resource{"r", us(5)}});
  EXPECT_FALSE(s.is_global(0));
  EXPECT_EQ(s.ceiling(0, 0), 2);
  EXPECT_FALSE(s.ceiling(0, 1).has_value());
}

TEST(Model, UnknownIdsThrow) {
  const auto f = table3();
  EXPECT_THROW(f.system.task_index("nope"), std::out_of_range);
  EXPECT_FALSE(f.system.find_resource("r9").has_value());
}

TEST(Validate, SharedPriorityOnOneProcessor) {
  System s(1, {make_task("a", 1, 0), make_task("b", 1, 0)}, {});
  const auto v = validate(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(mentions(v, "a") && mentions(v, "b"));
}

TEST(Validate, RejectsBrokenTimingAndRequests) {
  Task late = make_task("late", 2, 0);
  late.deadline = us(2000);
  Task negative = make_task("neg", 3, 0, {{0, 1}});
  negative.pure_wcet = Duration(-1);
  Task zero_req = make_task("zero", 4, 0, {{0, 0}});
  Task bad_proc = make_task("far", 5, 7);
  System s(1, {late, negative, zero_req, bad_proc}, {Resource{"r", Duration(0)}});
  const auto v = validate(s);
  EXPECT_TRUE(mentions(v, "late"));
  EXPECT_TRUE(mentions(v, "neg"));
  EXPECT_TRUE(mentions(v, "zero"));
  EXPECT_TRUE(mentions(v, "far"));
  EXPECT_TRUE(mentions(v, "r"));
  EXPECT_GE(v.size(), 5u);
}

TEST(Validate, RejectsDuplicateIds) {
  System s(1, {make_task("a", 1, 0), make_task("a", 2, 0)}, {});
  EXPECT_TRUE(mentions(validate(s), "a"));
}

TEST(Validate, SpinPriorityBounds) {
  auto f = table3();
  const System& s = f.system;
  SpinAssignment a = *f.spin_priorities;
  a.set(s.task_index("t2"), s.resource_index("r1"), 1);  // below base priority 2
  EXPECT_FALSE(validate(s, a).empty());
  a = *f.spin_priorities;
  a.set(s.task_index("t2"), s.resource_index("r1"), 5);  // above P̂
  EXPECT_FALSE(validate(s, a).empty());
  a = *f.spin_priorities;
  a.set(s.task_index("t3"), s.resource_index("r1"), 3);  // t3 does not request r1
  EXPECT_FALSE(validate(s, a).empty());
  SpinAssignment missing(s.tasks().size());
  EXPECT_FALSE(validate(s, missing).empty());
}

TEST(Io, RejectsUnknownAndMissingKeys) {
  auto doc = nlohmann::json::parse(R"({"processors":1,"time_unit":"ns","resources":[],"tasks":[],"extra":1})");
  EXPECT_THROW(parse_system(doc), FormatError);
  doc.erase("extra");
  doc.erase("processors");
  EXPECT_THROW(parse_system(doc), FormatError);
}

TEST(Io, RejectsOtherTimeUnitsAndUndeclaredResources) {
  auto doc = nlohmann::json::parse(R"({"processors":1,"time_unit":"us","resources":[],"tasks":[]})");
  EXPECT_THROW(parse_system(doc), FormatError);
  doc["time_unit"] = "ns";
  doc["tasks"].push_back({{"id", "a"}, {"wcet_pure", 1}, {"period", 10}, {"deadline", 10},
                          {"priority", 1}, {"processor", 0}, {"requests", {{"r9", 1}}}});
  EXPECT_THROW(parse_system(doc), FormatError);
}

TEST(Io, SerializedSystemParsesBack) {
  const auto f = table3();
  const auto doc = to_json(f.system, &*f.spin_priorities);
  const auto again = parse_system(doc);
  EXPECT_EQ(to_json(again.system, &*again.spin_priorities), doc);
  EXPECT_EQ(*again.spin_priorities, *f.spin_priorities);
}

TEST(Io, MissingFileIsFormatError) { EXPECT_THROW(load_system("/nonexistent/system.json"), FormatError); }

}  // namespace
}  // namespace frap

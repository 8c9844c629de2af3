#include "frap/io.hpp"

#include <fstream>
#include <set>

namespace frap {
namespace {

using nlohmann::json;

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.contains(key)) throw FormatError(where + ": unknown key '" + key + "'");
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
  return *it;
}

std::int64_t integer(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) throw FormatError(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw FormatError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

SystemFile parse_system(const json& doc) {
  only_keys(doc, {"processors", "time_unit", "tasks", "resources", "spin_priorities"}, "system");
  const auto processors = integer(doc, "processors", "system");
  if (processors < 0) throw FormatError("system: 'processors' must be non-negative");
  if (text(doc, "time_unit", "system") != "ns") throw FormatError("system: 'time_unit' must be \"ns\"");

  const json& res = require(doc, "resources", "system");
  if (!res.is_array()) throw FormatError("system: 'resources' must be an array");
  std::vector<Resource> resources;
  std::map<std::string, ResourceIndex> resource_ids;
  for (const auto& r : res) {
    only_keys(r, {"id", "cs_len"}, "resource");
    const auto id = text(r, "id", "resource");
    resource_ids.emplace(id, resources.size());
    resources.push_back(Resource{id, Duration(integer(r, "cs_len", "resource " + id))});
  }

  const json& tsk = require(doc, "tasks", "system");
  if (!tsk.is_array()) throw FormatError("system: 'tasks' must be an array");
  std::vector<Task> tasks;
  for (const auto& t : tsk) {
    only_keys(t, {"id", "wcet_pure", "period", "deadline", "priority", "processor", "requests"}, "task");
    Task task;
    task.id = text(t, "id", "task");
    const std::string where = "task " + task.id;
    task.pure_wcet = Duration(integer(t, "wcet_pure", where));
    task.period = Duration(integer(t, "period", where));
    task.deadline = Duration(integer(t, "deadline", where));
    task.priority = static_cast<Priority>(integer(t, "priority", where));
    const auto proc = integer(t, "processor", where);
    if (proc < 0) throw FormatError(where + ": 'processor' must be non-negative");
    task.processor = static_cast<ProcessorIndex>(proc);
    const json& req = require(t, "requests", where);
    if (!req.is_object()) throw FormatError(where + ": 'requests' must be an object");
    for (const auto& [rid, count] : req.items()) {
      auto it = resource_ids.find(rid);
      if (it == resource_ids.end()) throw FormatError(where + ": requests undeclared resource '" + rid + "'");
      if (!count.is_number_integer()) throw FormatError(where + ": request count must be an integer");
      task.requests[it->second] = count.get<std::int64_t>();
    }
    tasks.push_back(std::move(task));
  }

  SystemFile out{System(static_cast<std::size_t>(processors), std::move(tasks), std::move(resources)), std::nullopt};

  if (auto sp = doc.find("spin_priorities"); sp != doc.end()) {
    if (!sp->is_object()) throw FormatError("spin_priorities: expected an object");
    SpinAssignment a(out.system.tasks().size());
    for (const auto& [tid, per] : sp->items()) {
      auto i = out.system.find_task(tid);
      if (!i) throw FormatError("spin_priorities: unknown task '" + tid + "'");
      if (!per.is_object()) throw FormatError("spin_priorities." + tid + ": expected an object");
      for (const auto& [rid, p] : per.items()) {
        auto k = out.system.find_resource(rid);
        if (!k) throw FormatError("spin_priorities." + tid + ": unknown resource '" + rid + "'");
        if (!p.is_number_integer()) throw FormatError("spin_priorities." + tid + "." + rid + ": must be an integer");
        a.set(*i, *k, p.get<Priority>());
      }
    }
    out.spin_priorities = std::move(a);
  }
  return out;
}

SystemFile load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return parse_system(doc);
}

json spin_priorities_json(const System& system, const SpinAssignment& assignment) {
  json out = json::object();
  for (TaskIndex i = 0; i < system.tasks().size() && i < assignment.task_count(); ++i) {
    if (assignment.of(i).empty()) continue;
    json per = json::object();
    for (const auto& [k, p] : assignment.of(i)) per[system.resource(k).id] = p;
    out[system.task(i).id] = std::move(per);
  }
  return out;
}

json to_json(const System& system, const SpinAssignment* spin_priorities) {
  json doc;
  doc["processors"] = system.processor_count();
  doc["time_unit"] = "ns";
  json resources = json::array();
  for (const auto& r : system.resources()) resources.push_back({{"id", r.id}, {"cs_len", r.cs_len.ns()}});
  json tasks = json::array();
  for (const auto& t : system.tasks()) {
    json req = json::object();
    for (const auto& [k, n] : t.requests) req[system.resource(k).id] = n;
    tasks.push_back({{"id", t.id},
                     {"wcet_pure", t.pure_wcet.ns()},
                     {"period", t.period.ns()},
                     {"deadline", t.deadline.ns()},
                     {"priority", t.priority},
                     {"processor", t.processor},
                     {"requests", std::move(req)}});
  }
  doc["tasks"] = std::move(tasks);
  doc["resources"] = std::move(resources);
  if (spin_priorities) doc["spin_priorities"] = spin_priorities_json(system, *spin_priorities);
  return doc;
}

json to_json(const System& system, const AnalysisReport& report) {
  json tasks = json::array();
  for (TaskIndex i = 0; i < report.tasks.size(); ++i) {
    const auto& r = report.tasks[i];
    tasks.push_back({{"id", system.task(i).id},
                     {"response", r.response.ns()},
                     {"spin_delay", r.spin_delay.ns()},
                     {"blocking", r.blocking.ns()},
                     {"interference", r.interference.ns()},
                     {"total_wcet", r.total_wcet.ns()},
                     {"deadline", system.task(i).deadline.ns()},
                     {"schedulable", r.schedulable},
                     {"converged", r.converged}});
  }
  return {{"time_unit", "ns"},
          {"verdict", report.verdict},
          {"diverged", report.diverged},
          {"iterations", report.iterations},
          {"elapsed_ms", report.elapsed.count()},
          {"tasks", std::move(tasks)}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace frap

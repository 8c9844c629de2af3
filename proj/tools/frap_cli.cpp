#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "frap/assignment.hpp"
#include "frap/experiment.hpp"
#include "frap/io.hpp"
#include "frap/rta.hpp"
#include "frap/taskgen.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kIoError = 2;

std::atomic<bool> g_interrupted{false};

struct GenFlags {
  frap::GenConfig config;
  double cs_lo_us = 1;
  double cs_hi_us = 100;

  void attach(CLI::App* cmd) {
    cmd->add_option("-M,--processors", config.processors, "Processor count")->capture_default_str();
    cmd->add_option("-N,--tasks-per-proc", config.tasks_per_proc, "Tasks per processor")->capture_default_str();
    cmd->add_option("-A,--accesses-max", config.accesses_max, "Maximum requests per resource")->capture_default_str();
    cmd->add_option("--cs-lo", cs_lo_us, "Shortest critical section (us)")->capture_default_str();
    cmd->add_option("--cs-hi", cs_hi_us, "Longest critical section (us)")->capture_default_str();
    cmd->add_option("--rsf", config.rsf, "Fraction of tasks using resources")->capture_default_str();
    cmd->add_option("-K,--resources", config.resource_count, "Resource count")->capture_default_str();
    cmd->add_option("--util-factor", config.util_factor, "Average utilization per task")->capture_default_str();
  }

  frap::GenConfig resolve() const {
    frap::GenConfig c = config;
    c.cs_lo = frap::Duration(std::llround(cs_lo_us * 1000.0));
    c.cs_hi = frap::Duration(std::llround(cs_hi_us * 1000.0));
    return c;
  }
};

void emit_json(const std::string& out, const nlohmann::json& doc) {
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    frap::write_json(out, doc);
  }
}

bool report_violations(const std::vector<std::string>& violations) {
  for (const auto& v : violations) std::cerr << "invalid: " << v << '\n';
  return violations.empty();
}

frap::SpinAssignment spin_priorities(const frap::SystemFile& file, frap::Protocol protocol, frap::AssignMode mode) {
  if (protocol == frap::Protocol::frap && file.spin_priorities) return *file.spin_priorities;
  return frap::spin_priorities_for(file.system, protocol, mode);
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument("bad value '" + item + "'");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-lock response time analysis with flexible spin priorities"};
  app.require_subcommand(1);

  const std::map<std::string, frap::Protocol> protocols{
      {"frap", frap::Protocol::frap}, {"msrp", frap::Protocol::msrp}, {"pwlp", frap::Protocol::pwlp}};
  const std::map<std::string, frap::AssignMode> modes{{"approx", frap::AssignMode::approx},
                                                      {"exact", frap::AssignMode::exact}};

  std::string input;
  std::string out;
  std::uint64_t seed = 1;
  frap::Protocol protocol = frap::Protocol::frap;
  frap::AssignMode mode = frap::AssignMode::approx;

  auto* gen = app.add_subcommand("generate", "Generate a random system");
  GenFlags gen_flags;
  gen_flags.attach(gen);
  gen->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out, "Output file (default stdout)");

  auto* val = app.add_subcommand("validate", "Check a system file");
  val->add_option("system", input, "System JSON")->required();

  auto* ana = app.add_subcommand("analyze", "Response time analysis of a system");
  ana->add_option("system", input, "System JSON")->required();
  ana->add_option("--protocol", protocol, "Spin priorities to analyse with")
      ->transform(CLI::CheckedTransformer(protocols, CLI::ignore_case));
  ana->add_option("--mode", mode, "Assignment mode when computing frap priorities")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  ana->add_option("--out", out, "Report file (default stdout)");

  auto* asg = app.add_subcommand("assign", "Compute spin priorities and embed them in the system");
  asg->add_option("system", input, "System JSON")->required();
  asg->add_option("--mode", mode, "Overload test")->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  asg->add_option("--out", out, "Output file (default stdout)");

  auto* exp = app.add_subcommand("experiment", "Schedulability sweep, CSV output");
  GenFlags exp_flags;
  exp_flags.attach(exp);
  std::string vary = "N";
  std::string values;
  std::size_t systems = 200;
  std::size_t workers = 0;
  std::vector<frap::Protocol> exp_protocols;
  exp->add_option("--vary", vary, "Swept parameter")->check(CLI::IsMember({"N", "M", "A", "L", "rsf", "K"}));
  exp->add_option("--values", values, "Comma-separated sweep values")->required();
  exp->add_option("--systems", systems, "Systems per point")->capture_default_str();
  exp->add_option("--protocol", exp_protocols, "Protocols (repeatable, default all)")
      ->transform(CLI::CheckedTransformer(protocols, CLI::ignore_case));
  exp->add_option("--mode", mode, "Assignment mode for frap")->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  exp->add_option("--seed", seed, "Experiment seed")->capture_default_str();
  exp->add_option("--workers", workers, "Worker threads (0: all cores)");
  exp->add_option("--out", out, "CSV file (default stdout)");

  auto* ora = app.add_subcommand("oracle-check", "Compare the flow bound with exhaustive search");
  std::size_t count = 1000;
  std::size_t max_items = 12;
  std::string dump = "oracle_counterexample.txt";
  bool inject_fault = false;
  ora->add_option("--count", count, "Random cases")->capture_default_str();
  ora->add_option("--max-items", max_items, "Items per case")->capture_default_str()->check(
      CLI::Range(std::size_t{0}, frap::kBruteForceItemLimit));
  ora->add_option("--seed", seed, "Case seed")->capture_default_str();
  ora->add_option("--dump", dump, "Counterexample file")->capture_default_str();
  ora->add_flag("--inject-fault", inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  try {
    if (*gen) {
      const frap::GenConfig config = [&] {
        auto c = gen_flags.resolve();
        c.seed = seed;
        return c;
      }();
      if (!report_violations(frap::validate(config))) return kInvalid;
      if (!frap::within_reference_bounds(config)) std::cerr << "warning: configuration outside reference ranges\n";
      emit_json(out, frap::to_json(frap::generate(config).system));
      return kOk;
    }

    if (*val) {
      const auto file = frap::load_system(input);
      auto violations = frap::validate(file.system);
      if (violations.empty() && file.spin_priorities) violations = frap::validate(file.system, *file.spin_priorities);
      if (!report_violations(violations)) return kInvalid;
      std::cout << "valid\n";
      return kOk;
    }

    if (*ana) {
      const auto file = frap::load_system(input);
      if (!report_violations(frap::validate(file.system))) return kInvalid;
      const auto assignment = spin_priorities(file, protocol, mode);
      if (!report_violations(frap::validate(file.system, assignment))) return kInvalid;
      const auto report = frap::analyze(file.system, assignment);
      auto doc = frap::to_json(file.system, report);
      doc["protocol"] = frap::to_string(protocol);
      emit_json(out, doc);
      return kOk;
    }

    if (*asg) {
      const auto file = frap::load_system(input);
      if (!report_violations(frap::validate(file.system))) return kInvalid;
      const auto assignment = frap::assign(file.system, mode);
      emit_json(out, frap::to_json(file.system, &assignment));
      return kOk;
    }

    if (*exp) {
      frap::ExperimentSpec spec;
      spec.param = *frap::parse_sweep_param(vary);
      try {
        spec.values = parse_values(values);
      } catch (const std::exception& e) {
        std::cerr << "invalid: --values: " << e.what() << '\n';
        return kInvalid;
      }
      spec.baseline = exp_flags.resolve();
      spec.systems_per_point = systems;
      if (!exp_protocols.empty()) spec.protocols = exp_protocols;
      spec.seed = seed;
      spec.mode = mode;
      spec.workers = workers;
      if (!report_violations(frap::validate(spec))) return kInvalid;

      std::ofstream file;
      if (!out.empty()) {
        file.open(out);
        if (!file) throw frap::FormatError("cannot write " + out);
      }
      std::ostream& csv = out.empty() ? std::cout : file;
      csv << frap::csv_header() << std::endl;
      std::signal(SIGINT, [](int) { g_interrupted = true; });
      frap::run_experiment(spec, [&](const frap::ResultRow& row) { csv << frap::csv_row(row) << std::endl; },
                           &g_interrupted);
      if (g_interrupted) std::cerr << "interrupted: partial results written\n";
      return kOk;
    }

    if (*ora) {
      frap::BwSolver solver;
      if (inject_fault) {
        solver = [](const frap::BlockingCandidates& c, const frap::PreemptionCounts& nop) {
          return frap::flow_bw(c, nop) + frap::Duration(1);
        };
      }
      const auto tally = frap::run_oracle_check(count, max_items, seed, solver, dump);
      std::cout << tally.equal << '/' << tally.total << " equal\n";
      if (tally.first_failure) {
        std::cout << "first counterexample (case " << *tally.first_failure << ") written to " << dump << '\n';
        return kInvalid;
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}

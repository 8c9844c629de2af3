#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "frap/model.hpp"
#include "frap/rta.hpp"

namespace frap {

/// Malformed or unreadable system file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemFile {
  System system;
  std::optional<SpinAssignment> spin_priorities;
};

/// Parse the JSON system format. Unknown keys, missing keys, wrong types and
/// references to undeclared resources raise FormatError. Model invariants are
/// not checked here; see validate().
SystemFile parse_system(const nlohmann::json& doc);
SystemFile load_system(const std::filesystem::path& path);

nlohmann::json to_json(const System& system, const SpinAssignment* spin_priorities = nullptr);
nlohmann::json spin_priorities_json(const System& system, const SpinAssignment& assignment);
nlohmann::json to_json(const System& system, const AnalysisReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace frap

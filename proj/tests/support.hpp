#pragma once

#include <string>

#include "frap/io.hpp"

namespace frap::testing {

inline std::string data_path(const std::string& name) { return std::string(FRAP_TEST_DATA) + "/" + name; }

inline SystemFile table3() { return load_system(data_path("table3.json")); }

inline Duration us(std::int64_t v) { return Duration::from_us(v); }

}  // namespace frap::testing

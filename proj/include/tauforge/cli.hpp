#pragma once

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tauforge::cli {

inline constexpr int kSchemaVersion = 1;

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Indented "key: value" rendering of a report.
std::string render_text(const nlohmann::json& report);

}  // namespace tauforge::cli

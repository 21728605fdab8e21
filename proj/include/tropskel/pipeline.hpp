#pragma once

#include "tropskel/config.hpp"
#include "tropskel/report.hpp"

#include <string>
#include <vector>

namespace tropskel {

const std::vector<std::string>& subcommands();

// Runs one subcommand, writes report.json (and plots when enabled) into
// out_dir and returns the report. Module errors are rethrown with the stage name.
RunReport run_command(const std::string& command, const RunConfig& config, const std::string& out_dir);

}  // namespace tropskel

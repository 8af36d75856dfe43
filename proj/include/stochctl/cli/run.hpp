#pragma once

#include "stochctl/cli/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace stochctl::cli {

const std::vector<std::string>& subcommands();

struct RunResult {
    std::string csv;
    /// (suffix replacing the output extension, contents), e.g. (".drift.csv", ...)
    std::vector<std::pair<std::string, std::string>> extra_files;
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<std::string> console;
    int exit_code = 0;
};

/// Runs a subcommand in process. Library exceptions propagate. Progress lines
/// (oracle-check verdicts) also go to `log` as they appear.
RunResult execute(const std::string& subcommand, const Config& config, std::ostream* log = nullptr);

/// Full command line driver: parses, runs, writes CSV, extra files and the
/// JSON summary, and maps failures to exit codes (2 input, 3 numerical).
int main_entry(int argc, char** argv);

} // namespace stochctl::cli

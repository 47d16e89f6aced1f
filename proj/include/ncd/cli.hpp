#ifndef NCD_CLI_HPP
#define NCD_CLI_HPP

#include <map>
#include <string>
#include <vector>

namespace ncd {

/// Fully resolved run description: the command plus every config key with
/// defaults filled in. `values` only ever holds keys the command declares.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> values;

    const std::string& at(const std::string& key) const;
    double real(const std::string& key) const;
    std::size_t count(const std::string& key) const;

    /// Sorted "key = value" lines; written to the output directory so a run
    /// can be reproduced byte-for-byte.
    std::string resolved_text() const;
};

/// Loads the optional flat key-value config file, applies "key=value"
/// overrides (overrides win), validates every key against the command's
/// declared keys (unknown keys and type mismatches are named), fills
/// defaults, and checks that referenced files exist.
RunConfig parse_config(const std::string& command, const std::string& config_path,
                       const std::vector<std::string>& overrides);

/// Executes a resolved run: writes resolved.cfg plus the command's artifacts
/// (JSON model/map, CSV trace, optional SVG) into the output directory.
/// Throws InvalidInput (exit 1) and NumericError (exit 2) on failure.
void run_command(const RunConfig& config);

/// Full command-line entry point: parses arguments, resolves the config,
/// runs the command, and maps failures to exit codes (1 = invalid input,
/// 2 = numeric error).
int run_cli(int argc, const char* const* argv);

/// One usage line per command, for --help output and the README.
std::string describe_commands();

} // namespace ncd

#endif

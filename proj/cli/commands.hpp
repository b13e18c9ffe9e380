#pragma once

// Subcommands of the ldnet tool. Each returns the process exit code:
// 0 success, 1 validation failure (a check failed or a documented limit was
// exceeded), 2 config or IO error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ldnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitConfig = 2;

struct ExperimentSpec {
  std::string command;
  std::filesystem::path configPath;
  std::filesystem::path outDir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trajectories;
  std::optional<int> horizon;
  std::vector<std::string> overrides;  // top-level key=value, value parsed as JSON when possible
};

int cmdRateOfConsensus(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmdRateBounds(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmdSimulate(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmdSocialLearning(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);
int cmdEnvelopeDump(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// Dispatches on spec.command.
int runCommand(const ExperimentSpec& spec, std::ostream& out, std::ostream& err);

/// Column reference printed by --help.
std::string csvColumnHelp();

}  // namespace ldnet::cli

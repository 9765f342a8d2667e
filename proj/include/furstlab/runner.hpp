#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace furstlab::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitThreshold = 2;

// Flat key=value settings; keys are the long flag names without dashes.
class RunConfig {
 public:
  // Throws Error(InvalidArgument) for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  // key=value lines, '#' comments, blank lines ignored. Unknown keys are
  // collected and reported together.
  void load_file(const std::string& path);
  void load_text(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  static const std::vector<std::string>& known_keys();

  // FNV-1a over the settings that affect results (not out or threads).
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> values_;
};

struct RunOutput {
  int exit_code = kExitOk;
  std::string summary;  // human readable, includes wall time
  std::string csv;      // CSV written when no output path is set
};

// Validates the config, executes the subcommand and writes artifacts.
// Validation failures produce exit code 1 with the message in summary.
RunOutput run(const RunConfig& cfg);

}  // namespace furstlab::cli

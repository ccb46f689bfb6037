#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace layertext {

/// External executable standing in for a heavy model. The stage appends its
/// protocol flags (e.g. `--image a.png --mask m.png --out o.png`) to `argv`.
struct ProviderCommand {
  std::vector<std::string> argv;

  bool empty() const { return argv.empty(); }
  std::string display() const;

  /// A JSON string is split on whitespace; a JSON array is taken verbatim.
  static ProviderCommand from_json(const nlohmann::json& j);
  static ProviderCommand parse(const std::string& command_line);
};

struct ProcessResult {
  int exit_code = 0;
  std::string output;  // stdout and stderr, interleaved
};

/// Runs `argv` (PATH lookup on argv[0]) and waits. Throws ProviderLaunchFailure
/// if the program cannot be started.
ProcessResult run_process(const std::vector<std::string>& argv);

/// Runs a provider with extra protocol arguments; a non-zero exit throws
/// ProviderNonZeroExit carrying the captured output.
void invoke_provider(const ProviderCommand& cmd, const std::vector<std::string>& protocol_args);

/// Scratch directory removed on destruction. Created under $LAYERTEXT_TMPDIR
/// when set, else the system temp directory.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace layertext

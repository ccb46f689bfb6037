#include "layertext/provider.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "layertext/error.hpp"

extern char** environ;

namespace layertext {

namespace fs = std::filesystem;

std::string ProviderCommand::display() const {
  std::string s;
  for (const auto& a : argv) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

ProviderCommand ProviderCommand::parse(const std::string& command_line) {
  ProviderCommand cmd;
  std::istringstream in(command_line);
  for (std::string tok; in >> tok;) cmd.argv.push_back(tok);
  return cmd;
}

ProviderCommand ProviderCommand::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  if (j.is_array()) {
    ProviderCommand cmd;
    for (const auto& a : j) {
      if (!a.is_string()) fail(ErrorCode::InvalidScript, "provider argv entries must be strings");
      cmd.argv.push_back(a.get<std::string>());
    }
    return cmd;
  }
  fail(ErrorCode::InvalidScript, "provider command must be a string or an array of strings");
}

ProcessResult run_process(const std::vector<std::string>& argv) {
  if (argv.empty()) fail(ErrorCode::ProviderLaunchFailure, "empty provider command");

  TempDir scratch;
  const fs::path log = scratch.file("output.log");

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, cargv[0], &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    fail(ErrorCode::ProviderLaunchFailure, "cannot start '" + argv[0] + "': " + std::strerror(rc));
  }

  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) fail(ErrorCode::ProviderLaunchFailure, "waitpid failed for '" + argv[0] + "'");
  }

  ProcessResult result;
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  } else {
    result.exit_code = -1;
  }
  std::ifstream in(log, std::ios::binary);
  result.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return result;
}

void invoke_provider(const ProviderCommand& cmd, const std::vector<std::string>& protocol_args) {
  std::vector<std::string> argv = cmd.argv;
  argv.insert(argv.end(), protocol_args.begin(), protocol_args.end());
  const ProcessResult r = run_process(argv);
  if (r.exit_code != 0) {
    fail(ErrorCode::ProviderNonZeroExit,
         "'" + cmd.display() + "' exited with status " + std::to_string(r.exit_code) + ": " + r.output);
  }
}

// ---------------------------------------------------------------------------

TempDir::TempDir() {
  fs::path base;
  if (const char* env = std::getenv("LAYERTEXT_TMPDIR"); env && *env) {
    base = env;
  } else {
    base = fs::temp_directory_path();
  }
  std::error_code ec;
  fs::create_directories(base, ec);
  std::string templ = (base / "layertext-XXXXXX").string();
  if (!mkdtemp(templ.data())) {
    fail(ErrorCode::IoError, "cannot create temporary directory under " + base.string());
  }
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace layertext

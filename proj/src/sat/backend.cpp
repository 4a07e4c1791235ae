#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "obfus/dimacs.hpp"
#include "obfus/error.hpp"
#include "obfus/sat.hpp"

namespace obfus {

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& suffix) {
    auto dir = std::filesystem::temp_directory_path();
    std::string pattern = (dir / ("obfus_XXXXXX" + suffix)).string();
    int fd = mkstemps(pattern.data(), static_cast<int>(suffix.size()));
    if (fd < 0) throw SolverError("cannot create a temporary file in " + dir.string());
    ::close(fd);
    path_ = pattern;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace_all(std::string s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

}  // namespace

ExternalBackend::ExternalBackend(ExternalSolverConfig config) : config_(std::move(config)) {
  if (config_.argv.empty()) throw ConfigError("external solver command is empty");
}

std::string ExternalBackend::name() const { return "external:" + config_.argv.front(); }

SatOutcome ExternalBackend::solve(const CnfFormula& cnf, std::span<const Lit> assumptions,
                                  const SolveLimits& limits) {
  CnfFormula full = cnf;
  for (Lit a : assumptions) full.add({a});

  TempFile cnf_file(".cnf");
  TempFile model_file(".out");
  TempFile stdout_file(".log");
  {
    std::ofstream out(cnf_file.path(), std::ios::binary);
    out << emit_dimacs(full);
    if (!out) throw SolverError("cannot write " + cnf_file.path());
  }

  bool model_from_file = false;
  std::vector<std::string> args;
  for (const auto& a : config_.argv) {
    if (a.find("{model}") != std::string::npos) model_from_file = true;
    args.push_back(replace_all(replace_all(a, "{cnf}", cnf_file.path()), "{model}", model_file.path()));
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) throw SolverError("fork failed");
  if (pid == 0) {
    int fd = ::open(stdout_file.path().c_str(), O_WRONLY | O_TRUNC);
    if (fd >= 0) {
      ::dup2(fd, STDOUT_FILENO);
      ::close(fd);
    }
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }

  int status = 0;
  for (;;) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw SolverError("waitpid failed for external solver");
    bool stop = (limits.abort && limits.abort->load()) ||
                (limits.deadline && std::chrono::steady_clock::now() >= *limits.deadline);
    if (stop) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      return SatOutcome{SatStatus::Aborted, {}, {}};
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (!WIFEXITED(status)) throw SolverError("external solver terminated abnormally");
  const int code = WEXITSTATUS(status);
  if (code == 127) throw SolverError("cannot execute external solver '" + config_.argv.front() + "'");

  SatOutcome out;
  if (code == config_.unsat_exit_code) {
    out.status = SatStatus::Unsat;
    return out;
  }
  if (code != config_.sat_exit_code) {
    throw SolverError("external solver exited with unexpected status " + std::to_string(code));
  }
  DimacsModel m = parse_dimacs_model(read_file(model_from_file ? model_file.path() : stdout_file.path()));
  if (m.status == DimacsModel::Status::Unsat) {
    throw SolverError("external solver exit code says sat but its output says unsat");
  }
  out.status = SatStatus::Sat;
  out.model.assign(static_cast<std::size_t>(cnf.var_count) + 1, false);
  for (auto [var, value] : m.values) {
    if (var >= 1 && var <= cnf.var_count) out.model[static_cast<std::size_t>(var)] = value;
  }
  if (!full.satisfied_by(out.model)) throw SolverError("external solver model violates a clause");
  return out;
}

}  // namespace obfus

#include "lyapguard/prover.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

extern char** environ;

namespace lyapguard {
namespace {

class TempProblem {
 public:
  explicit TempProblem(const std::string& text) {
    std::string pattern = (std::filesystem::temp_directory_path() / "lyapguard-XXXXXX.p").string();
    const int fd = ::mkstemps(pattern.data(), 2);
    if (fd < 0) throw Error(std::string("cannot create problem file: ") + std::strerror(errno));
    path_ = pattern;
    std::size_t written = 0;
    while (written < text.size()) {
      const ssize_t n = ::write(fd, text.data() + written, text.size() - written);
      if (n < 0) {
        if (errno == EINTR) continue;
        ::close(fd);
        throw Error(std::string("cannot write problem file: ") + std::strerror(errno));
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempProblem() { std::filesystem::remove(path_); }
  TempProblem(const TempProblem&) = delete;
  TempProblem& operator=(const TempProblem&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

bool executable(const std::string& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

std::string_view to_string(SzsStatus status) {
  switch (status) {
    case SzsStatus::Theorem: return "Theorem";
    case SzsStatus::CounterSatisfiable: return "CounterSatisfiable";
    case SzsStatus::GaveUp: return "GaveUp";
    case SzsStatus::Timeout: return "Timeout";
    case SzsStatus::Error: return "Error";
  }
  return "Error";
}

std::optional<std::string> find_szs_word(std::string_view output) {
  constexpr std::string_view key = "SZS status";
  std::size_t start = 0;
  while (start <= output.size()) {
    std::size_t end = output.find('\n', start);
    if (end == std::string_view::npos) end = output.size();
    const std::string_view line = output.substr(start, end - start);
    const std::size_t at = line.find(key);
    if (at != std::string_view::npos) {
      std::size_t i = at + key.size();
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && std::isalnum(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) return std::string(line.substr(i, j - i));
    }
    start = end + 1;
  }
  return std::nullopt;
}

SzsStatus parse_szs_status(std::string_view output) {
  const auto word = find_szs_word(output);
  if (!word) return SzsStatus::Error;
  if (*word == "Theorem") return SzsStatus::Theorem;
  if (*word == "CounterSatisfiable") return SzsStatus::CounterSatisfiable;
  if (*word == "GaveUp") return SzsStatus::GaveUp;
  if (*word == "Timeout") return SzsStatus::Timeout;
  return SzsStatus::Error;
}

std::string resolve_prover(const std::string& path) {
  if (path.empty()) throw ProverUnavailable("no prover configured");
  if (path.find('/') != std::string::npos) {
    if (!executable(path)) throw ProverUnavailable("prover not executable: " + path);
    return path;
  }
  const char* env = std::getenv("PATH");
  std::string_view dirs = env ? env : "";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    if (end == std::string_view::npos) end = dirs.size();
    const std::string dir(dirs.substr(start, end - start));
    const std::string candidate = (std::filesystem::path(dir.empty() ? "." : dir) / path).string();
    if (executable(candidate)) return candidate;
    start = end + 1;
  }
  throw ProverUnavailable("prover not found on PATH: " + path);
}

SzsResult run_prover(const std::string& prover, const FofConjecture& conj,
                     const ProverOptions& options) {
  if (!(options.timeout_s > 0.0) || !std::isfinite(options.timeout_s)) {
    throw InvalidArgument("prover timeout must be > 0");
  }
  const std::string binary = resolve_prover(prover);
  TempProblem problem(render(conj));

  std::vector<std::string> args{binary};
  args.insert(args.end(), options.extra_args.begin(), options.extra_args.end());
  args.push_back(problem.path());
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw Error(std::string("pipe failed: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDERR_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

  const auto started = std::chrono::steady_clock::now();
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, binary.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw ProverUnavailable("cannot start prover " + binary + ": " + std::strerror(rc));
  }

  SzsResult result;
  const auto deadline =
      started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(options.timeout_s));
  bool timed_out = false;
  char buf[4096];
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    pollfd pfd{fds[0], POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(std::max<long long>(1, left.count())));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (ready == 0) continue;
    const ssize_t n = ::read(fds[0], buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;  // writer closed: child exited (or closed its output)
    result.raw.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);

  int wstatus = 0;
  if (timed_out) {
    ::kill(pid, SIGKILL);
    ::waitpid(pid, &wstatus, 0);
  } else {
    // Output closed; wait for exit but still honour the deadline.
    while (true) {
      const pid_t w = ::waitpid(pid, &wstatus, WNOHANG);
      if (w == pid) break;
      if (w < 0 && errno != EINTR) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        timed_out = true;
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &wstatus, 0);
        break;
      }
      ::usleep(1000);
    }
  }
  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  result.exit_status = (!timed_out && WIFEXITED(wstatus)) ? WEXITSTATUS(wstatus) : -1;
  result.status = timed_out ? SzsStatus::Timeout : parse_szs_status(result.raw);
  return result;
}

}  // namespace lyapguard

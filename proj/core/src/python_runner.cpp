#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include "explainloop/exec_sandbox.hpp"

namespace explainloop {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// argv[1] = scratch dir, argv[2] = candidate source, argv[3] = assertion.
constexpr const char* kGuard = R"PY(
import os, sys
_scratch = os.path.realpath(sys.argv[1])
_source = sys.argv[2] + "\n" + sys.argv[3] + "\n"
del sys.argv[1:]
_WRITE_FLAGS = os.O_WRONLY | os.O_RDWR | os.O_CREAT | os.O_APPEND | os.O_TRUNC
_DENIED = {
    "subprocess.Popen", "os.system", "os.fork", "os.forkpty", "os.kill", "os.killpg",
    "os.chdir", "pty.spawn", "socket.__new__", "socket.connect", "socket.bind",
    "socket.sendto", "socket.getaddrinfo", "ctypes.dlopen", "ctypes.dlsym",
}
_DENIED_PREFIXES = ("os.exec", "os.spawn", "os.posix_spawn")
_PATH_EVENTS = {
    "os.remove", "os.rename", "os.rmdir", "os.mkdir", "os.chmod", "os.chown",
    "os.truncate", "os.link", "os.symlink", "os.utime", "shutil.rmtree",
    "os.setxattr", "os.removexattr",
}

def _inside(path):
    if isinstance(path, int):
        return True
    try:
        path = os.fsdecode(os.fspath(path))
        real = os.path.realpath(os.path.join(_scratch, path))
    except Exception:
        return False
    return real == _scratch or real.startswith(_scratch + os.sep)

def _hook(event, args):
    if event in _DENIED or event.startswith(_DENIED_PREFIXES):
        raise PermissionError("sandbox: " + event + " is not permitted")
    if event == "open":
        path, mode, flags = (tuple(args) + (None, None, None))[:3]
        writes = (isinstance(mode, str) and any(c in mode for c in "wax+")) or \
                 (isinstance(flags, int) and flags & _WRITE_FLAGS)
        if writes and not _inside(path):
            raise PermissionError("sandbox: write outside the scratch directory: " + str(path))
    elif event in _PATH_EVENTS:
        for arg in args[:2]:
            if isinstance(arg, (str, bytes, os.PathLike)) and not _inside(arg):
                raise PermissionError("sandbox: " + event + " outside the scratch directory")

sys.addaudithook(_hook)
_code = compile(_source, "<candidate>", "exec")
try:
    exec(_code, {"__name__": "__candidate__", "__builtins__": __builtins__})
except SystemExit:
    sys.stderr.write("SystemExit: the program exited before its assertion ran\n")
    sys.stderr.flush()
    os._exit(1)
)PY";

constexpr std::size_t kStderrCap = 64 * 1024;
constexpr std::size_t kExcerptCap = 2000;
constexpr rlim_t kAddressSpaceBytes = rlim_t(1) << 30;
constexpr rlim_t kFileSizeBytes = rlim_t(16) << 20;

struct CaseRun {
  bool passed = false;
  bool timed_out = false;
  bool setup_failed = false;
  std::string stderr_text;
};

void set_limit(int resource, rlim_t value) {
  struct rlimit rl{value, value};
  setrlimit(resource, &rl);
}

std::string resolve_executable(const std::string& name) {
  if (name.find('/') != std::string::npos) return access(name.c_str(), X_OK) == 0 ? name : "";
  const char* path = std::getenv("PATH");
  std::string dirs = path ? path : "/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    std::size_t end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    std::string candidate = dirs.substr(start, end - start);
    if (!candidate.empty()) {
      candidate += "/" + name;
      if (access(candidate.c_str(), X_OK) == 0) return candidate;
    }
    start = end + 1;
  }
  return "";
}

// Runs between fork and exec: no allocation, only async-signal-safe calls.
[[noreturn]] void child_exec(const char* executable, const char* scratch, char* const* argv,
                             char* const* envp, int stderr_fd, int errno_fd, rlim_t cpu_seconds) {
  setpgid(0, 0);
  int devnull = open("/dev/null", O_RDWR);
  if (devnull >= 0) {
    dup2(devnull, STDIN_FILENO);
    dup2(devnull, STDOUT_FILENO);
  }
  dup2(stderr_fd, STDERR_FILENO);
  if (chdir(scratch) != 0) _exit(126);
  set_limit(RLIMIT_CPU, cpu_seconds);
  set_limit(RLIMIT_AS, kAddressSpaceBytes);
  set_limit(RLIMIT_FSIZE, kFileSizeBytes);
  set_limit(RLIMIT_CORE, 0);
  execve(executable, argv, envp);
  int err = errno;
  (void)!write(errno_fd, &err, sizeof err);
  _exit(127);
}

CaseRun run_case(const std::string& python, std::string_view code, const std::string& assertion,
                 int limit_ms) {
  CaseRun run;
  std::string executable = resolve_executable(python);
  if (executable.empty()) {
    run.setup_failed = true;
    run.stderr_text = "python interpreter not found: " + python;
    return run;
  }
  char tmpl[] = "/tmp/explainloop-scratch-XXXXXX";
  if (!mkdtemp(tmpl)) {
    run.setup_failed = true;
    run.stderr_text = std::string("cannot create scratch directory: ") + std::strerror(errno);
    return run;
  }
  fs::path scratch = tmpl;

  int err_pipe[2];
  int exec_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0 || pipe2(exec_pipe, O_CLOEXEC) != 0) {
    run.setup_failed = true;
    run.stderr_text = "cannot create pipes";
    std::error_code ec;
    fs::remove_all(scratch, ec);
    return run;
  }

  std::vector<std::string> args = {python, "-I", "-B", "-c", kGuard, scratch.string(),
                                   std::string(code), assertion};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  const char* path = std::getenv("PATH");
  std::string path_env = std::string("PATH=") + (path ? path : "/usr/bin:/bin");
  std::string lang_env = "LANG=C.UTF-8";
  std::string home_env = "HOME=" + scratch.string();
  char* envp[] = {path_env.data(), lang_env.data(), home_env.data(), nullptr};
  std::string scratch_str = scratch.string();
  auto cpu_seconds = static_cast<rlim_t>(limit_ms / 1000 + 2);

  pid_t pid = fork();
  if (pid == 0) {
    close(err_pipe[0]);
    close(exec_pipe[0]);
    child_exec(executable.c_str(), scratch_str.c_str(), argv.data(), envp, err_pipe[1],
               exec_pipe[1], cpu_seconds);
  }
  close(err_pipe[1]);
  close(exec_pipe[1]);
  if (pid < 0) {
    close(err_pipe[0]);
    close(exec_pipe[0]);
    run.setup_failed = true;
    run.stderr_text = "fork failed";
    std::error_code ec;
    fs::remove_all(scratch, ec);
    return run;
  }
  setpgid(pid, pid);

  auto deadline = Clock::now() + std::chrono::milliseconds(limit_ms);
  char buf[4096];
  bool open_stream = true;
  while (open_stream) {
    auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remaining <= 0) {
      run.timed_out = true;
      break;
    }
    struct pollfd pfd{err_pipe[0], POLLIN, 0};
    int ready = poll(&pfd, 1, static_cast<int>(remaining));
    if (ready < 0 && errno == EINTR) continue;
    if (ready == 0) {
      run.timed_out = true;
      break;
    }
    ssize_t n = read(err_pipe[0], buf, sizeof buf);
    if (n <= 0) {
      open_stream = false;
    } else if (run.stderr_text.size() < kStderrCap) {
      run.stderr_text.append(buf, static_cast<std::size_t>(n));
    }
  }

  int status = 0;
  if (run.timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
  } else {
    // stderr closed; the interpreter is exiting. Still honor the deadline.
    while (true) {
      pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (Clock::now() >= deadline) {
        run.timed_out = true;
        kill(-pid, SIGKILL);
        waitpid(pid, &status, 0);
        break;
      }
      usleep(2000);
    }
  }
  close(err_pipe[0]);

  int exec_errno = 0;
  if (read(exec_pipe[0], &exec_errno, sizeof exec_errno) == sizeof exec_errno) {
    run.setup_failed = true;
    run.stderr_text = "cannot start interpreter '" + python + "': " + std::strerror(exec_errno);
  }
  close(exec_pipe[0]);

  if (!run.timed_out && !run.setup_failed && WIFSIGNALED(status) &&
      WTERMSIG(status) == SIGXCPU) {
    run.timed_out = true;
  }
  run.passed = !run.timed_out && !run.setup_failed && WIFEXITED(status) &&
               WEXITSTATUS(status) == 0;
  if (!run.passed && !run.timed_out && WIFSIGNALED(status) && run.stderr_text.empty()) {
    run.stderr_text = std::string("killed by signal ") + strsignal(WTERMSIG(status));
  }

  std::error_code ec;
  fs::remove_all(scratch, ec);
  return run;
}

std::string last_line(const std::string& text) {
  std::size_t end = text.find_last_not_of(" \t\r\n");
  if (end == std::string::npos) return {};
  std::size_t start = text.rfind('\n', end);
  start = start == std::string::npos ? 0 : start + 1;
  return text.substr(start, end - start + 1);
}

std::string tail_excerpt(const std::string& text) {
  if (text.size() <= kExcerptCap) return text;
  return text.substr(text.size() - kExcerptCap);
}

}  // namespace

ExecutionOutcome Sandbox::run_python(std::string_view code, const std::vector<std::string>& cases,
                                     int per_case_limit_ms) const {
  ExecutionOutcome out;
  auto started = Clock::now();
  if (cases.empty()) {
    out.status = ExecStatus::SetupError;
    out.stderr_excerpt = "no test cases";
    return out;
  }

  bool all_passed = true;
  bool all_failures_timeouts = true;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CaseRun run;
    {
      slots_.acquire();
      run = run_case(config_.python_path, code, cases[i], per_case_limit_ms);
      slots_.release();
    }
    if (run.setup_failed) {
      out.status = ExecStatus::SetupError;
      out.stderr_excerpt = run.stderr_text;
      out.case_results.clear();
      out.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started)
                        .count();
      return out;
    }
    CaseResult result;
    result.index = i;
    result.passed = run.passed;
    if (run.timed_out) {
      result.detail = "timeout";
    } else if (!run.passed) {
      result.detail = last_line(run.stderr_text);
      if (result.detail.empty()) result.detail = "failed";
      all_failures_timeouts = false;
    }
    if (!run.passed) {
      all_passed = false;
      if (out.stderr_excerpt.empty()) {
        out.stderr_excerpt = run.timed_out ? "timeout" : tail_excerpt(run.stderr_text);
      }
    }
    out.case_results.push_back(std::move(result));
  }

  if (all_passed) out.status = ExecStatus::Ok;
  else if (all_failures_timeouts) out.status = ExecStatus::Timeout;
  else out.status = ExecStatus::RuntimeError;
  out.wall_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
  return out;
}

}  // namespace explainloop

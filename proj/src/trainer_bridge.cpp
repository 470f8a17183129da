#include "nevo/trainer_bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

namespace nevo {

namespace {

using Clock = std::chrono::steady_clock;

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

bool write_all(int fd, const std::string& data) {
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    written += static_cast<std::size_t>(n);
  }
  return true;
}

std::string exit_description(int status) {
  if (WIFEXITED(status))
    return "exited with status " + std::to_string(WEXITSTATUS(status));
  if (WIFSIGNALED(status))
    return "killed by signal " + std::to_string(WTERMSIG(status));
  return "stopped";
}

}  // namespace

void TrainerBridgeConfig::validate() const {
  if (command.empty())
    throw std::invalid_argument("trainer bridge command must not be empty");
  if (request_timeout.count() <= 0)
    throw std::invalid_argument("request_timeout must be > 0");
  if (max_retries < 0)
    throw std::invalid_argument("max_retries must be >= 0");
  if (pool_size < 1)
    throw std::invalid_argument("pool_size must be >= 1");
}

TrainerBridge::TrainerBridge(TrainerBridgeConfig config) : config_(std::move(config)) {
  config_.validate();
  // Dead children turn writes into EPIPE errors instead of killing us.
  ::signal(SIGPIPE, SIG_IGN);
  workers_.resize(static_cast<std::size_t>(config_.pool_size));
}

TrainerBridge::~TrainerBridge() {
  for (Worker& w : workers_) shutdown(w);
}

void TrainerBridge::spawn(Worker& w) {
  int to_child[2], from_child[2], err_child[2];
  if (::pipe(to_child) != 0 || ::pipe(from_child) != 0 || ::pipe(err_child) != 0)
    throw EvaluatorError(std::string("pipe() failed: ") + std::strerror(errno));

  const pid_t pid = ::fork();
  if (pid < 0) throw EvaluatorError(std::string("fork() failed: ") + std::strerror(errno));

  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::dup2(err_child[1], STDERR_FILENO);
    for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1],
                   err_child[0], err_child[1]})
      ::close(fd);
    std::vector<char*> argv;
    argv.reserve(config_.command.size() + 1);
    for (const std::string& arg : config_.command)
      argv.push_back(const_cast<char*>(arg.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::dprintf(STDERR_FILENO, "exec failed for %s: %s\n", argv[0], std::strerror(errno));
    ::_exit(127);
  }

  ::close(to_child[0]);
  ::close(from_child[1]);
  ::close(err_child[1]);
  w.pid = pid;
  w.to_child = to_child[1];
  w.from_child = from_child[0];
  w.err_child = err_child[0];
  w.line_buffer.clear();
  ::fcntl(w.err_child, F_SETFL, O_NONBLOCK);
}

void TrainerBridge::shutdown(Worker& w) {
  if (w.pid < 0) return;
  ::kill(w.pid, SIGKILL);
  int status = 0;
  ::waitpid(w.pid, &status, 0);
  close_fd(w.to_child);
  close_fd(w.from_child);
  close_fd(w.err_child);
  w.pid = -1;
  w.line_buffer.clear();
}

std::string TrainerBridge::drain_stderr(Worker& w) {
  std::string tail;
  if (w.err_child < 0) return tail;
  char buf[1024];
  for (;;) {
    const ssize_t n = ::read(w.err_child, buf, sizeof(buf));
    if (n <= 0) break;
    tail.append(buf, static_cast<std::size_t>(n));
    if (tail.size() > 4096) {
      tail.erase(0, tail.size() - 4096);
      break;
    }
  }
  while (!tail.empty() && (tail.back() == '\n' || tail.back() == '\r')) tail.pop_back();
  return tail;
}

TrainerBridge::AttemptResult TrainerBridge::attempt(Worker& w, std::uint64_t id,
                                                    const std::string& request) {
  if (!write_all(w.to_child, request)) {
    int status = 0;
    ::waitpid(w.pid, &status, WNOHANG);
    AttemptResult r{AttemptStatus::ChildExit, 0.0,
                    "write to trainer failed: " + std::string(std::strerror(errno))};
    const std::string err = drain_stderr(w);
    if (!err.empty()) r.detail += "; stderr: " + err;
    return r;
  }

  const auto deadline = Clock::now() + config_.request_timeout;
  for (;;) {
    const auto newline = w.line_buffer.find('\n');
    if (newline != std::string::npos) {
      const std::string line = w.line_buffer.substr(0, newline);
      w.line_buffer.erase(0, newline + 1);

      const nlohmann::json reply = nlohmann::json::parse(line, nullptr, false);
      if (reply.is_discarded() || !reply.is_object() || !reply.contains("id") ||
          !reply["id"].is_number_unsigned())
        return {AttemptStatus::Malformed, 0.0, "unparseable response line: " + line};
      if (reply["id"].get<std::uint64_t>() != id)
        return {AttemptStatus::Malformed, 0.0, "response id mismatch: " + line};
      if (reply.contains("error"))
        return {AttemptStatus::TrainerError, 0.0,
                "trainer reported: " + reply["error"].dump()};
      if (!reply.contains("avg_loss") || !reply["avg_loss"].is_number())
        return {AttemptStatus::Malformed, 0.0, "response missing avg_loss: " + line};
      const double loss = reply["avg_loss"].get<double>();
      if (!std::isfinite(loss) || loss < 0.0)
        return {AttemptStatus::Malformed, 0.0,
                "avg_loss must be finite and >= 0, got: " + line};
      return {AttemptStatus::Ok, loss, {}};
    }

    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) return {AttemptStatus::Timeout, 0.0, "request timed out"};

    struct pollfd pfd {
      w.from_child, POLLIN, 0
    };
    const int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      return {AttemptStatus::ChildExit, 0.0,
              std::string("poll failed: ") + std::strerror(errno)};
    }
    if (rc == 0) return {AttemptStatus::Timeout, 0.0, "request timed out"};

    char buf[4096];
    const ssize_t n = ::read(w.from_child, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      return {AttemptStatus::ChildExit, 0.0,
              std::string("read failed: ") + std::strerror(errno)};
    }
    if (n == 0) {
      int status = 0;
      ::waitpid(w.pid, &status, 0);
      AttemptResult r{AttemptStatus::ChildExit, 0.0, "trainer " + exit_description(status)};
      const std::string err = drain_stderr(w);
      if (!err.empty()) r.detail += "; stderr: " + err;
      close_fd(w.to_child);
      close_fd(w.from_child);
      close_fd(w.err_child);
      w.pid = -1;
      return r;
    }
    w.line_buffer.append(buf, static_cast<std::size_t>(n));
  }
}

double TrainerBridge::evaluate(const ArchitecturePlan& plan, int epochs) {
  std::lock_guard<std::mutex> lock(mutex_);
  Worker& w = workers_[next_worker_];
  next_worker_ = (next_worker_ + 1) % workers_.size();

  std::string last_detail;
  for (int attempt_index = 0; attempt_index <= config_.max_retries; ++attempt_index) {
    if (w.pid < 0) spawn(w);

    const std::uint64_t id = next_id_++;
    nlohmann::ordered_json request;
    request["id"] = id;
    request["epochs"] = epochs;
    request["plan"] = plan_to_json(plan);

    const AttemptResult result = attempt(w, id, request.dump() + "\n");
    switch (result.status) {
      case AttemptStatus::Ok:
        return result.loss;
      case AttemptStatus::Timeout:
        shutdown(w);
        last_detail = result.detail;
        break;
      case AttemptStatus::Malformed:
        last_detail = result.detail;
        break;
      case AttemptStatus::ChildExit:
        shutdown(w);  // next evaluate() gets a fresh child
        throw EvaluatorError(result.detail);
      case AttemptStatus::TrainerError:
        throw EvaluatorError(result.detail);
    }
  }
  throw EvaluatorError("trainer gave no valid response after " +
                       std::to_string(config_.max_retries + 1) +
                       " attempt(s); last failure: " + last_detail);
}

}  // namespace nevo

#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "nevo/fitness.hpp"

namespace nevo {

struct TrainerBridgeConfig {
  // argv of the trainer process; command[0] is the program.
  std::vector<std::string> command;
  std::chrono::milliseconds request_timeout{10000};
  int max_retries = 1;
  int pool_size = 1;

  void validate() const;
};

// Delegates fitness evaluation to an external trainer process. The protocol
// is line-delimited JSON over the child's stdin/stdout:
//
//   request:  {"id": <u64>, "epochs": <int>, "plan": {"block_layer_counts":
//             [..], "frozen_prefix": <int>, "se_layer_count": <int>,
//             "learning_rate": <float>, "dropout": <float>}}\n
//   response: {"id": <u64>, "avg_loss": <float>}\n
//             {"id": <u64>, "error": "<message>"}\n  on trainer failure
//
// The response id must match the request id; anything else counts as a
// malformed response. Timeouts and malformed responses are retried up to
// max_retries (the child is killed and respawned on timeout); an explicit
// error response or a child exit fails the evaluation immediately, with the
// child's stderr attached to the error.
class TrainerBridge final : public FitnessEvaluator {
 public:
  explicit TrainerBridge(TrainerBridgeConfig config);
  ~TrainerBridge() override;

  TrainerBridge(const TrainerBridge&) = delete;
  TrainerBridge& operator=(const TrainerBridge&) = delete;

  double evaluate(const ArchitecturePlan& plan, int epochs) override;
  Concurrency concurrency_capability() const override { return Concurrency::Serial; }

 private:
  struct Worker {
    int pid = -1;
    int to_child = -1;
    int from_child = -1;
    int err_child = -1;
    std::string line_buffer;
  };

  enum class AttemptStatus { Ok, Timeout, Malformed, ChildExit, TrainerError };

  struct AttemptResult {
    AttemptStatus status = AttemptStatus::Ok;
    double loss = 0.0;
    std::string detail;
  };

  void spawn(Worker& w);
  void shutdown(Worker& w);
  std::string drain_stderr(Worker& w);
  AttemptResult attempt(Worker& w, std::uint64_t id, const std::string& request);

  TrainerBridgeConfig config_;
  std::mutex mutex_;
  std::vector<Worker> workers_;
  std::size_t next_worker_ = 0;
  std::uint64_t next_id_ = 1;
};

}  // namespace nevo

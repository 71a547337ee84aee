#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gaudit/scoring.hpp"

namespace httplib {
class Server;
class Client;
}  // namespace httplib

namespace gaudit::remote {

// Name of the environment variable holding the bearer token. Credentials
// never travel through config files or CLI flags.
inline constexpr const char* kTokenEnvVar = "GAUDIT_REMOTE_TOKEN";

// HTTP wire protocol, JSON bodies throughout:
//   GET  /v1/model        -> model descriptor + kind label
//   POST /v1/score        {model_id, context, completion}
//                         -> {log_prob, token_count, tokenizer_fingerprint}
//   POST /v1/score_batch  {model_id, contexts[], completions[]}
//                         -> {log_probs[], token_counts[], tokenizer_fingerprint},
//                            arrays index-aligned with the request
// Non-2xx responses carry {error, retryable}. When the service holds a token,
// requests must send "Authorization: Bearer <token>".

// Hosts any local scorer over the wire protocol. Reads the expected bearer
// token from the environment at construction; empty disables auth.
class ScoreService {
 public:
  explicit ScoreService(std::shared_ptr<const scoring::Scorer> scorer);
  ~ScoreService();

  ScoreService(const ScoreService&) = delete;
  ScoreService& operator=(const ScoreService&) = delete;

  // Binds 127.0.0.1 on a free port, serves on a background thread, returns
  // the port once the server is accepting connections.
  int start();
  void stop();

  int port() const { return port_; }

 private:
  std::shared_ptr<const scoring::Scorer> scorer_;
  std::string token_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

// Client-side scorer speaking the wire protocol. Fetches the descriptor from
// GET /v1/model at construction, so cache keys can be formed before any score
// request. The cache-key label is "remote:" + the service's own label, which
// keeps differently configured remote scorings distinct.
class RemoteScorer : public scoring::Scorer {
 public:
  // endpoint: "http://host:port" (scheme optional). Reads the bearer token
  // from the environment.
  RemoteScorer(std::string endpoint, std::string model_id);
  ~RemoteScorer() override;

  const scoring::ModelDescriptor& descriptor() const override { return descriptor_; }
  scoring::ScorerKind kind() const override { return scoring::ScorerKind::remote; }
  std::string kind_label() const override { return kind_label_; }
  bool concurrent_safe() const override { return false; }

  scoring::ScoreOutcome score(const std::string& context,
                              const std::string& completion) const override;

  // One round trip for many probes via /v1/score_batch; outcomes are
  // index-aligned with the inputs.
  std::vector<scoring::ScoreOutcome> score_many(
      const std::vector<std::string>& contexts,
      const std::vector<std::string>& completions) const;

 private:
  std::string endpoint_;
  std::string token_;
  scoring::ModelDescriptor descriptor_;
  std::string kind_label_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<httplib::Client> client_;
};

std::shared_ptr<RemoteScorer> make_remote_scorer(std::string endpoint,
                                                 std::string model_id);

}  // namespace gaudit::remote

#include "gaudit/remote.hpp"

#include <cstdlib>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "gaudit/errors.hpp"

namespace gaudit::remote {

using nlohmann::ordered_json;

namespace {

std::string env_token() {
  const char* t = std::getenv(kTokenEnvVar);
  return t ? t : "";
}

nn::Arch arch_from_string(const std::string& name) {
  for (nn::Arch a : {nn::Arch::autoregressive, nn::Arch::masked,
                     nn::Arch::encoder_decoder})
    if (name == nn::to_string(a)) return a;
  throw BackendError("remote: unknown architecture '" + name + "'", false);
}

void write_error(httplib::Response& res, int status, const std::string& message,
                 bool retryable) {
  res.status = status;
  res.set_content(ordered_json{{"error", message}, {"retryable", retryable}}.dump(),
                  "application/json");
}

// Maps a scoring failure onto the wire: bad inputs are the caller's fault,
// backend trouble keeps its own retryable flag.
void write_exception(httplib::Response& res, const std::exception& e) {
  if (const auto* be = dynamic_cast<const BackendError*>(&e)) {
    write_error(res, 502, be->what(), be->retryable);
  } else if (dynamic_cast<const DomainError*>(&e) ||
             dynamic_cast<const TokenizationError*>(&e) ||
             dynamic_cast<const SchemaError*>(&e) ||
             dynamic_cast<const ConfigError*>(&e)) {
    write_error(res, 400, e.what(), false);
  } else {
    write_error(res, 500, e.what(), false);
  }
}

ordered_json parse_body(const std::string& body) {
  auto parsed = ordered_json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw SchemaError("remote: request body is not a JSON object");
  return parsed;
}

std::string require_string(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw SchemaError(std::string("remote: missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------------------
// service

ScoreService::ScoreService(std::shared_ptr<const scoring::Scorer> scorer)
    : scorer_(std::move(scorer)), token_(env_token()),
      server_(std::make_unique<httplib::Server>()) {
  auto authorized = [this](const httplib::Request& req, httplib::Response& res) {
    if (token_.empty()) return true;
    if (req.get_header_value("Authorization") == "Bearer " + token_) return true;
    write_error(res, 401, "unauthorized", false);
    return false;
  };

  auto check_model = [this](const ordered_json& body, httplib::Response& res) {
    const std::string id = require_string(body, "model_id");
    if (id == scorer_->descriptor().model_id) return true;
    write_error(res, 404, "unknown model '" + id + "'", false);
    return false;
  };

  server_->Get("/v1/model", [=, this](const httplib::Request& req,
                                      httplib::Response& res) {
    if (!authorized(req, res)) return;
    const auto& d = scorer_->descriptor();
    res.set_content(ordered_json{{"model_id", d.model_id},
                                 {"family", d.family},
                                 {"parameter_count", d.parameter_count},
                                 {"architecture", std::string(nn::to_string(
                                                      d.architecture))},
                                 {"tokenizer_fingerprint", d.tokenizer_fingerprint},
                                 {"kind", std::string(scoring::to_string(
                                              scorer_->kind()))},
                                 {"kind_label", scorer_->kind_label()}}
                        .dump(),
                    "application/json");
  });

  server_->Post("/v1/score", [=, this](const httplib::Request& req,
                                       httplib::Response& res) {
    if (!authorized(req, res)) return;
    try {
      const auto body = parse_body(req.body);
      if (!check_model(body, res)) return;
      const auto out = scorer_->score(require_string(body, "context"),
                                      require_string(body, "completion"));
      res.set_content(
          ordered_json{{"log_prob", out.log_prob},
                       {"token_count", out.token_count},
                       {"tokenizer_fingerprint",
                        scorer_->descriptor().tokenizer_fingerprint}}
              .dump(),
          "application/json");
    } catch (const std::exception& e) {
      write_exception(res, e);
    }
  });

  server_->Post("/v1/score_batch", [=, this](const httplib::Request& req,
                                             httplib::Response& res) {
    if (!authorized(req, res)) return;
    try {
      const auto body = parse_body(req.body);
      if (!check_model(body, res)) return;
      if (!body.contains("contexts") || !body.at("contexts").is_array() ||
          !body.contains("completions") || !body.at("completions").is_array())
        throw SchemaError("remote: score_batch needs 'contexts' and 'completions'");
      const auto& contexts = body.at("contexts");
      const auto& completions = body.at("completions");
      if (contexts.size() != completions.size())
        throw SchemaError("remote: contexts and completions differ in length");
      ordered_json log_probs = ordered_json::array();
      ordered_json token_counts = ordered_json::array();
      for (std::size_t i = 0; i < contexts.size(); ++i) {
        const auto out = scorer_->score(contexts.at(i).get<std::string>(),
                                        completions.at(i).get<std::string>());
        log_probs.push_back(out.log_prob);
        token_counts.push_back(out.token_count);
      }
      res.set_content(
          ordered_json{{"log_probs", std::move(log_probs)},
                       {"token_counts", std::move(token_counts)},
                       {"tokenizer_fingerprint",
                        scorer_->descriptor().tokenizer_fingerprint}}
              .dump(),
          "application/json");
    } catch (const std::exception& e) {
      write_exception(res, e);
    }
  });
}

ScoreService::~ScoreService() { stop(); }

int ScoreService::start() {
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw BackendError("remote: cannot bind a local port", true);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ScoreService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

// ---------------------------------------------------------------------------
// client

namespace {

std::string normalize_endpoint(std::string endpoint) {
  if (endpoint.find("://") == std::string::npos) endpoint = "http://" + endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  return endpoint;
}

httplib::Headers auth_headers(const std::string& token) {
  httplib::Headers h;
  if (!token.empty()) h.emplace("Authorization", "Bearer " + token);
  return h;
}

// Turns a transport failure or an {error, retryable} body into a BackendError.
[[noreturn]] void throw_wire_error(const std::string& endpoint,
                                   const httplib::Result& res) {
  if (!res)
    throw BackendError("remote: cannot reach " + endpoint + " (" +
                           httplib::to_string(res.error()) + ")",
                       true);
  std::string message = "status " + std::to_string(res->status);
  bool retryable = res->status >= 500;
  auto parsed = ordered_json::parse(res->body, nullptr, false);
  if (parsed.is_object() && parsed.contains("error") &&
      parsed.at("error").is_string()) {
    message = parsed.at("error").get<std::string>();
    if (parsed.contains("retryable") && parsed.at("retryable").is_boolean())
      retryable = parsed.at("retryable").get<bool>();
  }
  throw BackendError("remote: " + endpoint + ": " + message, retryable);
}

ordered_json parse_response(const std::string& endpoint, const httplib::Result& res) {
  if (!res || res->status < 200 || res->status >= 300)
    throw_wire_error(endpoint, res);
  auto parsed = ordered_json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw BackendError("remote: " + endpoint + ": malformed response body", false);
  return parsed;
}

}  // namespace

RemoteScorer::RemoteScorer(std::string endpoint, std::string model_id)
    : endpoint_(normalize_endpoint(std::move(endpoint))), token_(env_token()),
      client_(std::make_unique<httplib::Client>(endpoint_)) {
  client_->set_connection_timeout(5, 0);
  const auto res = client_->Get("/v1/model", auth_headers(token_));
  const auto body = parse_response(endpoint_, res);

  const std::string served = require_string(body, "model_id");
  if (served != model_id)
    throw BackendError("remote: " + endpoint_ + " serves '" + served +
                           "', not '" + model_id + "'",
                       false);
  descriptor_.model_id = served;
  descriptor_.family = require_string(body, "family");
  if (!body.contains("parameter_count") || !body.at("parameter_count").is_number())
    throw BackendError("remote: descriptor lacks parameter_count", false);
  descriptor_.parameter_count = body.at("parameter_count").get<std::int64_t>();
  descriptor_.architecture = arch_from_string(require_string(body, "architecture"));
  descriptor_.backend = "remote:" + endpoint_;
  descriptor_.tokenizer_fingerprint = require_string(body, "tokenizer_fingerprint");
  kind_label_ = "remote:" + require_string(body, "kind_label");
}

RemoteScorer::~RemoteScorer() = default;

scoring::ScoreOutcome RemoteScorer::score(const std::string& context,
                                          const std::string& completion) const {
  const std::string body = ordered_json{{"model_id", descriptor_.model_id},
                                        {"context", context},
                                        {"completion", completion}}
                               .dump();
  std::lock_guard lock(mutex_);
  const auto res =
      client_->Post("/v1/score", auth_headers(token_), body, "application/json");
  const auto parsed = parse_response(endpoint_, res);
  if (!parsed.contains("log_prob") || !parsed.at("log_prob").is_number() ||
      !parsed.contains("token_count") || !parsed.at("token_count").is_number())
    throw BackendError("remote: " + endpoint_ + ": malformed score response", false);
  if (require_string(parsed, "tokenizer_fingerprint") !=
      descriptor_.tokenizer_fingerprint)
    throw BackendError("remote: " + endpoint_ + ": tokenizer fingerprint changed",
                       false);
  scoring::ScoreOutcome out;
  out.log_prob = parsed.at("log_prob").get<double>();
  out.token_count = parsed.at("token_count").get<long>();
  return out;
}

std::vector<scoring::ScoreOutcome> RemoteScorer::score_many(
    const std::vector<std::string>& contexts,
    const std::vector<std::string>& completions) const {
  if (contexts.size() != completions.size())
    throw LengthMismatchError("remote: contexts and completions differ in length");
  const std::string body = ordered_json{{"model_id", descriptor_.model_id},
                                        {"contexts", contexts},
                                        {"completions", completions}}
                               .dump();
  std::lock_guard lock(mutex_);
  const auto res = client_->Post("/v1/score_batch", auth_headers(token_), body,
                                 "application/json");
  const auto parsed = parse_response(endpoint_, res);
  if (!parsed.contains("log_probs") || !parsed.at("log_probs").is_array() ||
      !parsed.contains("token_counts") || !parsed.at("token_counts").is_array() ||
      parsed.at("log_probs").size() != contexts.size() ||
      parsed.at("token_counts").size() != contexts.size())
    throw BackendError("remote: " + endpoint_ + ": malformed batch response", false);
  std::vector<scoring::ScoreOutcome> out(contexts.size());
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    out[i].log_prob = parsed.at("log_probs").at(i).get<double>();
    out[i].token_count = parsed.at("token_counts").at(i).get<long>();
  }
  return out;
}

std::shared_ptr<RemoteScorer> make_remote_scorer(std::string endpoint,
                                                 std::string model_id) {
  return std::make_shared<RemoteScorer>(std::move(endpoint), std::move(model_id));
}

}  // namespace gaudit::remote

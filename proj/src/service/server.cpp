#include "karabo/service/server.hpp"

#include <httplib.h>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::service {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput:
    case ErrorCode::Schema:
    case ErrorCode::Config: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Upstream:
    case ErrorCode::Provider:
    case ErrorCode::RateLimit:
    case ErrorCode::EmptyCompletion: return 502;
    default: return 500;
  }
}

/// Parses a request body as a JSON object; an empty body counts as {}.
std::optional<nlohmann::json> body_object(const httplib::Request& req, httplib::Response& res) {
  if (text::trim(req.body).empty()) return nlohmann::json::object();
  try {
    auto j = nlohmann::json::parse(req.body);
    if (j.is_object()) return j;
    send_error(res, 400, "E_SCHEMA", "request body must be a JSON object");
  } catch (const nlohmann::json::parse_error& e) {
    send_error(res, 400, "E_SCHEMA", std::string("malformed JSON: ") + e.what());
  }
  return std::nullopt;
}

}  // namespace

Server::Server(ServiceConfig config, std::shared_ptr<llm::Gateway> gateway, dialogue::DialogueEngine::Clock clock)
    : config_(std::move(config)),
      gateway_(std::move(gateway)),
      engine_(config_.dialogue, std::move(clock)),
      store_(std::make_unique<ConversationStore>(config_.data_dir)),
      http_(std::make_unique<httplib::Server>()) {
  if (!gateway_) throw Error(ErrorCode::Config, "server needs a gateway");
  const auto threads = config_.server_threads;
  http_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  install_routes();
}

Server::~Server() { stop(); }

void Server::install_routes() {
  auto& http = *http_;

  if (!config_.cors_origin.empty()) {
    http.set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  }
  http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 404) {
      send_error(res, 404, "E_NOT_FOUND", "no such resource");
    } else {
      send_error(res, res.status, "E_HTTP", "request failed");
    }
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), e.code_name(), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "E_INTERNAL", e.what());
    } catch (...) {
      send_error(res, 500, "E_INTERNAL", "unknown error");
    }
  });

  http.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  http.Post("/api/conversations", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = body_object(req, res);
    if (!body) return;
    std::string language;
    std::string warning;
    if (body->contains("language")) {
      const auto& lang = body->at("language");
      if (!lang.is_string()) return send_error(res, 400, "E_SCHEMA", "'language' must be a string");
      language = lang.get<std::string>();
    }
    auto conv = engine_.start(language, &warning);
    if (language.empty())
      warning = "no language given; using " + conv.language_pref;
    store_->with_lock(conv.id, [&] { store_->save(conv); });
    nlohmann::json out = {{"id", conv.id}, {"greeting", conv.greeting}, {"language", conv.language_pref}};
    if (!warning.empty()) out["warning"] = warning;
    send_json(res, 200, out);
  });

  http.Post(R"(/api/conversations/([A-Za-z0-9_-]+)/messages)",
            [this](const httplib::Request& req, httplib::Response& res) {
              const std::string id = req.matches[1];
              auto body = body_object(req, res);
              if (!body) return;
              if (!body->contains("text") || !body->at("text").is_string())
                return send_error(res, 400, "E_EMPTY_INPUT", "'text' must be a non-empty string");
              const auto user_text = body->at("text").get<std::string>();

              store_->with_lock(id, [&] {
                auto conv = store_->load(id);
                if (!conv) return send_error(res, 404, "E_NOT_FOUND", "no conversation '" + id + "'");
                try {
                  auto reply = engine_.respond(*conv, user_text, *gateway_);
                  store_->save(*conv);
                  nlohmann::json out = {{"assistant_text", reply.message.text},
                                        {"message", dialogue::to_json(reply.message)}};
                  if (reply.message.safety_notice) out["safety_notice"] = *reply.message.safety_notice;
                  send_json(res, 200, out);
                } catch (const Error& e) {
                  if (e.code() == ErrorCode::Upstream) store_->save(*conv);
                  send_error(res, status_for(e.code()), e.code_name(), e.what());
                }
              });
            });

  http.Get(R"(/api/conversations/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    auto conv = store_->load(id);
    if (!conv) return send_error(res, 404, "E_NOT_FOUND", "no conversation '" + id + "'");
    send_json(res, 200, serialize_stored(*conv));
  });
}

int Server::bind(int port) {
  if (port == 0) {
    port_ = http_->bind_to_any_port(config_.host);
  } else {
    port_ = http_->bind_to_port(config_.host, port) ? port : -1;
  }
  if (port_ <= 0) throw Error(ErrorCode::Io, "cannot bind " + config_.host + ":" + std::to_string(port));
  return port_;
}

void Server::listen() {
  if (port_ <= 0) throw Error(ErrorCode::Config, "listen() before bind()");
  http_->listen_after_bind();
}

int Server::start(int port) {
  const int p = bind(port);
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return p;
}

void Server::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace karabo::service

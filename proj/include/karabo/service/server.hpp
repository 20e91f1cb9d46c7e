#pragma once

#include <memory>
#include <string>
#include <thread>

#include "karabo/dialogue/engine.hpp"
#include "karabo/llm/gateway.hpp"
#include "karabo/service/config.hpp"
#include "karabo/service/store.hpp"

namespace httplib {
class Server;
}

namespace karabo::service {

/// JSON API under /api:
///   POST /api/conversations            {language} -> {id, greeting, language, warning?}
///   POST /api/conversations/{id}/messages {text} -> {assistant_text, safety_notice?}
///   GET  /api/conversations/{id}       -> stored conversation
///   GET  /api/health                   -> {status: "ok"}
class Server {
 public:
  Server(ServiceConfig config, std::shared_ptr<llm::Gateway> gateway,
         dialogue::DialogueEngine::Clock clock = {});
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to config host and `port` (0 picks a free port) and returns the
  /// bound port. Throws E_IO when binding fails.
  int bind(int port);
  int bind() { return bind(config_.port); }

  /// Serves until stop(). Requires bind().
  void listen();

  /// bind() then listen() on a background thread; returns the port.
  int start(int port);

  void stop();

  int port() const { return port_; }
  const ConversationStore& store() const { return *store_; }

 private:
  void install_routes();

  ServiceConfig config_;
  std::shared_ptr<llm::Gateway> gateway_;
  dialogue::DialogueEngine engine_;
  std::unique_ptr<ConversationStore> store_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace karabo::service

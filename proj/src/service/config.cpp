#include "karabo/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "karabo/error.hpp"

namespace karabo::service {

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Config, "service config must be an object");
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("data_dir")) c.data_dir = j.at("data_dir").get<std::string>();
    c.cors_origin = j.value("cors_origin", c.cors_origin);
    c.server_threads = j.value("server_threads", c.server_threads);
    if (j.contains("dialogue")) {
      c.dialogue = dialogue::DialogueConfig::from_json(j.at("dialogue"));
    } else {
      c.dialogue = dialogue::DialogueConfig::from_json(j);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("service config: ") + e.what());
  }
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::Config, "port must be in 0..65535");
  if (c.server_threads == 0) throw Error(ErrorCode::Config, "server_threads must be positive");
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
}

nlohmann::json ServiceConfig::to_json() const {
  return {{"host", host},
          {"port", port},
          {"data_dir", data_dir.string()},
          {"cors_origin", cors_origin},
          {"server_threads", server_threads},
          {"dialogue", dialogue.to_json()}};
}

ServiceConfig config_from_env() {
  if (const char* p = std::getenv("KARABO_CONFIG"); p && *p) return ServiceConfig::load(p);
  return {};
}

}  // namespace karabo::service

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/dialogue/engine.hpp"

namespace karabo::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "karabo-data";
  /// Value of Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin = "*";
  std::size_t server_threads = 8;
  dialogue::DialogueConfig dialogue;

  /// Missing keys keep their defaults. The dialogue settings may sit under
  /// "dialogue" or at the top level.
  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Reads the file named by KARABO_CONFIG, or returns defaults.
ServiceConfig config_from_env();

}  // namespace karabo::service

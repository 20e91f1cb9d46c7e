#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "karabo/dialogue/conversation.hpp"

namespace karabo::service {

inline constexpr int kSchemaVersion = 1;

nlohmann::json serialize_stored(const dialogue::Conversation& c);
/// Throws E_SCHEMA on an unknown schema version or malformed document.
dialogue::Conversation parse_stored(const nlohmann::json& j);

/// One JSON document per conversation under a directory. Writes go to a
/// temporary file that is renamed into place.
class ConversationStore {
 public:
  explicit ConversationStore(std::filesystem::path dir);

  void save(const dialogue::Conversation& c);
  std::optional<dialogue::Conversation> load(const std::string& id) const;
  bool exists(const std::string& id) const;
  std::vector<std::string> list_ids() const;

  /// Runs `fn` while holding the id's lock. Calls for one id are serialized;
  /// different ids run in parallel.
  template <typename Fn>
  auto with_lock(const std::string& id, Fn&& fn) {
    auto mu = mutex_for(id);
    std::lock_guard lock(*mu);
    return fn();
  }

  const std::filesystem::path& dir() const { return dir_; }

  /// Ids are restricted to [A-Za-z0-9_-] so they can never escape the directory.
  static bool valid_id(const std::string& id);

 private:
  std::filesystem::path path_for(const std::string& id) const;
  std::shared_ptr<std::mutex> mutex_for(const std::string& id);

  std::filesystem::path dir_;
  std::mutex map_mu_;
  std::unordered_map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace karabo::service

#include "karabo/service/store.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>

#include "karabo/error.hpp"

namespace karabo::service {

nlohmann::json serialize_stored(const dialogue::Conversation& c) {
  auto j = dialogue::to_json(c);
  j["schema_version"] = kSchemaVersion;
  return j;
}

dialogue::Conversation parse_stored(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema_version"))
    throw Error(ErrorCode::Schema, "stored conversation lacks schema_version");
  const auto v = j.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw Error(ErrorCode::Schema, "unsupported schema_version " + v.dump());
  return dialogue::conversation_from_json(j);
}

ConversationStore::ConversationStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create data directory " + dir_.string() + ": " + ec.message());
}

bool ConversationStore::valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128) return false;
  for (unsigned char c : id)
    if (!(std::isalnum(c) || c == '_' || c == '-')) return false;
  return true;
}

std::filesystem::path ConversationStore::path_for(const std::string& id) const { return dir_ / (id + ".json"); }

std::shared_ptr<std::mutex> ConversationStore::mutex_for(const std::string& id) {
  std::lock_guard lock(map_mu_);
  auto& mu = locks_[id];
  if (!mu) mu = std::make_shared<std::mutex>();
  return mu;
}

void ConversationStore::save(const dialogue::Conversation& c) {
  if (!valid_id(c.id)) throw Error(ErrorCode::Schema, "invalid conversation id '" + c.id + "'");
  static std::atomic<unsigned long long> counter{0};
  const auto final_path = path_for(c.id);
  auto tmp = final_path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << serialize_stored(c).dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, final_path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot replace " + final_path.string());
  }
}

std::optional<dialogue::Conversation> ConversationStore::load(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  std::ifstream in(path_for(id), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_stored(nlohmann::json::parse(buf.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Schema, "corrupt conversation file for '" + id + "': " + e.what());
  }
}

bool ConversationStore::exists(const std::string& id) const {
  return valid_id(id) && std::filesystem::exists(path_for(id));
}

std::vector<std::string> ConversationStore::list_ids() const {
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace karabo::service

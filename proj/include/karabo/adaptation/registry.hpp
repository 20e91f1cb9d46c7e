#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace karabo::adaptation {

/// Proverbs addressed by dense 1-based indices.
class ProverbRegistry {
 public:
  ProverbRegistry() = default;

  /// Throws E_CONFIG on empty or duplicate entries.
  explicit ProverbRegistry(std::vector<std::string> entries);

  /// One proverb per line, optionally numbered "N." / "N)" / "N:" / "N<tab>".
  /// Numbers, when present, must run 1..N in order. Blank lines and lines
  /// starting with '#' are ignored.
  static ProverbRegistry from_text(std::string_view text);
  static ProverbRegistry from_json(const nlohmann::json& j);

  /// JSON array when the file starts with '[', numbered text otherwise.
  static ProverbRegistry load(const std::filesystem::path& path);

  /// The bundled 100-entry placeholder set.
  static ProverbRegistry placeholder();

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// 1-based. Throws E_RANGE outside 1..size().
  const std::string& at(std::size_t index) const;

  const std::vector<std::string>& entries() const { return entries_; }

 private:
  std::vector<std::string> entries_;
};

}  // namespace karabo::adaptation

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "karabo/corpus/corpus.hpp"
#include "karabo/dialogue/persona.hpp"

namespace karabo::dialogue {

struct FineTuneJobSpec {
  std::string base_model = "gpt-4o-mini-2024-07-18";
  int epochs = 3;
  int batch_size = 11;
  double lr_multiplier = 1.8;
  std::uint64_t seed = 2038458019;
  std::string training_file;

  nlohmann::json to_json() const;
};

/// One chat example per instance: system = rendered persona prompt, user =
/// client text, assistant = counselor text.
nlohmann::json training_example(const corpus::TurnInstance& instance, const std::string& system_prompt);

/// Writes `out_dir`/training.jsonl and `out_dir`/manifest.json and returns
/// the manifest. Throws E_EMPTY_DATASET for an empty input.
nlohmann::json export_finetune_spec(std::span<const corpus::TurnInstance> instances,
                                    const PersonaPrompt& persona, FineTuneJobSpec spec,
                                    const std::filesystem::path& out_dir);

}  // namespace karabo::dialogue

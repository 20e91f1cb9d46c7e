#include "karabo/dialogue/finetune.hpp"

#include <fstream>

#include "karabo/error.hpp"
#include "karabo/text.hpp"

namespace karabo::dialogue {

nlohmann::json FineTuneJobSpec::to_json() const {
  return {{"base_model", base_model}, {"epochs", epochs},   {"batch_size", batch_size},
          {"lr_multiplier", lr_multiplier}, {"seed", seed}, {"training_file", training_file}};
}

nlohmann::json training_example(const corpus::TurnInstance& instance, const std::string& system_prompt) {
  return {{"messages",
           {{{"role", "system"}, {"content", system_prompt}},
            {{"role", "user"}, {"content", instance.client_text}},
            {{"role", "assistant"}, {"content", instance.counselor_text}}}}};
}

nlohmann::json export_finetune_spec(std::span<const corpus::TurnInstance> instances,
                                    const PersonaPrompt& persona, FineTuneJobSpec spec,
                                    const std::filesystem::path& out_dir) {
  if (instances.empty()) throw Error(ErrorCode::EmptyDataset, "no instances to export");
  const auto system_prompt = render_system_prompt(persona);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  const auto training_path = out_dir / "training.jsonl";
  {
    std::ofstream out(training_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + training_path.string());
    for (const auto& inst : instances) out << training_example(inst, system_prompt).dump() << '\n';
    if (!out) throw Error(ErrorCode::Io, "write failed: " + training_path.string());
  }
  if (spec.training_file.empty()) spec.training_file = training_path.string();

  auto manifest = spec.to_json();
  manifest["n_examples"] = instances.size();
  manifest["system_prompt_sha256"] = text::sha256_hex(system_prompt);
  manifest["job_request"] = {{"model", spec.base_model},
                             {"training_file", spec.training_file},
                             {"seed", spec.seed},
                             {"hyperparameters",
                              {{"n_epochs", spec.epochs},
                               {"batch_size", spec.batch_size},
                               {"learning_rate_multiplier", spec.lr_multiplier}}}};

  const auto manifest_path = out_dir / "manifest.json";
  std::ofstream mout(manifest_path, std::ios::binary);
  if (!mout) throw Error(ErrorCode::Io, "cannot write " + manifest_path.string());
  mout << manifest.dump(2) << '\n';
  return manifest;
}

}  // namespace karabo::dialogue

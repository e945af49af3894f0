#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "tct/core.hpp"

namespace tct {

/// Sidecar metadata declaring what an instance file should contain. Stored
/// next to the instance with the same stem and a `.manifest` extension.
struct Manifest {
  BigInt schedules;
  std::int64_t paths = 0;
};

/// Parses an instance file. Diagnostics carry the offending line number.
ProjectNetwork load_instance(const std::filesystem::path& path);

/// Parses instance text (used by load_instance; exposed for tests).
ProjectNetwork parse_instance(const std::string& text, const std::string& origin);

/// Writes the canonical form of a network; load(save(n)) reproduces n
/// exactly and saving the same network twice is byte-identical.
void save_instance(const ProjectNetwork& network, const std::filesystem::path& path);
std::string format_instance(const ProjectNetwork& network);

std::filesystem::path manifest_path_for(const std::filesystem::path& instance_path);
std::optional<Manifest> load_manifest(const std::filesystem::path& instance_path);
void save_manifest(const ProjectNetwork& network, const std::filesystem::path& instance_path);

struct GeneratorParams {
  int n_activities = 1;
  int min_modes = 1;
  int max_modes = 1;
  double density = 0.3;  // probability of a forward precedence edge
  std::uint64_t seed = 1;
};

/// Random instance with the standard time-cost trade-off shape: per activity,
/// distinct durations whose shorter options carry strictly higher direct
/// cost. Deterministic under the seed.
ProjectNetwork generate_instance(const GeneratorParams& params);

}  // namespace tct

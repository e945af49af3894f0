#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tct/moea.hpp"
#include "tct/portfolio.hpp"

namespace tct::experiment {

/// Batch experiment description, parsed from a sectioned key/value file. The
/// config text itself is copied into the report directory for provenance, so
/// a report tree is a pure function of (config file, bundled instances).
struct Config {
  std::filesystem::path out_dir = "report";
  int trials = 50;
  double slack = 0.10;
  std::uint64_t seed_base = 1;
  int calibration_trials = 3;
  int workers = 0;  // worker threads per trial; 0 = one per allocated slot

  std::vector<std::filesystem::path> instances;
  std::vector<moea::AlgorithmId> roster;
  int processors = 2;
  std::vector<portfolio::PortfolioAssignment> assignments;  // empty = all
  moea::AlgorithmParams params;

  std::string source_text;  // verbatim config file contents

  static Config parse_file(const std::filesystem::path& path,
                           const std::filesystem::path& instance_dir = {});
  static Config parse(const std::string& text, const std::string& origin,
                      const std::filesystem::path& instance_dir = {});
  void validate() const;
};

/// Runs the full protocol: per instance a shared scalarizing frame, AQ
/// calibration, then every configured assignment for `trials` lockstep
/// portfolio runs; writes record/stats/cdf files per assignment plus the
/// AHP input and rank report at the top level. Returns 0 on success, 1 if
/// any instance section failed (the others still complete).
int run(const Config& config, std::ostream& log,
        const portfolio::PortfolioOptions& options = {});

}  // namespace tct::experiment

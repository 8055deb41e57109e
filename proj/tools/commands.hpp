#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace fdlsd::cli {

struct CommandOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    std::ostream* log = nullptr;  // progress; std::cerr when null
    std::ostream* err = nullptr;  // diagnostics; std::cerr when null
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// source.csv, target.csv and hard_ids.txt in the dataset text format.
int cmd_gen(const CommandOptions& options);

/// report.json, curves.csv, assignments.csv, model.ckpt and manifest.cfg.
int cmd_run(const CommandOptions& options);

/// One run directory per value under out_dir, then sweep.csv.
int cmd_sweep(const CommandOptions& options, const std::string& param, const std::vector<std::string>& values);

/// Trains on the corpus described by config and writes the run artifacts.
TrainingReport execute_run(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream* log);

/// Manifest text: a header naming the tool version and output directory,
/// then the full config. Loading it as a config reproduces the run.
void write_manifest(std::ostream& out, const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace fdlsd::cli

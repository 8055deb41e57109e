#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdlsd/corpus.hpp"
#include "fdlsd/trainer.hpp"

namespace fdlsd::cli {

/// Everything a run needs. corpus.seed and seed are independent so training
/// seeds can vary over one fixed corpus.
struct RunConfig {
    CorpusConfig corpus;
    ExperimentConfig trainer;
    std::size_t max_logged_ids = 200;
};

/// Flat `dotted.key=value` lines; `#` starts a comment. Unknown keys,
/// repeated keys and malformed values throw ConfigError naming the key.
/// The result is validated.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Sets one field from its textual value. Does not validate ranges.
void set_field(RunConfig& config, const std::string& key, const std::string& value);

void validate(const RunConfig& config);

/// Every key in a fixed order; parse_config(write_config(c)) == c.
void write_config(std::ostream& out, const RunConfig& config);

std::vector<std::string> config_keys();

/// Sweep parameter names mapped to their config keys; empty when the name
/// is not sweepable.
std::string sweep_key(const std::string& param);
const std::vector<std::string>& sweepable_params();

}  // namespace fdlsd::cli

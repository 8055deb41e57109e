#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>

#include "fdlsd/dataset.hpp"

namespace fdlsd {

// One sample per line: sample_id,domain,true_label,v_1,...,v_d
// Reals are written with 17 significant digits so a round trip is exact.

void write_dataset(std::ostream& out, const LabeledDataset& dataset);
LabeledDataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const LabeledDataset& dataset);
LabeledDataset load_dataset(const std::filesystem::path& path);

/// One id per line, ascending.
void save_id_set(const std::filesystem::path& path, const std::set<SampleId>& ids);
std::set<SampleId> load_id_set(const std::filesystem::path& path);

}  // namespace fdlsd

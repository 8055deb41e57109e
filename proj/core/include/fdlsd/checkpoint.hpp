#pragma once

#include <filesystem>
#include <iosfwd>

#include "fdlsd/encoder.hpp"

namespace fdlsd {

// Flat key-value text. Each tensor is two lines:
//   <branch>.<layer>.<kind>.shape <rows> <cols>
//   <branch>.<layer>.<kind> <v...>            (row-major)
// Branches are f1, f2, mean_f1, mean_f2; classifier heads use
// c1.source, c1.target, c2.source, c2.target with kinds weight and bias.
// A leading "activation relu|tanh" line records the encoder nonlinearity.

void write_checkpoint(std::ostream& out, const DualBranchModel& model);
DualBranchModel read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const DualBranchModel& model);
DualBranchModel load_checkpoint(const std::filesystem::path& path);

}  // namespace fdlsd

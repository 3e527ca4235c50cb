#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ibkit/simulation.hpp"

namespace ibkit::cli {

/// Applies a flat JSON object whose keys are ExperimentConfig field names.
/// Unknown keys and mistyped values throw std::invalid_argument.
void apply_config_json(ExperimentConfig& config, std::string_view text);

/// Defaults for `experiment`, then the file's values.
ExperimentConfig load_config(std::string_view experiment, const std::filesystem::path& file);

/// Shortest round-trip representation (up to 17 significant digits).
std::string format_number(double v);

/// "bs4bs3", or "dfib" for the divergence-free scheme.
std::string scheme_label(const ExperimentConfig& config);

/// dt-frac as it appears in file names: integral values without a decimal point.
std::string dt_label(double dt_frac);

/// Writes one CSV file. Refuses to replace an existing file unless `overwrite`.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header, bool overwrite);
  void row(std::initializer_list<double> values);
  void row_with_index(long index, std::initializer_list<double> values);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Entry point shared by the executable and the tests. Returns the exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ibkit::cli

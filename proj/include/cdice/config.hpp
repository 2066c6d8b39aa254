#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace cdice {

/// Settings shared by every subcommand. The text form is one `key = value`
/// per line; `#` starts a comment and blank lines are ignored.
struct RunConfig {
  std::string preset = "CDICE";
  int dt = 0;                 // 0: the preset's native step
  int horizon = 0;            // years; 0: the protocol default
  double rho = 0.015;
  std::string damage = "nordhaus";   // nordhaus | howard-sterner
  std::string fex = "default";       // default | none | proportional | linear
  std::string data_dir;              // empty: CDICE_DATA_DIR or the bundled fixtures
  std::string out_dir = "out";
  std::string format = "csv";        // csv | svg | both
  std::string execution = "parallel";

  bool operator==(const RunConfig&) const = default;

  void validate() const;
  bool wants_csv() const { return format == "csv" || format == "both"; }
  bool wants_svg() const { return format == "svg" || format == "both"; }
};

std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Overwrites the fields named in `values`; unknown keys are rejected.
void apply_values(RunConfig& cfg, const std::map<std::string, std::string>& values);

RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace cdice

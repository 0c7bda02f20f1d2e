#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "resforge/lattice/lattice.hpp"

namespace resforge::cli {

/// Exit codes shared by all subcommands.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kBadInput = 2,
  kNotHyperbolic = 3,
  kFitFailure = 4,
};

/// Runs `resforge <subcommand> ...` (args excludes the program name) and
/// returns the exit code. Reports go to `out`, notices and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads a JSON or TOML document (TOML when the extension is .toml).
/// Parse errors become ValidationError with line and column.
nlohmann::json load_document(const std::string& path);
nlohmann::json parse_toml(const std::string& text, const std::string& source = "<toml>");

struct SvgOptions {
  int width = 800;
  int height = 500;
  std::string title;
};

/// Scatter of (Re lambda, Im lambda) coloured by alpha, with axes and legend.
std::string render_svg(const std::vector<lattice::ResonanceRecord>& records, const SvgOptions& options = {});

}  // namespace resforge::cli

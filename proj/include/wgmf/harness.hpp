#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgmf/config.hpp"

namespace wgmf {

/// A NaN or infinity showed up in a run.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output could not be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_config = 2,
  exit_numerical = 3,
  exit_io = 4,
};

/// 0 means: WGMF_THREADS if set, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs fn(0..n-1) on a pool of `threads` workers. The first exception thrown
/// by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir, in emission order, manifest last
  nlohmann::json summary;
  bool checks_passed = true;       // only the self-test can fail this
};

/// Validates the config, runs the experiment and writes every artifact plus
/// manifest.json (SHA-256 per file). Progress goes to `log` if non-null.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

/// Maps the exception currently being handled to an exit code and writes the
/// message to `err`.
int report_exception(std::ostream& err);

}  // namespace wgmf

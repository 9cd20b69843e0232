#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgmf/dynamics.hpp"
#include "wgmf/model.hpp"
#include "wgmf/quadrature.hpp"
#include "wgmf/toy.hpp"

namespace wgmf {

/// Invalid run configuration. The message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { train, meanfield, couple, toy, euler_rate, wasserstein_selftest };

Experiment experiment_from_string(const std::string& name);
std::string to_string(Experiment e);

struct CoupleParams {
  std::vector<std::size_t> N_grid{25, 50, 100, 200};
  std::size_t seeds = 20;
  double T = 1.0;
  bool exact_d2 = false;
};

struct ToyParams {
  double g0 = 1.0;
  double omega0 = 0.5;
  double gamma_c = 1.0;
  double dt = 1e-3;
  double T = 50.0;
  bool constrained = false;
  std::optional<toy::Integrator> integrator;
  double transient = 0.0;  // sup|g| and periods are measured for t > transient
  std::size_t output_stride = 1;  // rows of trajectory.dat
  std::vector<double> contour_levels{2.1, 2.5, 3.0, 4.0, 5.0, 10.0};
};

struct EulerRateParams {
  std::vector<double> x0{0.9, 0.6};             // run with boundary contact
  std::vector<double> x0_interior{0.5, 0.0};    // circle never reaches the boundary
  std::vector<double> dts{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  double T = 3.0;
  std::size_t reference_factor = 100;
};

struct SelftestParams {
  std::size_t instances = 1000;
  std::size_t max_brute_force_n = 7;
  std::size_t dim = 2;
};

/// A complete experiment description. Every field has a default; the JSON
/// document may override any subset, and unknown keys are rejected.
struct RunConfig {
  Experiment experiment = Experiment::train;
  Dims dims{1, 1};
  std::size_t N = 100;
  std::size_t M = 100;
  std::string activation = "sigmoid";
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t snapshot_stride = 10;
  unsigned threads = 0;  // 0: environment variable WGMF_THREADS, else hardware concurrency

  SgdConfig sgd{0.5, 1, 1000, 0};
  MeanFieldConfig meanfield;
  TargetDistribution target = TargetDistribution::bimodal();
  InitDistribution init;

  CoupleParams couple;
  ToyParams toy;
  EulerRateParams euler_rate;
  SelftestParams selftest;

  /// Checks every module precondition relevant to `experiment`.
  void validate() const;
};

/// Parses and validates. Throws ConfigError naming the field on any problem.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace wgmf

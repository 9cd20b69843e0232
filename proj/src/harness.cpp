#include "wgmf/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "wgmf/dynamics.hpp"
#include "wgmf/geometry.hpp"
#include "wgmf/rate_fit.hpp"
#include "wgmf/rng.hpp"
#include "wgmf/toy.hpp"
#include "wgmf/transport.hpp"

namespace wgmf {

namespace fs = std::filesystem;
using nlohmann::json;

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("WGMF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw ConfigError("WGMF_THREADS: expected a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

namespace {

std::string to_hex(const unsigned char* data, unsigned len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw NumericalError(what + ": non-finite value");
}

/// Collects emitted files so the manifest can list them.
class Output {
 public:
  explicit Output(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = root_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("write to '" + p.string() + "' failed");
    files_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void write_manifest() {
    json entries = json::array();
    for (const auto& f : files_) entries.push_back({{"file", f}, {"sha256", sha256_file(root_ / f)}});
    write_json("manifest.json", {{"files", entries}});
  }

  const fs::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

json fit_to_json(const RateFit& f) {
  return {{"x", f.xs},           {"y", f.ys},
          {"slope", f.slope},    {"intercept", f.intercept},
          {"r_squared", f.r_squared}, {"slope_stderr", f.slope_stderr}};
}

class Progress {
 public:
  Progress(std::ostream* log, std::string label) : log_(log), label_(std::move(label)) {}
  void operator()(std::size_t done, std::size_t total) const {
    if (log_ && (done % 1000 == 0 || done == total)) {
      *log_ << label_ << ": step " << done << "/" << total << "\n";
    }
  }
  ProgressFn fn() const {
    return [this](std::size_t d, std::size_t t) { (*this)(d, t); };
  }

 private:
  std::ostream* log_;
  std::string label_;
};

std::string generator_header(const Dims& d) {
  std::string h = "t,index";
  for (int j = 0; j < d.K; ++j) {
    h += ",alpha_" + std::to_string(j);
    for (int l = 0; l < d.L; ++l) h += ",beta_" + std::to_string(j) + "_" + std::to_string(l);
    h += ",gamma_" + std::to_string(j);
  }
  return h + "\n";
}

std::string discriminator_header(const Dims& d) {
  std::string h = "t,index,a";
  for (int k = 0; k < d.K; ++k) h += ",b_" + std::to_string(k);
  return h + ",c\n";
}

void write_run_record(Output& out, const RunRecord& rec, const Dims& dims) {
  std::ostringstream traj;
  traj << "t,energy,pinned,max_alpha_growth\n";
  for (const auto& d : rec.diagnostics) {
    require_finite(d.energy, "energy at t=" + num(d.t));
    require_finite(d.max_alpha_growth, "alpha growth at t=" + num(d.t));
    traj << num(d.t) << ',' << num(d.energy) << ',' << d.pinned << ',' << num(d.max_alpha_growth) << '\n';
  }
  out.write("trajectory.csv", traj.str());

  std::ostringstream gen, disc;
  gen << generator_header(dims);
  disc << discriminator_header(dims);
  const auto& times = rec.snapshots.times();
  const auto& states = rec.snapshots.states();
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto& gs = states[s].generators();
    for (std::size_t i = 0; i < gs.size(); ++i) {
      gen << num(times[s]) << ',' << i;
      for (double v : gs[i].values()) {
        require_finite(v, "generator parameter");
        gen << ',' << num(v);
      }
      gen << '\n';
    }
    const auto& ds = states[s].discriminators();
    for (std::size_t i = 0; i < ds.size(); ++i) {
      disc << num(times[s]) << ',' << i;
      for (double v : ds[i].values()) disc << ',' << num(v);
      disc << '\n';
    }
  }
  out.write("snapshots_generator.csv", gen.str());
  out.write("snapshots_discriminator.csv", disc.str());
}

json run_summary(const RunRecord& rec) {
  json j;
  if (!rec.diagnostics.empty()) {
    const auto& first = rec.diagnostics.front();
    const auto& last = rec.diagnostics.back();
    j["t_final"] = last.t;
    j["energy_initial"] = first.energy;
    j["energy_final"] = last.energy;
    j["pinned_final"] = last.pinned;
    double growth = 0.0;
    for (const auto& d : rec.diagnostics) growth = std::max(growth, d.max_alpha_growth);
    j["max_alpha_growth"] = growth;
  }
  j["snapshots"] = rec.snapshots.size();
  return j;
}

json run_train(const RunConfig& cfg, Output& out, std::ostream* log) {
  const auto act = Activation::by_name(cfg.activation);
  const EnsemblePair initial = sample_ensemble(cfg.dims, cfg.N, cfg.M, cfg.init, cfg.seed, act);
  SgdConfig sgd = cfg.sgd;
  sgd.seed = cfg.seed;
  const Progress progress(log, "train");
  const RunRecord rec =
      run_sgd(initial, sgd, cfg.target, cfg.meanfield.quad, cfg.snapshot_stride, progress.fn());
  write_run_record(out, rec, cfg.dims);
  json s = run_summary(rec);
  s["time_step"] = sgd.time_step(cfg.N);
  s["steps"] = sgd.steps;
  return s;
}

json run_meanfield_experiment(const RunConfig& cfg, Output& out, std::ostream* log) {
  const auto act = Activation::by_name(cfg.activation);
  const EnsemblePair initial = sample_ensemble(cfg.dims, cfg.N, cfg.M, cfg.init, cfg.seed, act);
  const Progress progress(log, "meanfield");
  const RunRecord rec =
      run_meanfield(initial, cfg.meanfield, cfg.target, cfg.snapshot_stride, progress.fn());
  write_run_record(out, rec, cfg.dims);
  json s = run_summary(rec);
  s["steps"] = cfg.meanfield.steps();
  return s;
}

struct CoupleJob {
  std::size_t N;
  std::size_t seed_index;
  std::uint64_t seed;
};

json run_couple(const RunConfig& cfg, Output& out, std::ostream* log, unsigned threads) {
  const auto act = Activation::by_name(cfg.activation);
  const auto& grid = cfg.couple.N_grid;
  std::vector<CoupleJob> jobs;
  for (std::size_t N : grid) {
    for (std::size_t s = 0; s < cfg.couple.seeds; ++s) {
      jobs.push_back({N, s, derive_seed(cfg.seed, StreamPurpose::experiment, N, s)});
    }
  }
  std::vector<CoupledSeries> results(jobs.size());
  std::atomic<std::size_t> finished{0};
  std::mutex log_mu;
  parallel_for(jobs.size(), threads, [&](std::size_t k) {
    const CoupleJob& job = jobs[k];
    CoupledRunSpec spec;
    spec.dims = cfg.dims;
    spec.N = job.N;
    spec.M = job.N;
    spec.sgd = cfg.sgd;
    spec.meanfield = cfg.meanfield;
    spec.meanfield.dt = cfg.sgd.h / static_cast<double>(job.N);
    spec.meanfield.horizon = cfg.couple.T;
    spec.meanfield.gamma_c = cfg.sgd.n_c;
    spec.init = cfg.init;
    spec.target = cfg.target;
    spec.activation = act;
    spec.seed = job.seed;
    spec.exact_d2 = cfg.couple.exact_d2;
    results[k] = coupled_run(spec);
    for (double e : results[k].coupling_cost) require_finite(e, "coupling cost");
    const std::size_t done = ++finished;
    if (log) {
      std::lock_guard<std::mutex> lock(log_mu);
      *log << "couple: N=" << job.N << " seed " << job.seed_index << " done (" << done << "/"
           << jobs.size() << ")\n";
    }
  });

  const bool d2 = cfg.couple.exact_d2;
  std::ostringstream per_seed;
  per_seed << "N,seed_index,seed,e_T" << (d2 ? ",d2_sq_T" : "") << '\n';
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    per_seed << jobs[k].N << ',' << jobs[k].seed_index << ',' << jobs[k].seed << ','
             << num(results[k].coupling_cost.back());
    if (d2) per_seed << ',' << num(results[k].exact_d2_sq.back());
    per_seed << '\n';
  }

  std::ostringstream table, series;
  table << "N,mean_e_T,stderr_e_T,seeds" << (d2 ? ",mean_d2_sq_T" : "") << '\n';
  series << "N,t,mean_e\n";
  std::vector<double> xs, ys, ys_d2;
  const std::size_t S = cfg.couple.seeds;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::size_t base = g * S;
    double mean = 0.0, mean_d2 = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      mean += results[base + s].coupling_cost.back();
      if (d2) mean_d2 += results[base + s].exact_d2_sq.back();
    }
    mean /= static_cast<double>(S);
    mean_d2 /= static_cast<double>(S);
    double var = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double r = results[base + s].coupling_cost.back() - mean;
      var += r * r;
    }
    const double stderr_e = S > 1 ? std::sqrt(var / static_cast<double>(S - 1) / static_cast<double>(S)) : 0.0;
    table << grid[g] << ',' << num(mean) << ',' << num(stderr_e) << ',' << S;
    if (d2) table << ',' << num(mean_d2);
    table << '\n';
    xs.push_back(static_cast<double>(grid[g]));
    ys.push_back(mean);
    ys_d2.push_back(mean_d2);

    const auto& times = results[base].times;
    for (std::size_t n = 0; n < times.size(); ++n) {
      double m = 0.0;
      for (std::size_t s = 0; s < S; ++s) m += results[base + s].coupling_cost[n];
      series << grid[g] << ',' << num(times[n]) << ',' << num(m / static_cast<double>(S)) << '\n';
    }
  }
  out.write("couple.csv", table.str());
  out.write("couple_seeds.csv", per_seed.str());
  out.write("couple_timeseries.csv", series.str());

  json fits;
  try {
    fits["coupling_cost"] = fit_to_json(fit_rate(xs, ys));
    if (d2) fits["exact_d2_sq"] = fit_to_json(fit_rate(xs, ys_d2));
  } catch (const std::invalid_argument& e) {
    throw NumericalError(std::string("rate fit: ") + e.what());
  }
  out.write_json("rate_fit.json", fits);
  return {{"T", cfg.couple.T}, {"seeds", S}, {"N_grid", grid}, {"slope", fits["coupling_cost"]["slope"]}};
}

std::string level_name(double level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", level);
  return buf;
}

json run_toy(const RunConfig& cfg, Output& out) {
  const auto& p = cfg.toy;
  const toy::State s0{p.g0, p.omega0, p.gamma_c};
  const auto traj = toy::simulate(s0, p.dt, p.T, p.constrained, p.integrator);

  const double e0 = toy::energy(s0);
  double drift = 0.0, sup_g = 0.0;
  bool touched = false;
  std::ostringstream dat;
  dat << "t g omega energy\n";
  const auto& times = traj.times();
  const auto& states = traj.states();
  for (std::size_t n = 0; n < states.size(); ++n) {
    const auto& s = states[n];
    require_finite(s.g, "toy g");
    require_finite(s.omega, "toy omega");
    drift = std::max(drift, std::abs(s.energy - e0) / e0);
    if (times[n] > p.transient) sup_g = std::max(sup_g, std::abs(s.g));
    if (std::abs(s.omega) >= 1.0) touched = true;
    if (n % p.output_stride == 0 || n + 1 == states.size())
      dat << num(times[n]) << ' ' << num(s.g) << ' ' << num(s.omega) << ' ' << num(s.energy) << '\n';
  }
  out.write("trajectory.dat", dat.str());

  std::vector<double> levels = p.contour_levels;
  levels.push_back(toy::critical_energy(p.gamma_c));
  for (std::size_t k = 0; k < levels.size(); ++k) {
    std::ostringstream c;
    c << "g omega\n";
    for (const auto& [g, w] : toy::level_set(levels[k], p.gamma_c, 200)) c << num(g) << ' ' << num(w) << '\n';
    const std::string name =
        k + 1 == levels.size() ? "contour_critical.dat" : "contour_E" + level_name(levels[k]) + ".dat";
    out.write(name, c.str());
  }

  toy::ToyTrajectory tail;
  for (std::size_t n = 0; n < states.size(); ++n) {
    if (times[n] > p.transient) tail.push(times[n], states[n]);
  }
  json period = nullptr;
  if (const auto est = toy::detect_period(tail)) {
    period = {{"mean", est->mean}, {"crossings", est->crossing_times.size()}, {"returns", est->returns}};
    if (est->returns.size() >= 5) period["spread_last5"] = est->spread_last(5);
  }

  json summary{{"gamma_c", p.gamma_c},
               {"constrained", p.constrained},
               {"energy_initial", e0},
               {"energy_final", states.back().energy},
               {"energy_critical", toy::critical_energy(p.gamma_c)},
               {"max_relative_energy_drift", drift},
               {"limit_bound", toy::limit_bound(p.gamma_c)},
               {"transient", p.transient},
               {"sup_abs_g_after_transient", sup_g},
               {"touched_boundary", touched},
               {"period", period},
               {"w1_final", toy::w1(states.back().g)}};
  out.write_json("summary.json", summary);
  return summary;
}

struct RateCase {
  std::vector<double> errors;
  bool boundary_contact = false;
};

RateCase euler_rate_case(const EulerRateParams& p, const std::vector<double>& x0) {
  const Box box = Box::unit(2);
  const BoxField rotation = [](std::span<const double> x, std::span<double> v) {
    v[0] = -x[1];
    v[1] = x[0];
  };
  RateCase rc;
  for (double dt : p.dts) {
    const auto coarse = projected_euler(rotation, box, x0, dt, p.T);
    const auto fine = projected_euler(rotation, box, x0, dt / static_cast<double>(p.reference_factor),
                                      p.T, p.reference_factor);
    if (coarse.size() != fine.size()) throw ConfigError("euler_rate.dts: T must be a multiple of every dt");
    double err = 0.0;
    for (std::size_t n = 0; n < coarse.size(); ++n) {
      const auto& a = coarse.states()[n];
      const auto& b = fine.states()[n];
      err = std::max(err, std::hypot(a[0] - b[0], a[1] - b[1]));
      if (count_pinned(box, b) > 0) rc.boundary_contact = true;
    }
    require_finite(err, "euler error");
    rc.errors.push_back(err);
  }
  return rc;
}

json run_euler_rate(const RunConfig& cfg, Output& out) {
  const auto& p = cfg.euler_rate;
  const RateCase contact = euler_rate_case(p, p.x0);
  const RateCase interior = euler_rate_case(p, p.x0_interior);
  std::ostringstream csv;
  csv << "case,dt,error\n";
  for (std::size_t k = 0; k < p.dts.size(); ++k) csv << "contact," << num(p.dts[k]) << ',' << num(contact.errors[k]) << '\n';
  for (std::size_t k = 0; k < p.dts.size(); ++k) csv << "interior," << num(p.dts[k]) << ',' << num(interior.errors[k]) << '\n';
  out.write("euler_rate.csv", csv.str());

  json fits;
  try {
    fits["contact"] = fit_to_json(fit_rate(p.dts, contact.errors));
    fits["interior"] = fit_to_json(fit_rate(p.dts, interior.errors));
  } catch (const std::invalid_argument& e) {
    throw NumericalError(std::string("rate fit: ") + e.what());
  }
  fits["contact"]["boundary_contact"] = contact.boundary_contact;
  fits["interior"]["boundary_contact"] = interior.boundary_contact;
  out.write_json("rate_fit.json", fits);
  return {{"contact_slope", fits["contact"]["slope"]},
          {"interior_slope", fits["interior"]["slope"]},
          {"boundary_contact", contact.boundary_contact}};
}

double brute_force_assignment(const std::vector<double>& cost, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += cost[i * n + perm[i]];
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

json run_selftest(const RunConfig& cfg, Output& out, bool& passed) {
  const auto& p = cfg.selftest;
  RngStream rng(cfg.seed, StreamPurpose::experiment, 0, 0);

  std::size_t brute_mismatches = 0;
  double brute_max_diff = 0.0;
  for (std::size_t k = 0; k < p.instances; ++k) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform01() * static_cast<double>(p.max_brute_force_n));
    const std::size_t m = std::min(n, p.max_brute_force_n);
    const double power = k % 2 == 0 ? 2.0 : 1.0;
    std::vector<double> xs(m * p.dim), ys(m * p.dim);
    for (auto& v : xs) v = rng.uniform(-1.0, 1.0);
    for (auto& v : ys) v = rng.uniform(-1.0, 1.0);
    std::vector<double> cost(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double d2 = 0.0;
        for (std::size_t l = 0; l < p.dim; ++l) {
          const double d = xs[i * p.dim + l] - ys[j * p.dim + l];
          d2 += d * d;
        }
        cost[i * m + j] = std::pow(std::sqrt(d2), power);
      }
    }
    const auto a = solve_assignment(cost, m);
    double solved = 0.0;
    for (std::size_t i = 0; i < m; ++i) solved += cost[i * m + a[i]];
    const double brute = brute_force_assignment(cost, m);
    if (solved != brute) ++brute_mismatches;
    brute_max_diff = std::max(brute_max_diff, std::abs(solved - brute));
  }

  std::size_t line_failures = 0;
  double line_max_diff = 0.0;
  for (std::size_t k = 0; k < p.instances; ++k) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform01() * 64.0);
    const double power = k % 2 == 0 ? 2.0 : 1.0;
    std::vector<double> xs(n), ys(n);
    for (auto& v : xs) v = rng.uniform(-1.0, 1.0);
    for (auto& v : ys) v = rng.uniform(-1.0, 1.0);
    const auto px = PointCloud::line(xs);
    const auto py = PointCloud::line(ys);
    const double diff = std::abs(wasserstein_assignment(power, px, py) - wasserstein_1d(power, px, py));
    if (!(diff <= 1e-12)) ++line_failures;
    line_max_diff = std::max(line_max_diff, diff);
  }

  passed = brute_mismatches == 0 && line_failures == 0;
  json summary{{"instances", p.instances},
               {"brute_force", {{"max_n", p.max_brute_force_n}, {"mismatches", brute_mismatches},
                                {"max_abs_diff", brute_max_diff}}},
               {"sorted_line", {{"failures", line_failures}, {"max_abs_diff", line_max_diff}}},
               {"passed", passed}};
  out.write_json("selftest.json", summary);
  return summary;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  return to_hex(digest, len);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

RunResult run(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  const unsigned threads = resolve_threads(cfg.threads);
  Output out(cfg.output_dir);
  RunResult result;
  result.output_dir = out.root();

  switch (cfg.experiment) {
    case Experiment::train: result.summary = run_train(cfg, out, log); break;
    case Experiment::meanfield: result.summary = run_meanfield_experiment(cfg, out, log); break;
    case Experiment::couple: result.summary = run_couple(cfg, out, log, threads); break;
    case Experiment::toy: result.summary = run_toy(cfg, out); break;
    case Experiment::euler_rate: result.summary = run_euler_rate(cfg, out); break;
    case Experiment::wasserstein_selftest:
      result.summary = run_selftest(cfg, out, result.checks_passed);
      break;
  }
  if (cfg.experiment == Experiment::train || cfg.experiment == Experiment::meanfield) {
    out.write_json("summary.json", result.summary);
  }
  json resolved = to_json(cfg);
  resolved.erase("output_dir");
  out.write_json("config.json", resolved);
  out.write_manifest();
  result.files = out.files();
  return result;
}

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace wgmf

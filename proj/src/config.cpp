#include "wgmf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "wgmf/geometry.hpp"
#include "wgmf/transport.hpp"

namespace wgmf {

using nlohmann::json;

namespace {

/// Reads the members of one JSON object and remembers which keys were used so
/// that leftovers can be reported as typos.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    known_.insert(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  const json* child(const char* key) {
    known_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!known_.count(key)) throw ConfigError(field(key) + ": unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> known_;
};

CoordinateLaw parse_law(const json& j, const std::string& path, CoordinateLaw law) {
  ObjectReader r(j, path);
  std::string kind = law.kind == CoordinateLaw::Kind::uniform ? "uniform" : "truncated_normal";
  r.read("law", kind);
  r.read("lo", law.lo);
  r.read("hi", law.hi);
  r.read("mean", law.mean);
  r.read("stddev", law.stddev);
  r.finish();
  if (kind == "uniform") {
    law.kind = CoordinateLaw::Kind::uniform;
  } else if (kind == "truncated_normal") {
    law.kind = CoordinateLaw::Kind::truncated_normal;
  } else {
    throw ConfigError(path + ".law: expected 'uniform' or 'truncated_normal'");
  }
  return law;
}

json law_to_json(const CoordinateLaw& law) {
  json j{{"law", law.kind == CoordinateLaw::Kind::uniform ? "uniform" : "truncated_normal"},
         {"lo", law.lo},
         {"hi", law.hi}};
  if (law.kind == CoordinateLaw::Kind::truncated_normal) {
    j["mean"] = law.mean;
    j["stddev"] = law.stddev;
  }
  return j;
}

TargetDistribution parse_target(const json& j) {
  ObjectReader r(j, "target");
  std::string kind = "atomic";
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> covariances;
  std::vector<double> weights;
  r.read("kind", kind);
  r.read("atoms", points);
  r.read("means", points);
  r.read("covariances", covariances);
  r.read("weights", weights);
  r.finish();
  if (!r.has("weights")) weights.assign(points.size(), 1.0 / static_cast<double>(std::max<std::size_t>(points.size(), 1)));
  try {
    if (kind == "bimodal") {
      if (r.has("atoms") || r.has("means") || r.has("weights")) {
        throw ConfigError("target.kind: 'bimodal' takes no atoms, means or weights");
      }
      return TargetDistribution::bimodal();
    }
    if (kind == "atomic") {
      if (!r.has("atoms")) throw ConfigError("target.atoms: required for an atomic target");
      if (r.has("means") || r.has("covariances")) {
        throw ConfigError("target.means: not allowed for an atomic target");
      }
      if (points.empty()) throw ConfigError("target.atoms: need at least one atom");
      return TargetDistribution::atomic(points, weights);
    }
    if (kind == "gaussian_mixture") {
      if (!r.has("means") || !r.has("covariances")) {
        throw ConfigError("target.means: gaussian_mixture needs means and covariances");
      }
      if (points.empty()) throw ConfigError("target.means: need at least one component");
      return TargetDistribution::gaussian_mixture(points, covariances, weights);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("target: ") + e.what());
  }
  throw ConfigError("target.kind: expected 'bimodal', 'atomic' or 'gaussian_mixture'");
}

json target_to_json(const TargetDistribution& t) {
  if (t.kind() == TargetDistribution::Kind::atomic) {
    return {{"kind", "atomic"}, {"atoms", t.points()}, {"weights", t.weights()}};
  }
  return {{"kind", "gaussian_mixture"}, {"means", t.points()}, {"weights", t.weights()}};
}

MonteCarloRule parse_mc(ObjectReader& r) {
  MonteCarloRule mc;
  r.read("seed", mc.seed);
  r.read("n_samples", mc.n_samples);
  return mc;
}

Quadrature parse_quadrature(const json& j, Quadrature q) {
  ObjectReader r(j, "quadrature");
  if (const json* z = r.child("z")) {
    ObjectReader zr(*z, "quadrature.z");
    std::string rule;
    zr.read("rule", rule);
    if (rule == "gauss_hermite") {
      GaussHermiteRule gh;
      zr.read("nodes", gh.n_nodes);
      q.z_rule = gh;
    } else if (rule == "monte_carlo") {
      q.z_rule = parse_mc(zr);
    } else {
      throw ConfigError("quadrature.z.rule: expected 'gauss_hermite' or 'monte_carlo'");
    }
    zr.finish();
  }
  if (const json* x = r.child("x")) {
    ObjectReader xr(*x, "quadrature.x");
    std::string rule;
    xr.read("rule", rule);
    if (rule == "exact") {
      q.x_rule = ExactAtomicRule{};
    } else if (rule == "monte_carlo") {
      q.x_rule = parse_mc(xr);
    } else {
      throw ConfigError("quadrature.x.rule: expected 'exact' or 'monte_carlo'");
    }
    xr.finish();
  }
  r.finish();
  return q;
}

json quadrature_to_json(const Quadrature& q) {
  json j;
  if (const auto* gh = std::get_if<GaussHermiteRule>(&q.z_rule)) {
    j["z"] = {{"rule", "gauss_hermite"}, {"nodes", gh->n_nodes}};
  } else {
    const auto& mc = std::get<MonteCarloRule>(q.z_rule);
    j["z"] = {{"rule", "monte_carlo"}, {"seed", mc.seed}, {"n_samples", mc.n_samples}};
  }
  if (std::holds_alternative<ExactAtomicRule>(q.x_rule)) {
    j["x"] = {{"rule", "exact"}};
  } else {
    const auto& mc = std::get<MonteCarloRule>(q.x_rule);
    j["x"] = {{"rule", "monte_carlo"}, {"seed", mc.seed}, {"n_samples", mc.n_samples}};
  }
  return j;
}

void rethrow_as_config(const std::string& field, const auto& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.rfind(field, 0) == 0 ? msg : field + ": " + msg);
  }
}

}  // namespace

Experiment experiment_from_string(const std::string& name) {
  if (name == "train") return Experiment::train;
  if (name == "meanfield") return Experiment::meanfield;
  if (name == "couple") return Experiment::couple;
  if (name == "toy") return Experiment::toy;
  if (name == "euler-rate") return Experiment::euler_rate;
  if (name == "wasserstein-selftest") return Experiment::wasserstein_selftest;
  throw ConfigError("experiment: unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::train: return "train";
    case Experiment::meanfield: return "meanfield";
    case Experiment::couple: return "couple";
    case Experiment::toy: return "toy";
    case Experiment::euler_rate: return "euler-rate";
    case Experiment::wasserstein_selftest: return "wasserstein-selftest";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (dims.K < 1) throw ConfigError("dims.K: must be >= 1");
  if (dims.L < 1) throw ConfigError("dims.L: must be >= 1");
  if (N < 1) throw ConfigError("particles.N: must be >= 1");
  if (M < 1) throw ConfigError("particles.M: must be >= 1");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride: must be >= 1");
  rethrow_as_config("activation", [&] { (void)Activation::by_name(activation); });
  rethrow_as_config("init", [&] { init.validate(); });
  if (target.dim() != dims.K) throw ConfigError("target: dimension must equal dims.K");

  switch (experiment) {
    case Experiment::train:
      rethrow_as_config("", [&] {
        sgd.validate();
        meanfield.quad.validate(dims.L, target);
      });
      break;
    case Experiment::meanfield:
      rethrow_as_config("", [&] {
        meanfield.validate();
        meanfield.quad.validate(dims.L, target);
      });
      break;
    case Experiment::couple: {
      rethrow_as_config("", [&] {
        sgd.validate();
        meanfield.quad.validate(dims.L, target);
      });
      if (!(sgd.h > 0.0)) throw ConfigError("sgd.h: must be > 0 for a coupled run");
      if (couple.N_grid.size() < 3) throw ConfigError("couple.N_grid: need at least three values");
      for (std::size_t n : couple.N_grid) {
        if (n < 1) throw ConfigError("couple.N_grid: values must be >= 1");
        if (couple.exact_d2 && n > kAssignmentCap) {
          throw ConfigError("couple.exact_d2: N_grid values must not exceed the assignment cap");
        }
      }
      if (couple.seeds < 1) throw ConfigError("couple.seeds: must be >= 1");
      if (!(couple.T >= 0.0) || !std::isfinite(couple.T)) throw ConfigError("couple.T: must be >= 0");
      // Coupled paths use M = N, so γ_c = n_c.
      if (std::abs(meanfield.gamma_c - sgd.n_c) > 1e-12 * sgd.n_c) {
        throw ConfigError("meanfield.gamma_c: must equal n_c*N/M = n_c for a coupled run");
      }
      break;
    }
    case Experiment::toy:
      if (!(toy.gamma_c > 0.0) || !std::isfinite(toy.gamma_c)) throw ConfigError("toy.gamma_c: must be > 0");
      if (!(toy.dt > 0.0)) throw ConfigError("toy.dt: must be > 0");
      if (!(toy.T >= 0.0) || !std::isfinite(toy.T)) throw ConfigError("toy.T: must be >= 0");
      if (toy.constrained && std::abs(toy.omega0) > 1.0) {
        throw ConfigError("toy.omega0: constrained run must start with |omega0| <= 1");
      }
      if (!(toy.transient >= 0.0) || toy.transient > toy.T) {
        throw ConfigError("toy.transient: must lie in [0, T]");
      }
      if (toy.output_stride < 1) throw ConfigError("toy.output_stride: must be >= 1");
      for (double level : toy.contour_levels) {
        if (!(level >= 2.0)) throw ConfigError("toy.contour_levels: levels must be >= 2");
      }
      break;
    case Experiment::euler_rate: {
      const Box q = Box::unit(2);
      if (euler_rate.x0.size() != 2 || !q.contains(euler_rate.x0)) {
        throw ConfigError("euler_rate.x0: must be a point of [-1,1]^2");
      }
      if (euler_rate.x0_interior.size() != 2 || !q.contains(euler_rate.x0_interior)) {
        throw ConfigError("euler_rate.x0_interior: must be a point of [-1,1]^2");
      }
      if (euler_rate.dts.size() < 3) throw ConfigError("euler_rate.dts: need at least three step sizes");
      for (double dt : euler_rate.dts) {
        if (!(dt > 0.0)) throw ConfigError("euler_rate.dts: step sizes must be > 0");
      }
      if (!(euler_rate.T > 0.0)) throw ConfigError("euler_rate.T: must be > 0");
      if (euler_rate.reference_factor < 2) throw ConfigError("euler_rate.reference_factor: must be >= 2");
      break;
    }
    case Experiment::wasserstein_selftest:
      if (selftest.instances < 1) throw ConfigError("selftest.instances: must be >= 1");
      if (selftest.max_brute_force_n < 1 || selftest.max_brute_force_n > 8) {
        throw ConfigError("selftest.max_brute_force_n: must lie in [1, 8]");
      }
      if (selftest.dim < 1) throw ConfigError("selftest.dim: must be >= 1");
      break;
  }
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  ObjectReader r(doc, "");

  std::string experiment = to_string(cfg.experiment);
  r.read("experiment", experiment);
  cfg.experiment = experiment_from_string(experiment);
  r.read("activation", cfg.activation);
  r.read("seed", cfg.seed);
  r.read("output_dir", cfg.output_dir);
  r.read("snapshot_stride", cfg.snapshot_stride);
  r.read("threads", cfg.threads);

  if (const json* d = r.child("dims")) {
    ObjectReader dr(*d, "dims");
    dr.read("K", cfg.dims.K);
    dr.read("L", cfg.dims.L);
    dr.finish();
  }
  if (const json* p = r.child("particles")) {
    ObjectReader pr(*p, "particles");
    pr.read("N", cfg.N);
    pr.read("M", cfg.M);
    pr.finish();
  }
  if (const json* s = r.child("sgd")) {
    ObjectReader sr(*s, "sgd");
    sr.read("h", cfg.sgd.h);
    sr.read("n_c", cfg.sgd.n_c);
    sr.read("steps", cfg.sgd.steps);
    sr.finish();
  }
  if (const json* m = r.child("meanfield")) {
    ObjectReader mr(*m, "meanfield");
    mr.read("dt", cfg.meanfield.dt);
    mr.read("T", cfg.meanfield.horizon);
    mr.read("gamma_c", cfg.meanfield.gamma_c);
    mr.finish();
  }
  if (const json* q = r.child("quadrature")) cfg.meanfield.quad = parse_quadrature(*q, cfg.meanfield.quad);
  if (const json* t = r.child("target")) cfg.target = parse_target(*t);
  if (const json* i = r.child("init")) {
    ObjectReader ir(*i, "init");
    const std::pair<const char*, CoordinateLaw*> laws[] = {
        {"alpha", &cfg.init.alpha}, {"beta", &cfg.init.beta}, {"gamma", &cfg.init.gamma},
        {"a", &cfg.init.a},         {"b", &cfg.init.b},       {"c", &cfg.init.c}};
    for (const auto& [key, law] : laws) {
      if (const json* lj = ir.child(key)) *law = parse_law(*lj, std::string("init.") + key, *law);
    }
    ir.finish();
  }
  if (const json* c = r.child("couple")) {
    ObjectReader cr(*c, "couple");
    cr.read("N_grid", cfg.couple.N_grid);
    cr.read("seeds", cfg.couple.seeds);
    cr.read("T", cfg.couple.T);
    cr.read("exact_d2", cfg.couple.exact_d2);
    cr.finish();
  }
  if (const json* t = r.child("toy")) {
    ObjectReader tr(*t, "toy");
    tr.read("g0", cfg.toy.g0);
    tr.read("omega0", cfg.toy.omega0);
    tr.read("gamma_c", cfg.toy.gamma_c);
    tr.read("dt", cfg.toy.dt);
    tr.read("T", cfg.toy.T);
    tr.read("constrained", cfg.toy.constrained);
    tr.read("transient", cfg.toy.transient);
    tr.read("output_stride", cfg.toy.output_stride);
    tr.read("contour_levels", cfg.toy.contour_levels);
    std::string integrator;
    tr.read("integrator", integrator);
    if (integrator == "rk4") {
      cfg.toy.integrator = toy::Integrator::rk4;
    } else if (integrator == "projected_euler") {
      cfg.toy.integrator = toy::Integrator::projected_euler;
    } else if (!integrator.empty()) {
      throw ConfigError("toy.integrator: expected 'rk4' or 'projected_euler'");
    }
    tr.finish();
  }
  if (const json* e = r.child("euler_rate")) {
    ObjectReader er(*e, "euler_rate");
    er.read("x0", cfg.euler_rate.x0);
    er.read("x0_interior", cfg.euler_rate.x0_interior);
    er.read("dts", cfg.euler_rate.dts);
    er.read("T", cfg.euler_rate.T);
    er.read("reference_factor", cfg.euler_rate.reference_factor);
    er.finish();
  }
  if (const json* s = r.child("selftest")) {
    ObjectReader sr(*s, "selftest");
    sr.read("instances", cfg.selftest.instances);
    sr.read("max_brute_force_n", cfg.selftest.max_brute_force_n);
    sr.read("dim", cfg.selftest.dim);
    sr.finish();
  }
  r.finish();
  cfg.sgd.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["dims"] = {{"K", cfg.dims.K}, {"L", cfg.dims.L}};
  j["particles"] = {{"N", cfg.N}, {"M", cfg.M}};
  j["activation"] = cfg.activation;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["snapshot_stride"] = cfg.snapshot_stride;
  j["sgd"] = {{"h", cfg.sgd.h}, {"n_c", cfg.sgd.n_c}, {"steps", cfg.sgd.steps}};
  j["meanfield"] = {{"dt", cfg.meanfield.dt}, {"T", cfg.meanfield.horizon}, {"gamma_c", cfg.meanfield.gamma_c}};
  j["quadrature"] = quadrature_to_json(cfg.meanfield.quad);
  j["target"] = target_to_json(cfg.target);
  j["init"] = {{"alpha", law_to_json(cfg.init.alpha)}, {"beta", law_to_json(cfg.init.beta)},
               {"gamma", law_to_json(cfg.init.gamma)}, {"a", law_to_json(cfg.init.a)},
               {"b", law_to_json(cfg.init.b)},         {"c", law_to_json(cfg.init.c)}};
  j["couple"] = {{"N_grid", cfg.couple.N_grid}, {"seeds", cfg.couple.seeds}, {"T", cfg.couple.T},
                 {"exact_d2", cfg.couple.exact_d2}};
  json toy{{"g0", cfg.toy.g0},           {"omega0", cfg.toy.omega0},
           {"gamma_c", cfg.toy.gamma_c}, {"dt", cfg.toy.dt},
           {"T", cfg.toy.T},             {"constrained", cfg.toy.constrained},
           {"transient", cfg.toy.transient}, {"output_stride", cfg.toy.output_stride},
           {"contour_levels", cfg.toy.contour_levels}};
  if (cfg.toy.integrator) {
    toy["integrator"] = *cfg.toy.integrator == toy::Integrator::rk4 ? "rk4" : "projected_euler";
  }
  j["toy"] = toy;
  j["euler_rate"] = {{"x0", cfg.euler_rate.x0}, {"x0_interior", cfg.euler_rate.x0_interior},
                     {"dts", cfg.euler_rate.dts}, {"T", cfg.euler_rate.T},
                     {"reference_factor", cfg.euler_rate.reference_factor}};
  j["selftest"] = {{"instances", cfg.selftest.instances},
                   {"max_brute_force_n", cfg.selftest.max_brute_force_n},
                   {"dim", cfg.selftest.dim}};
  return j;
}

}  // namespace wgmf

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "wgmf/config.hpp"
#include "wgmf/dynamics.hpp"
#include "wgmf/fields.hpp"
#include "wgmf/geometry.hpp"
#include "wgmf/harness.hpp"
#include "wgmf/model.hpp"
#include "wgmf/quadrature.hpp"
#include "wgmf/rate_fit.hpp"
#include "wgmf/toy.hpp"
#include "wgmf/transport.hpp"

namespace py = pybind11;
using namespace wgmf;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

Quadrature make_quadrature(const std::string& z_rule, int z_nodes, std::size_t z_samples,
                           std::uint64_t z_seed, const std::string& x_rule, std::size_t x_samples,
                           std::uint64_t x_seed) {
  Quadrature q;
  if (z_rule == "gauss_hermite") {
    q.z_rule = GaussHermiteRule{z_nodes};
  } else if (z_rule == "monte_carlo") {
    q.z_rule = MonteCarloRule{z_seed, z_samples};
  } else {
    throw std::invalid_argument("z_rule: expected 'gauss_hermite' or 'monte_carlo'");
  }
  if (x_rule == "exact") {
    q.x_rule = ExactAtomicRule{};
  } else if (x_rule == "monte_carlo") {
    q.x_rule = MonteCarloRule{x_seed, x_samples};
  } else {
    throw std::invalid_argument("x_rule: expected 'exact' or 'monte_carlo'");
  }
  return q;
}

py::dict trajectory_dict(const toy::ToyTrajectory& traj) {
  std::vector<double> g, w, e;
  for (const auto& s : traj.states()) {
    g.push_back(s.g);
    w.push_back(s.omega);
    e.push_back(s.energy);
  }
  py::dict d;
  d["t"] = traj.times();
  d["g"] = g;
  d["omega"] = w;
  d["energy"] = e;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field WGAN training dynamics (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<Dims>(m, "Dims")
      .def(py::init<int, int>(), py::arg("K"), py::arg("L"))
      .def_readwrite("K", &Dims::K)
      .def_readwrite("L", &Dims::L)
      .def_property_readonly("generator_size", &Dims::generator_size)
      .def_property_readonly("discriminator_size", &Dims::discriminator_size);

  py::class_<GeneratorParticle>(m, "GeneratorParticle")
      .def(py::init<Dims, std::vector<double>>(), py::arg("dims"), py::arg("values"))
      .def_property_readonly("values", [](const GeneratorParticle& p) { return to_vec(p.values()); })
      .def("alpha", &GeneratorParticle::alpha)
      .def("beta", [](const GeneratorParticle& p, int j) { return to_vec(p.beta(j)); })
      .def("gamma", &GeneratorParticle::gamma);

  py::class_<DiscriminatorParticle>(m, "DiscriminatorParticle")
      .def(py::init<int, std::vector<double>>(), py::arg("K"), py::arg("values"))
      .def_static("projected", &DiscriminatorParticle::projected)
      .def_property_readonly("values", [](const DiscriminatorParticle& p) { return to_vec(p.values()); })
      .def_property_readonly("a", &DiscriminatorParticle::a)
      .def_property_readonly("b", [](const DiscriminatorParticle& p) { return to_vec(p.b()); })
      .def_property_readonly("c", &DiscriminatorParticle::c);

  py::class_<EnsemblePair>(m, "EnsemblePair")
      .def(py::init([](Dims dims, std::vector<GeneratorParticle> g, std::vector<DiscriminatorParticle> d,
                       const std::string& activation) {
             return EnsemblePair(dims, std::move(g), std::move(d), Activation::by_name(activation));
           }),
           py::arg("dims"), py::arg("generators"), py::arg("discriminators"),
           py::arg("activation") = "sigmoid")
      .def_property_readonly("dims", &EnsemblePair::dims)
      .def_property_readonly("N", &EnsemblePair::N)
      .def_property_readonly("M", &EnsemblePair::M)
      .def_property_readonly("generators", &EnsemblePair::generators)
      .def_property_readonly("discriminators", &EnsemblePair::discriminators)
      .def("generator", [](const EnsemblePair& e, const std::vector<double>& z) { return generator_eval(e, z); })
      .def("discriminator", [](const EnsemblePair& e, const std::vector<double>& x) {
        return discriminator_eval(e, x);
      });

  py::class_<TargetDistribution>(m, "TargetDistribution")
      .def_static("atomic", &TargetDistribution::atomic, py::arg("atoms"), py::arg("weights"))
      .def_static("gaussian_mixture", &TargetDistribution::gaussian_mixture, py::arg("means"),
                  py::arg("covariances"), py::arg("weights"))
      .def_static("bimodal", &TargetDistribution::bimodal)
      .def_property_readonly("dim", &TargetDistribution::dim)
      .def_property_readonly("points", &TargetDistribution::points)
      .def_property_readonly("weights", &TargetDistribution::weights);

  py::class_<Quadrature>(m, "Quadrature")
      .def(py::init(&make_quadrature), py::arg("z_rule") = "gauss_hermite", py::arg("z_nodes") = 64,
           py::arg("z_samples") = 1, py::arg("z_seed") = 0, py::arg("x_rule") = "exact",
           py::arg("x_samples") = 1, py::arg("x_seed") = 0);

  m.def("gauss_hermite_normal", [](int n) {
    const auto w = gauss_hermite_normal(n);
    return py::make_tuple(w.points, w.weights);
  });

  m.def(
      "sample_ensemble",
      [](Dims dims, std::size_t N, std::size_t M, std::uint64_t seed, const std::string& activation) {
        return sample_ensemble(dims, N, M, InitDistribution{}, seed, Activation::by_name(activation));
      },
      py::arg("dims"), py::arg("N"), py::arg("M"), py::arg("seed"), py::arg("activation") = "sigmoid");

  m.def("energy", &energy, py::arg("ensemble"), py::arg("target"), py::arg("quad"));
  m.def("V_theta", &V_theta, py::arg("ensemble"), py::arg("theta"), py::arg("target"), py::arg("quad"));
  m.def("V_omega", &V_omega, py::arg("ensemble"), py::arg("omega"), py::arg("target"), py::arg("quad"));

  m.def(
      "sgd_step",
      [](const EnsemblePair& state, double h, int n_c, std::uint64_t seed, const TargetDistribution& target,
         std::uint64_t step) {
        SgdConfig cfg;
        cfg.h = h;
        cfg.n_c = n_c;
        cfg.seed = seed;
        return sgd_step(state, cfg, target, step);
      },
      py::arg("state"), py::arg("h"), py::arg("n_c"), py::arg("seed"), py::arg("target"), py::arg("step"));
  m.def(
      "meanfield_step",
      [](const EnsemblePair& state, double dt, double gamma_c, const TargetDistribution& target,
         const Quadrature& quad) {
        MeanFieldConfig cfg;
        cfg.dt = dt;
        cfg.gamma_c = gamma_c;
        cfg.quad = quad;
        return meanfield_step(state, cfg, target);
      },
      py::arg("state"), py::arg("dt"), py::arg("gamma_c"), py::arg("target"), py::arg("quad"));

  py::class_<Box>(m, "Box")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("lo"), py::arg("hi"))
      .def_static("unit", &Box::unit)
      .def("contains", [](const Box& b, const std::vector<double>& x) { return b.contains(x); })
      .def("diameter", &Box::diameter);
  m.def("project_box", [](const Box& b, const std::vector<double>& x) { return project_box(b, x); });
  m.def("project_tangent_cone", [](const Box& b, const std::vector<double>& omega, const std::vector<double>& v) {
    return project_tangent_cone(b, omega, v);
  });

  m.def("wasserstein_1d", [](double p, std::vector<double> xs, std::vector<double> ys) {
    return wasserstein_1d(p, PointCloud::line(std::move(xs)), PointCloud::line(std::move(ys)));
  });
  m.def("wasserstein_assignment",
        [](double p, const std::vector<std::vector<double>>& xs, const std::vector<std::vector<double>>& ys) {
          return wasserstein_assignment(p, PointCloud::from_rows(xs), PointCloud::from_rows(ys));
        });
  m.def("solve_assignment", [](const std::vector<std::vector<double>>& cost) {
    std::vector<double> flat;
    for (const auto& row : cost) {
      if (row.size() != cost.size()) throw std::invalid_argument("solve_assignment: cost must be square");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return solve_assignment(flat, cost.size());
  });

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("intercept", &RateFit::intercept)
      .def_readonly("r_squared", &RateFit::r_squared)
      .def_readonly("slope_stderr", &RateFit::slope_stderr);
  m.def("fit_rate", &fit_rate, py::arg("xs"), py::arg("ys"));

  auto t = m.def_submodule("toy", "Bimodal toy problem");
  t.def("Phi", &toy::Phi);
  t.def("psi", &toy::psi, py::arg("omega"), py::arg("g"));
  t.def(
      "field",
      [](double g, double omega, double gamma_c) {
        const auto v = toy::field({g, omega, gamma_c});
        return py::make_tuple(v.dg, v.domega);
      },
      py::arg("g"), py::arg("omega"), py::arg("gamma_c") = 1.0);
  t.def(
      "energy", [](double g, double omega, double gamma_c) { return toy::energy({g, omega, gamma_c}); },
      py::arg("g"), py::arg("omega"), py::arg("gamma_c") = 1.0);
  t.def("critical_energy", &toy::critical_energy);
  t.def("limit_bound", &toy::limit_bound);
  t.def("w1", &toy::w1);
  t.def(
      "simulate",
      [](double g, double omega, double gamma_c, double dt, double T, bool constrained) {
        return trajectory_dict(toy::simulate({g, omega, gamma_c}, dt, T, constrained));
      },
      py::arg("g"), py::arg("omega"), py::arg("gamma_c"), py::arg("dt"), py::arg("T"),
      py::arg("constrained") = false);
  t.def(
      "detect_period",
      [](double g, double omega, double gamma_c, double dt, double T, bool constrained,
         double transient) -> py::object {
        const auto traj = toy::simulate({g, omega, gamma_c}, dt, T, constrained);
        toy::ToyTrajectory tail;
        for (std::size_t n = 0; n < traj.size(); ++n) {
          if (traj.times()[n] > transient) tail.push(traj.times()[n], traj.states()[n]);
        }
        const auto est = toy::detect_period(tail);
        if (!est) return py::none();
        py::dict d;
        d["mean"] = est->mean;
        d["returns"] = est->returns;
        return d;
      },
      py::arg("g"), py::arg("omega"), py::arg("gamma_c"), py::arg("dt"), py::arg("T"),
      py::arg("constrained") = false, py::arg("transient") = 0.0);

  m.def("_run", [](const std::string& doc) {
    const RunConfig cfg = parse_config(nlohmann::json::parse(doc));
    RunResult r;
    {
      py::gil_scoped_release release;
      r = run(cfg);
    }
    nlohmann::json out{{"summary", r.summary},
                       {"files", r.files},
                       {"output_dir", r.output_dir.string()},
                       {"checks_passed", r.checks_passed}};
    return out.dump();
  });
}

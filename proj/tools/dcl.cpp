// Command-line front end: run bundled systems to CSV and drive the
// verification suites.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dcl/checks.hpp"
#include "dcl/cli_config.hpp"
#include "dcl/errors.hpp"
#include "dcl/lie_poisson.hpp"
#include "dcl/systems.hpp"

namespace {

using dcl::Config;
using dcl::Vec;
using dcl::fmt17;

const auto& fmt = fmt17;

struct SimulationPlan {
  dcl::ConstrainedSystem sys;
  dcl::SigmaPoint initial;
  std::vector<std::string> columns;  // element coordinate names
  // Conserved quantities (name, extractor over a trajectory point).
  std::vector<std::pair<std::string,
                        std::function<double(const dcl::SigmaPoint&)>>>
      conserved;
};

std::vector<std::string> so3_names(const std::string& prefix) {
  std::vector<std::string> n;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      n.push_back(prefix + std::to_string(i) + std::to_string(j));
  return n;
}

SimulationPlan build_plan(const Config& cfg) {
  const std::string id = cfg.require("system");
  SimulationPlan plan;

  if (id == "plate-ball") {
    dcl::PlateBallConfig pb;
    pb.h = cfg.require_num("h");
    pb.r = cfg.require_num("r");
    pb.Omega = cfg.require_num("Omega");
    pb.c = cfg.require_num("c");
    plan.sys = dcl::plate_ball_system(pb);
    plan.initial = dcl::plate_ball_initial(
        pb, cfg.num_or("initial.x0", 0.0), cfg.num_or("initial.y0", 0.0),
        cfg.num_or("initial.omega_x", 0.0), cfg.num_or("initial.omega_y", 0.0));
    plan.columns = {"x0", "y0", "x1", "y1"};
    for (const auto& n : so3_names("R")) plan.columns.push_back(n);
    return plan;
  }

  if (id == "optimal-control") {
    const double h = cfg.require_num("h");
    const std::string rk = cfg.str_or("retraction", "cay");
    dcl::so3::Retraction ret;
    if (rk == "exp")
      ret.kind = dcl::so3::RetractionKind::Exp;
    else if (rk == "cay")
      ret.kind = dcl::so3::RetractionKind::Cay;
    else
      throw dcl::ConfigError("parameter retraction: expected exp or cay");

    const dcl::so3::Vec3 inertia(cfg.num_or("inertia.x", 1.0),
                                 cfg.num_or("inertia.y", 2.0),
                                 cfg.num_or("inertia.z", 3.0));
    dcl::AlgebraFunction l;
    l.value = [inertia](const dcl::so3::Vec3& xi) {
      return 0.5 * xi.dot(inertia.asDiagonal() * xi);
    };
    l.grad = [inertia](const dcl::so3::Vec3& xi) {
      return dcl::so3::Vec3(inertia.asDiagonal() * xi);
    };

    std::vector<dcl::AlgebraFunction> psi;
    dcl::so3::Vec3 xi0(cfg.num_or("initial.xi_x", 0.3),
                       cfg.num_or("initial.xi_y", -0.2),
                       cfg.num_or("initial.xi_z", 0.1));
    if (cfg.str_or("constraint.pin_z", "") != "") {
      const double c = cfg.require_num("constraint.c");
      dcl::AlgebraFunction p;
      p.value = [c](const dcl::so3::Vec3& xi) { return xi(2) - c; };
      p.grad = [](const dcl::so3::Vec3&) {
        return dcl::so3::Vec3(0.0, 0.0, 1.0);
      };
      psi.push_back(p);
      xi0(2) = c;
    }
    plan.sys = dcl::optimal_control_system(ret, l, psi, h);
    plan.initial.g = dcl::so3::flatten(ret.tau(h * xi0));
    plan.initial.lambda = Vec::Zero(static_cast<int>(psi.size()));
    plan.columns = so3_names("R");
    if (psi.empty()) {
      // The body momentum norm is invariant only without constraints.
      plan.conserved.emplace_back(
          "momentum_norm", [ret, l, h](const dcl::SigmaPoint& p) {
            const dcl::so3::Vec3 xi =
                ret.tau_inv(dcl::so3::unflatten(p.g)) / h;
            return dcl::lie_poisson_momentum(ret, l, h, xi).norm();
          });
    }
    return plan;
  }

  if (id == "free-particle" || id == "harmonic" ||
      id == "constrained-translation") {
    const double h = cfg.require_num("h");
    const bool timed = cfg.str_or("time-extended", "false") == "true";
    dcl::ConstrainedSystem inner;
    dcl::SigmaPoint p0;
    if (id == "free-particle") {
      inner = dcl::free_particle_system(2, h);
      p0.g.resize(4);
      p0.g << cfg.num_or("initial.x0", 0.0), cfg.num_or("initial.y0", 0.0),
          cfg.require_num("initial.x1"), cfg.require_num("initial.y1");
      p0.lambda.resize(0);
      plan.columns = {"x0", "y0", "x1", "y1"};
      plan.conserved.emplace_back("momentum_x",
                                  [h, timed](const dcl::SigmaPoint& p) {
                                    const int o = timed ? 2 : 0;
                                    return (p.g(o + 2) - p.g(o + 0)) / h;
                                  });
    } else if (id == "harmonic") {
      inner = dcl::harmonic_oscillator_system(h);
      p0.g.resize(2);
      p0.g << cfg.num_or("initial.q0", 0.0), cfg.require_num("initial.q1");
      p0.lambda.resize(0);
      plan.columns = {"q0", "q1"};
    } else {
      const double c = cfg.require_num("c");
      inner = dcl::constrained_translation_system(h, c);
      p0.g.resize(4);
      p0.g << cfg.num_or("initial.x0", 0.0), cfg.num_or("initial.y0", 0.0),
          cfg.require_num("initial.x1"),
          cfg.num_or("initial.y0", 0.0) + c * h;
      p0.lambda = Vec::Zero(1);
      plan.columns = {"x0", "y0", "x1", "y1"};
      plan.conserved.emplace_back("momentum_x",
                                  [h, timed](const dcl::SigmaPoint& p) {
                                    const int o = timed ? 2 : 0;
                                    return (p.g(o + 2) - p.g(o + 0)) / h;
                                  });
    }
    if (timed) {
      plan.sys = dcl::time_extended_fixed(inner, h);
      plan.initial.g.resize(2 + p0.g.size());
      plan.initial.g(0) = cfg.num_or("initial.t", 0.0);
      plan.initial.g(1) = plan.initial.g(0) + h;
      plan.initial.g.tail(p0.g.size()) = p0.g;
      plan.initial.lambda = Vec::Zero(p0.lambda.size() + 1);
      plan.initial.lambda.head(p0.lambda.size()) = p0.lambda;
      std::vector<std::string> cols = {"t0", "t1"};
      for (const auto& c : plan.columns) cols.push_back(c);
      plan.columns = cols;
    } else {
      plan.sys = inner;
      plan.initial = p0;
    }
    return plan;
  }

  throw dcl::ConfigError("unknown system id: " + id);
}

int run_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> /*seed*/,
                 std::optional<double> tol) {
  const Config cfg = Config::load(config_path);
  SimulationPlan plan = build_plan(cfg);
  const int steps = static_cast<int>(cfg.require_num("steps"));
  if (steps < 1) throw dcl::ConfigError("parameter steps: must be >= 1");
  cfg.num_or("seed", 0.0);  // accepted for reproducibility bookkeeping
  cfg.finish();

  dcl::NewtonOptions opt;
  if (tol) opt.tol = *tol;

  const dcl::Trajectory tr = dcl::run(plan.sys, plan.initial, steps, opt);

  std::ofstream out(out_path);
  if (!out) throw dcl::ConfigError("cannot open output file: " + out_path);
  out << "step";
  for (const auto& c : plan.columns) out << "," << c;
  for (int a = 1; a <= plan.sys.n_constraints(); ++a)
    out << ",lambda_" << a;
  for (int a = 1; a <= plan.sys.n_constraints(); ++a) out << ",phi_" << a;
  out << ",residual";
  for (const auto& [name, fn] : plan.conserved) out << "," << name;
  out << "\n";
  double max_res = 0.0, max_phi = 0.0;
  std::vector<double> c0;
  double drift = 0.0;
  for (size_t k = 0; k < tr.points.size(); ++k) {
    const auto& p = tr.points[k];
    out << k;
    for (int i = 0; i < p.g.size(); ++i) out << "," << fmt(p.g(i));
    for (int i = 0; i < p.lambda.size(); ++i) out << "," << fmt(p.lambda(i));
    const Vec phi = plan.sys.phi(p.g);
    for (int i = 0; i < phi.size(); ++i) out << "," << fmt(phi(i));
    if (phi.size() > 0)
      max_phi = std::max(max_phi, phi.lpNorm<Eigen::Infinity>());
    const double res = k == 0 ? 0.0 : tr.residuals[k - 1];
    max_res = std::max(max_res, res);
    out << "," << fmt(res);
    for (size_t ci = 0; ci < plan.conserved.size(); ++ci) {
      const double v = plan.conserved[ci].second(p);
      if (k == 0)
        c0.push_back(v);
      else
        drift = std::max(drift, std::abs(v - c0[ci]));
      out << "," << fmt(v);
    }
    out << "\n";
  }

  std::cout << "rows: " << tr.points.size() << "\n"
            << "max residual: " << fmt(max_res) << "\n"
            << "max constraint violation: " << fmt(max_phi) << "\n"
            << "conserved drift: " << fmt(drift) << "\n";
  return 0;
}

int run_check(const std::string& suite, std::uint64_t seed) {
  std::vector<dcl::CheckResult> results;
  if (suite == "axioms")
    results = dcl::suites::axioms(seed);
  else if (suite == "regularity")
    results = dcl::suites::regularity(seed);
  else if (suite == "noether")
    results = dcl::suites::noether(seed);
  else if (suite == "variational")
    results = dcl::suites::variational(seed);
  else if (suite == "reduction")
    results = dcl::suites::reduction(seed);
  else if (suite == "identities")
    results = dcl::suites::identities(seed);
  else if (suite == "all")
    results = dcl::suites::all(seed);
  else {
    std::cerr << "unknown suite: " << suite
              << " (expected axioms|regularity|noether|variational|"
                 "reduction|identities|all)\n";
    return 2;
  }
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name
              << "  measured=" << fmt(r.measured)
              << " threshold=" << fmt(r.threshold);
    if (!r.note.empty()) std::cout << "  (" << r.note << ")";
    std::cout << "\n";
    ok = ok && r.pass;
  }
  std::cout << (ok ? "all checks passed" : "checks FAILED") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete constrained mechanics on groupoids"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  double tol = -1.0;
  app.add_option("--seed", seed, "random seed for sampling-based checks");
  app.add_option("--tol", tol, "override solver tolerance");

  std::string config_path, out_path;
  auto* sim = app.add_subcommand("simulate", "run a configured system");
  sim->add_option("--config", config_path, "config file")->required();
  sim->add_option("--out", out_path, "output CSV path")->required();

  std::string suite;
  auto* chk = app.add_subcommand("check", "run a verification suite");
  chk->add_option("suite", suite, "suite name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      return run_simulate(config_path, out_path, seed,
                          tol > 0.0 ? std::optional<double>(tol)
                                    : std::nullopt);
    return run_check(suite, seed);
  } catch (const dcl::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oactl/config.hpp"
#include "oactl/force_sets.hpp"
#include "oactl/polytope.hpp"
#include "oactl/sim.hpp"
#include "oactl_oracles/oracles.hpp"

using namespace oactl;

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void print_metrics(const std::string& label, const Metrics& m) {
  std::printf("%s: max pos err %.4f m, RMS %.4f m, max |mu - mu_c| %.4f rad, max |mu| %.3f deg, "
              "max unconstrained |mu_c - mu_ref| %.2e rad, solver failures %d, max slice violation %.2e N",
              label.c_str(), m.max_position_error, m.rms_position_error, m.max_attitude_error,
              m.max_attitude_deviation * 180.0 / M_PI, m.max_free_command_gap, m.solver_failures,
              m.max_slice_violation);
  if (m.max_solve_time > 0.0) std::printf(", max guidance solve %.1f us", m.max_solve_time * 1e6);
  std::printf("\n");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

struct SimArgs {
  std::string config, scenario = "1", out, mesh_out;
  std::optional<double> duration;
  std::optional<std::uint64_t> seed;
  bool sweep = false, timing = false;
};

int run_sim(const SimArgs& a) {
  const SystemConfig cfg = load_config(a.config);
  const auto s0 = build_zero_torque_set(cfg.vehicle, cfg.controller);
  if (!a.mesh_out.empty()) {
    auto out = open_out(a.mesh_out);
    write_obj(out, polytope_mesh(s0->polytope));
  }
  SimOptions opts;
  opts.substeps = cfg.substeps;
  opts.actuator = cfg.actuator;
  opts.timing = a.timing;

  auto one = [&](ScenarioSpec spec, const std::string& out_path, const std::string& label) {
    if (a.duration) spec.duration = *a.duration;
    if (a.seed) spec.seed = *a.seed;
    const RunResult r = run_scenario(spec, cfg.vehicle, cfg.controller, opts, s0);
    write_csv(out_path, r.telemetry);
    print_metrics(label, r.metrics);
  };

  if (!a.sweep) {
    one(load_scenario(a.scenario, cfg.scenario.omega_x, cfg.scenario.omega_y), a.out, "scenario " + a.scenario);
    return 0;
  }
  if (a.scenario != "2") throw std::invalid_argument("--sweep applies to scenario 2");
  for (double wx : cfg.scenario.sweep_omega_x) {
    for (double wy : cfg.scenario.sweep_omega_y) {
      char tag[64];
      std::snprintf(tag, sizeof tag, "_wx%.2f_wy%.2f", wx, wy);
      one(scenario_translation(wx, wy), with_suffix(a.out, tag), std::string("scenario 2") + tag);
    }
  }
  return 0;
}

struct ForceSetArgs {
  std::string config, out;
  bool tau0 = false;
  std::optional<double> slice;
};

int run_forceset(const ForceSetArgs& a) {
  const SystemConfig cfg = load_config(a.config);
  Polytope set;
  if (a.tau0) {
    set = build_zero_torque_set(cfg.vehicle, cfg.controller)->polytope;
  } else {
    ForceSetOptions o;
    o.grid = cfg.controller.grid;
    o.directions = icosphere_directions(cfg.controller.icosphere_subdivisions);
    set = attainable_force_set(cfg.vehicle, o);
  }
  const auto range = z_range(set);
  if (range) std::printf("f_z range [%.4f, %.4f] N, %ld facets\n", range->min, range->max, static_cast<long>(set.a.rows()));
  auto out = open_out(a.out);
  const bool obj = ends_with(a.out, ".obj");
  if (a.slice) {
    const Polygon p = plane_slice(set, *a.slice);
    if (p.empty()) throw std::runtime_error("slice is empty at this f_z");
    std::printf("slice at f_z = %.4f N: %zu edges\n", *a.slice, p.vertices.size());
    if (obj) {
      write_obj(out, p, *a.slice);
    } else {
      out << "x,y\n";
      for (const auto& v : p.vertices) out << v.x() << ',' << v.y() << '\n';
    }
    return 0;
  }
  if (obj) {
    write_obj(out, polytope_mesh(set));
  } else {
    out << "nx,ny,nz,b\n";
    for (Eigen::Index r = 0; r < set.a.rows(); ++r) {
      out << set.a(r, 0) << ',' << set.a(r, 1) << ',' << set.a(r, 2) << ',' << set.b[r] << '\n';
    }
  }
  return 0;
}

int run_selftest() {
  const SystemConfig cfg = default_config();
  int failed = 0;
  auto line = [&](bool ok, const char* name, const std::string& detail) {
    std::printf("%-12s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++failed;
  };
  char buf[256];
  const auto w = oracles::run_wls_suite(1000, 20240601);
  std::snprintf(buf, sizeof buf, "%d/%d mismatches, max |dx| %.2e, %.2f s", w.failures, w.problems, w.max_error, w.seconds);
  line(w.failures == 0, "wls", buf);
  const auto g = oracles::check_effectiveness_matrix(100, 7);
  std::snprintf(buf, sizeof buf, "max rel err %.2e", g.max_relative_error);
  line(g.max_relative_error <= 1e-5, "G", buf);
  const auto b = oracles::check_actuator_jacobian(cfg.vehicle, 100, 11);
  std::snprintf(buf, sizeof buf, "max rel err %.2e", b.max_relative_error);
  line(b.max_relative_error <= 1e-5, "B''", buf);
  const auto c = oracles::check_afs_containment(cfg.vehicle, 10000, 3);
  std::snprintf(buf, sizeof buf, "%d/%d outside, worst excess %.3g N", c.outside, c.samples, c.worst_excess);
  line(c.outside == 0, "afs", buf);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Over-actuated multirotor simulator and force-set tools"};
  app.require_subcommand(1);

  SimArgs sim;
  auto* s = app.add_subcommand("sim", "Run a closed-loop scenario and write telemetry CSV");
  s->add_option("--config", sim.config, "Config JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--scenario", sim.scenario, "1, 2, 3 or custom:<file>");
  s->add_option("--duration", sim.duration, "Seconds; overrides the scenario default");
  s->add_option("--out", sim.out, "Telemetry CSV")->required();
  s->add_option("--mesh-out", sim.mesh_out, "Write the S(0) mesh as OBJ");
  s->add_flag("--sweep", sim.sweep, "Scenario 2 over the config's frequency grid; one CSV per pair");
  s->add_option("--seed", sim.seed, "Noise seed");
  s->add_flag("--timing", sim.timing, "Record guidance solve times (telemetry then varies run to run)");

  ForceSetArgs fs;
  auto* f = app.add_subcommand("forceset", "Export the attainable set or S(0)");
  f->add_option("--config", fs.config, "Config JSON")->required()->check(CLI::ExistingFile);
  f->add_flag("--tau0", fs.tau0, "S(tau = 0) instead of the attainable set");
  f->add_option("--slice", fs.slice, "Slice at this body f_z (N)");
  f->add_option("--out", fs.out, ".obj mesh or .csv halfspaces/vertices")->required();

  app.add_subcommand("selftest", "Run the oracle suites");

  CLI11_PARSE(app, argc, argv);
  try {
    if (app.got_subcommand(s)) return run_sim(sim);
    if (app.got_subcommand(f)) return run_forceset(fs);
    return run_selftest();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error at %s: %s\n", e.field().c_str(), e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  return 2;
}

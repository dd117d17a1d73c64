#include "bihartree/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bihartree/checkpoint.hpp"
#include "bihartree/config.hpp"
#include "bihartree/diagnostics.hpp"
#include "bihartree/exponents.hpp"
#include "bihartree/runner.hpp"
#include "bihartree/timeseries.hpp"

namespace bihartree {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::vector<std::string> sets;
  int threads = 0;
  bool as_json = false;
  bool defocusing = false;
  std::string dump_cache;
};

json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string plain(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "undefined";
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + plain(v[i]);
    return out;
  }
  return v.dump();
}

void emit(const json& report, bool as_json) {
  if (as_json) {
    std::cout << report.dump() << '\n';
    return;
  }
  for (const auto& [k, v] : report.items()) std::cout << k << '=' << plain(v) << '\n';
}

RunConfig gather_config(const Globals& g, ConfigScope scope, bool validate_now = true) {
  RunConfig cfg;
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw IoError("cannot open config '" + g.config + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str(), g.config);
  }
  apply_overrides(cfg, g.sets);
  if (g.defocusing) apply_overrides(cfg, {"defocusing=true"});
  if (validate_now) validate_config(cfg, scope);
  return cfg;
}

void dump_cache(const RunContext& ctx, const std::string& dir) {
  fs::create_directories(dir);
  const auto& c = *ctx.cache;
  auto put = [&](const std::string& name, const RealArray& a) {
    if (a.empty()) return;
    std::vector<cplx> v(a.begin(), a.end());
    write_checkpoint((fs::path(dir) / (name + ".bin")).string(), ComplexField(ctx.grid, std::move(v)), 0.0,
                     ctx.cfg.params);
  };
  put("k2", c.k2);
  put("k4", c.k4);
  put("riesz", c.riesz);
  put("mask", c.mask);
  put("w_b", c.w_b);
  put("psiR", c.psiR);
  if (c.virial) {
    const auto& vb = *c.virial;
    put("virial_a", vb.a);
    put("virial_lap", vb.lap);
    put("virial_bilap", vb.bilap);
    put("virial_trilap", vb.trilap);
    for (int j = 0; j < vb.d; ++j) put("virial_grad" + std::to_string(j), vb.grad[j]);
    for (int j = 0; j < vb.d; ++j)
      for (int k = j; k < vb.d; ++k) put("virial_hess" + std::to_string(j) + std::to_string(k), vb.hess[j * vb.d + k]);
  }
}

RunContext make_context(const Globals& g) {
  const auto cfg = gather_config(g, ConfigScope::run);
  auto ctx = prepare_run(cfg);
  if (!g.dump_cache.empty()) dump_cache(ctx, g.dump_cache);
  return ctx;
}

int cmd_exponents(const Globals& g) {
  const auto cfg = gather_config(g, ConfigScope::params);
  const auto e = compute_exponents(cfg.params);
  const auto range = in_intercritical_range(cfg.params, e);
  json r;
  r["N"] = cfg.params.N;
  r["alpha"] = cfg.params.alpha;
  r["b"] = cfg.params.b;
  r["p"] = cfg.params.p;
  r["s_c"] = number(e.s_c);
  r["p_star"] = number(e.p_star);
  r["p_upper"] = number(e.p_upper);
  r["x_alpha"] = e.x_alpha ? number(*e.x_alpha) : json(nullptr);
  r["B"] = number(e.B);
  r["r1"] = number(e.r1);
  r["r_star"] = number(e.r_star);
  r["non_radial_range"] = range.non_radial;
  r["radial_range"] = range.radial;
  emit(r, g.as_json);
  return 0;
}

int cmd_check_c(const Globals& g) {
  auto cfg = gather_config(g, ConfigScope::params, false);
  for (const char* k : {"N", "alpha", "b"})
    if (!cfg.given.count(k)) throw ParameterError(std::string("missing required key '") + k + "'");
  const auto rep = check_condition_C(cfg.params);
  json r;
  r["valid"] = rep.valid;
  r["violations"] = rep.violations;
  emit(r, g.as_json);
  return 0;
}

int cmd_groundstate(const Globals& g) {
  auto cfg = gather_config(g, ConfigScope::run);
  cfg.gs.compute = true;
  auto ctx = prepare_run(cfg);
  if (!g.dump_cache.empty()) dump_cache(ctx, g.dump_cache);
  const auto& gs = *ctx.gs;
  fs::create_directories(cfg.output.dir);
  const auto ck = (fs::path(cfg.output.dir) / "groundstate.bin").string();
  write_checkpoint(ck, gs.phi, 0.0, cfg.params);
  json r;
  r["mass"] = gs.mass;
  r["deltaSq"] = gs.deltaSq;
  r["energy"] = gs.energy;
  r["residual"] = gs.residual;
  r["S_final"] = gs.S_final;
  r["iterations"] = gs.iterations;
  r["checkpoint"] = ck;
  std::ofstream((fs::path(cfg.output.dir) / "groundstate.json").string()) << r.dump(2) << '\n';
  emit(r, g.as_json);
  return 0;
}

int cmd_evolve(const Globals& g, const std::string& resume) {
  const auto ctx = make_context(g);
  RunSummary s = resume.empty() ? run_evolution(ctx, initial_state(ctx)) : resume_evolution(ctx, resume);
  const auto& last = s.samples.back();
  json r;
  r["t_final"] = s.result.t;
  r["steps"] = s.result.last_step;
  r["mass"] = number(last.mass);
  r["energy"] = number(last.energy);
  r["samples"] = s.samples.size();
  r["timeseries"] = s.timeseries;
  r["checkpoints"] = s.checkpoints.size();
  emit(r, g.as_json);
  return 0;
}

int cmd_morawetz(const Globals& g, int samples) {
  const auto ctx = make_context(g);
  const auto rep = morawetz_verify(ctx, initial_state(ctx), samples);
  json r;
  r["samples"] = rep.times.size();
  r["max_rel_err"] = rep.max_rel_err;
  r["assembly_err"] = rep.assembly_err;
  r["times"] = rep.times;
  r["fd"] = rep.fd;
  r["rhs"] = rep.rhs;
  r["rel_err"] = rep.rel_err;
  emit(r, g.as_json);
  return 0;
}

int cmd_scatter(const Globals& g, const std::string& dir_opt) {
  RunConfig cfg = gather_config(g, ConfigScope::params, false);
  const std::string dir = dir_opt.empty() ? cfg.output.dir : dir_opt;
  std::vector<std::string> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir)) {
      const auto name = e.path().filename().string();
      if (name.rfind("ckpt_", 0) == 0 && e.path().extension() == ".bin") files.push_back(e.path().string());
    }
  std::sort(files.begin(), files.end());
  if (files.size() < 3) throw ParameterError("scatter-scan needs at least three ckpt_*.bin files in '" + dir + "'");
  std::vector<double> times;
  std::vector<ComplexField> states;
  auto first = read_checkpoint(files.front());
  const auto grid = first.field.grid_ptr();
  const auto params = first.params;
  for (const auto& f : files) {
    auto ck = read_checkpoint(f, grid);
    times.push_back(ck.t);
    states.push_back(std::move(ck.field));
  }
  const auto cache = make_cache(grid, params, CacheOptions{});
  ScatterOptions opt;
  opt.threshold = cfg.scatter_threshold;
  const auto rep = scatter_detect(times, states, *cache, opt);
  json r;
  r["verdict"] = to_string(rep.verdict);
  r["samples"] = times.size();
  r["final_consecutive"] = rep.consecutive.back();
  r["threshold"] = rep.threshold;
  r["final_residual"] = rep.final_residual;
  r["times"] = rep.sample_times;
  r["consecutive"] = rep.consecutive;
  emit(r, g.as_json);
  return 0;
}

int cmd_evac(const Globals& g, const std::string& ts_opt) {
  RunConfig cfg = gather_config(g, ConfigScope::params, false);
  const std::string path = ts_opt.empty() ? (fs::path(cfg.output.dir) / "timeseries.csv").string() : ts_opt;
  const auto rows = read_timeseries(path);
  std::vector<double> t, m;
  for (const auto& s : rows) {
    t.push_back(s.t);
    m.push_back(s.local_mass);
  }
  const auto rep = evacuation_scan(t, m);
  json r;
  r["minima"] = rep.minima_times.size();
  r["slope"] = rep.slope;
  r["initial_local_mass"] = m.front();
  r["minima_times"] = rep.minima_times;
  r["minima_values"] = rep.minima_values;
  emit(r, g.as_json);
  return 0;
}

int thread_setting(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("BIHARTREE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator and diagnostics for the inhomogeneous biharmonic Hartree equation"};
  app.name("bihartree");
  Globals g;
  app.add_option("--config", g.config, "Run configuration (key = value lines)");
  app.add_option("--set", g.sets, "Override a configuration key (key=value), repeatable");
  app.add_option("--threads", g.threads, "Transform threads (fallback: BIHARTREE_THREADS, then 1)");
  app.add_flag("--json", g.as_json, "Emit one JSON object instead of key=value lines");
  app.add_flag("--defocusing", g.defocusing, "Flip the sign of the nonlinearity (same as --set defocusing=true)");
  app.add_option("--dump-cache", g.dump_cache, "Write multiplier and weight arrays to this directory");
  app.require_subcommand(1);

  auto* exps = app.add_subcommand("exponents", "Critical exponents and range flags");
  auto* checkc = app.add_subcommand("check-c", "Condition (C) verdict with violated clauses");
  auto* gs = app.add_subcommand("groundstate", "Compute the ground state and write it to output.dir");
  auto* evolve_cmd = app.add_subcommand("evolve", "Run the time evolution with diagnostics");
  std::string resume;
  evolve_cmd->add_option("--resume", resume, "Continue from this checkpoint");
  auto* mv = app.add_subcommand("morawetz-verify", "Compare dM_a/dt with the assembled identity");
  int samples = 20;
  mv->add_option("--samples", samples, "Interior sample times");
  auto* sc = app.add_subcommand("scatter-scan", "Pullback Cauchy analysis over stored checkpoints");
  std::string ck_dir;
  sc->add_option("--dir", ck_dir, "Checkpoint directory (default output.dir)");
  auto* ev = app.add_subcommand("evac-scan", "Local-mass minima from a time series");
  std::string ts;
  ev->add_option("--timeseries", ts, "CSV path (default output.dir/timeseries.csv)");
  for (auto* s : app.get_subcommands({})) s->fallthrough();

  if (argc <= 1) {
    std::cerr << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_thread_count(thread_setting(g.threads));
    if (exps->parsed()) return cmd_exponents(g);
    if (checkc->parsed()) return cmd_check_c(g);
    if (gs->parsed()) return cmd_groundstate(g);
    if (evolve_cmd->parsed()) return cmd_evolve(g, resume);
    if (mv->parsed()) return cmd_morawetz(g, samples);
    if (sc->parsed()) return cmd_scatter(g, ck_dir);
    if (ev->parsed()) return cmd_evac(g, ts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace bihartree

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bihartree/checkpoint.hpp"
#include "bihartree/cli.hpp"
#include "bihartree/config.hpp"
#include "bihartree/runner.hpp"
#include "bihartree/timeseries.hpp"
#include "generators.hpp"

using namespace bihartree;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bihartree_test_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kBase =
    "N = 3\nalpha = 2\nb = -1\np = 2.5\n"
    "d = 2\nL = 20\nM = 32\n";

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bihartree");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

RunConfig small_run(const fs::path& dir) {
  auto cfg = parse_config(std::string(kBase) +
                          "dt = 0.01\nT = 0.4\ncadence = 5\n"
                          "initial.amplitude = 1\ninitial.width = 2\ninitial.velocity = 0.5, 0.2\n"
                          "output.checkpoint_every = 10\n");
  apply_overrides(cfg, {"output.dir=" + dir.string()});
  validate_config(cfg, ConfigScope::run);
  return cfg;
}

}  // namespace

TEST_CASE("config: defaults, required keys and validation") {
  auto cfg = parse_config(kBase);
  validate_config(cfg, ConfigScope::run);
  CHECK(cfg.evolve.dt == 1e-3);
  CHECK(cfg.evolve.cadence == 10);
  CHECK(cfg.sigma == 0.5);
  CHECK(cfg.dealias);
  CHECK(cfg.diag_radius() == 2.5);
  CHECK(cfg.cache_options().coupling == 1.0);

  auto bad = parse_config("N = 3\nalpha = 2\nb = 0.5\np = 2.5\n");
  CHECK_THROWS_WITH_AS(validate_config(bad, ConfigScope::params), doctest::Contains("b must be negative"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(validate_config(parse_config("N = 3\nalpha = 2\np = 2.5\n"), ConfigScope::params),
                       doctest::Contains("missing required key 'b'"), ParameterError);
  CHECK_THROWS_WITH_AS(validate_config(parse_config("N = 3\nalpha = 2\nb = -1\np = 2.5\n"), ConfigScope::run),
                       doctest::Contains("'d'"), ParameterError);

  auto odd = parse_config(std::string(kBase) + "dt = 0.01\nT = 0.015\n");
  CHECK_THROWS_AS(validate_config(odd, ConfigScope::run), ParameterError);
}

TEST_CASE("config: parse errors carry origin and line") {
  CHECK_THROWS_WITH_AS(parse_config("N = 3\n# comment\nbogus = 1\n", "run.cfg"),
                       doctest::Contains("run.cfg:3: unknown key 'bogus'"), ParameterError);
  CHECK_THROWS_WITH_AS(parse_config("N = 3\nN = 4\n", "run.cfg"), doctest::Contains("run.cfg:2: repeated key 'N'"),
                       ParameterError);
  CHECK_THROWS_WITH_AS(parse_config("alpha = two\n", "x"), doctest::Contains("x:1:"), ParameterError);
  CHECK_THROWS_AS(parse_config("dealias = maybe\n"), ParameterError);
  CHECK_THROWS_AS(parse_config("alpha\n"), ParameterError);
}

TEST_CASE("config: overrides and canonical dump") {
  auto cfg = parse_config(std::string(kBase) + "initial.velocity = 0.5, -0.25\nscatter.threshold = 1e-3\n");
  apply_overrides(cfg, {"dt=0.002", "defocusing=true"});
  CHECK(cfg.evolve.dt == 0.002);
  CHECK(cfg.cache_options().coupling == -1.0);
  CHECK(cfg.initial.velocity[1] == -0.25);
  CHECK_THROWS_WITH_AS(apply_overrides(cfg, {"nope=1"}), doctest::Contains("--set nope=1"), ParameterError);

  const auto text = dump_config(cfg);
  const auto again = parse_config(text);
  CHECK(dump_config(again) == text);
  CHECK(again.evolve.dt == cfg.evolve.dt);
  CHECK(again.scatter_threshold == cfg.scatter_threshold);
  CHECK(again.defocusing);
}

TEST_CASE("checkpoint: bitwise round trip of random fields") {
  const auto dir = scratch("ckpt");
  gen::Source src(21);
  ModelParams params{3, 2.0, -1.0, 2.5};
  for (int d = 1; d <= 3; ++d) {
    auto g = make_grid(d, src.uniform(5, 40), 16);
    ComplexField u(g);
    for (auto& v : u.values()) v = {src.uniform(-1e3, 1e3), src.uniform(-1e-3, 1e-3)};
    const double t = src.uniform(0, 100);
    const auto path = (dir / ("u" + std::to_string(d) + ".bin")).string();
    write_checkpoint(path, u, t, params);
    const auto ck = read_checkpoint(path);
    CHECK(ck.t == t);
    CHECK(ck.params.alpha == params.alpha);
    CHECK(ck.field.grid_ptr()->dim() == d);
    CHECK(ck.sha256 == payload_sha256(u));
    bool same = true;
    for (std::size_t i = 0; i < u.size(); ++i) same = same && ck.field[i] == u[i];
    CHECK(same);
    CHECK_THROWS_AS(read_checkpoint(path, make_grid(d, 1.0, 16)), IoError);
  }
}

TEST_CASE("checkpoint: corruption and version errors") {
  const auto dir = scratch("corrupt");
  auto g = make_grid(2, 10.0, 16);
  auto u = gen::Source(3).field(g);
  const auto path = (dir / "a.bin").string();
  write_checkpoint(path, u, 1.0, ModelParams{3, 2.0, -1.0, 2.5});
  const auto bytes = slurp(path);

  const auto cut = (dir / "cut.bin").string();
  std::ofstream(cut, std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_AS(read_checkpoint(cut), ChecksumError);

  auto flipped = bytes;
  flipped[flipped.size() - 3] ^= 0x40;
  const auto flip = (dir / "flip.bin").string();
  std::ofstream(flip, std::ios::binary) << flipped;
  CHECK_THROWS_AS(read_checkpoint(flip), ChecksumError);

  auto versioned = bytes;
  const auto at = versioned.find("\"format_version\":1");
  REQUIRE(at != std::string::npos);
  versioned.replace(at, 18, "\"format_version\":9");
  const auto ver = (dir / "ver.bin").string();
  std::ofstream(ver, std::ios::binary) << versioned;
  CHECK_THROWS_AS(read_checkpoint(ver), VersionError);

  CHECK_THROWS_AS(read_checkpoint((dir / "missing.bin").string()), IoError);
}

TEST_CASE("checkpoint: committed fixture") {
  const auto ck = read_checkpoint(std::string(BIHARTREE_FIXTURE_DIR) + "/ramp_d1_M16.bin");
  CHECK(ck.sha256 == "c5a7f347b292fc1b1551a0bb14dafbdb0cd3ec8de15cf52a7099feb5d3e99a25");
  CHECK(ck.t == 0.25);
  CHECK(ck.field.grid_ptr()->dim() == 1);
  CHECK(ck.field.grid_ptr()->points() == 16);
  CHECK(ck.field.grid_ptr()->length() == 8.0);
  CHECK(ck.params.p == 2.5);
  for (int j = 0; j < 16; ++j) CHECK(ck.field[j] == cplx(j / 8.0 - 1.0, (15 - j) / 16.0));
}

TEST_CASE("timeseries: header, rows and round trip") {
  const auto dir = scratch("ts");
  const auto path = (dir / "ts.csv").string();
  std::vector<DiagnosticsSample> in;
  for (int k = 0; k < 3; ++k) {
    DiagnosticsSample s;
    s.t = 0.1 * k;
    s.mass = 1.0 / 3.0 + k;
    s.energy = -2.5e-7 * k;
    s.local_mass = 0.125;
    s.spacetime_acc = 1e-300;
    append_timeseries(s, path);
    in.push_back(s);
  }
  const auto text = slurp(path);
  CHECK(text.substr(0, text.find('\n')) == kTimeseriesHeader);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  const auto out = read_timeseries(path);
  REQUIRE(out.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(out[k].t == in[k].t);
    CHECK(out[k].mass == in[k].mass);
    CHECK(out[k].energy == in[k].energy);
    CHECK(out[k].spacetime_acc == in[k].spacetime_acc);
  }
}

TEST_CASE("runner: repeated runs are byte-identical") {
  const auto a = scratch("run_a"), b = scratch("run_b");
  const auto ca = prepare_run(small_run(a));
  const auto cb = prepare_run(small_run(b));
  const auto ra = run_evolution(ca, initial_state(ca));
  const auto rb = run_evolution(cb, initial_state(cb));
  CHECK(slurp(ra.timeseries) == slurp(rb.timeseries));
  CHECK(ra.checkpoints.size() == 5);
  for (std::size_t i = 0; i < ra.checkpoints.size(); ++i) {
    const auto pa = fs::path(ra.checkpoints[i]), pb = fs::path(rb.checkpoints[i]);
    CHECK(pa.filename() == pb.filename());
    CHECK(read_checkpoint(pa.string()).sha256 == read_checkpoint(pb.string()).sha256);
  }
  CHECK(read_timeseries(ra.timeseries).size() == 9);
}

TEST_CASE("runner: resume matches the uninterrupted run") {
  const auto full_dir = scratch("full"), part_dir = scratch("part");
  const auto full_ctx = prepare_run(small_run(full_dir));
  const auto full = run_evolution(full_ctx, initial_state(full_ctx));

  auto part_cfg = small_run(part_dir);
  part_cfg.evolve.T = 0.2;
  const auto part_ctx = prepare_run(part_cfg);
  run_evolution(part_ctx, initial_state(part_ctx));

  const auto resume_ctx = prepare_run(small_run(part_dir));
  const auto resumed = resume_evolution(resume_ctx, (part_dir / checkpoint_name(20)).string());
  CHECK(resumed.result.last_step == 40);

  const auto& a = full.result.state;
  const auto& b = resumed.result.state;
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  CHECK(diff <= 1e-12);

  const auto rows_full = read_timeseries(full.timeseries);
  const auto rows_part = read_timeseries(resumed.timeseries);
  REQUIRE(rows_part.size() == rows_full.size());
  for (std::size_t i = 0; i < rows_full.size(); ++i) {
    CHECK(rows_part[i].t == doctest::Approx(rows_full[i].t).epsilon(1e-14));
    CHECK(rows_part[i].mass == doctest::Approx(rows_full[i].mass).epsilon(1e-12));
    CHECK(rows_part[i].energy == doctest::Approx(rows_full[i].energy).epsilon(1e-10));
  }
  CHECK_THROWS_AS(resume_evolution(resume_ctx, (part_dir / "missing.bin").string()), IoError);
}

TEST_CASE("cli: exit codes and output") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"exponents", "--no-such-flag"}).code == 2);

  const auto ok = run_cli({"exponents", "--set", "N=5", "--set", "alpha=2", "--set", "b=-0.5", "--set", "p=3"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("1.25") != std::string::npos);

  const auto js = run_cli({"--json", "exponents", "--set", "N=5", "--set", "alpha=2", "--set", "b=-0.5", "--set", "p=3"});
  CHECK(js.code == 0);
  CHECK(js.out.find("\"s_c\"") != std::string::npos);

  const auto bad = run_cli({"exponents", "--set", "N=5", "--set", "alpha=2", "--set", "b=0.5", "--set", "p=3"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("b must be negative") != std::string::npos);

  const auto missing = run_cli({"evolve", "--config", "/nonexistent/run.cfg"});
  CHECK(missing.code == 1);
}

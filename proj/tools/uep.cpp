// uep: design, build and simulate multi-edge-type UEP LDPC codes.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "uep/alist.hpp"
#include "uep/density_evolution.hpp"
#include "uep/manifest.hpp"
#include "uep/pipeline.hpp"
#include "uep/simulation.hpp"

using namespace uep;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kConstruction = 3 };

// Failure carrying an exit code and the stage that raised it.
struct StageError : std::runtime_error {
  StageError(int code_, std::string stage_, const std::string& what)
      : std::runtime_error(what), code(code_), stage(std::move(stage_)) {}
  int code;
  std::string stage;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string real(double v) { return format_real(v); }

struct OptimizeArgs {
  std::string lambda_file;
  std::string classes;
  int n = 0;
  double rate = 0.0;
  int dc = 0;
  std::vector<std::string> max_rho;
  double sigma2 = 0.0;
  bool auto_sigma = false;
  double design_factor = opt::kDesignFactor;
  int grid = 101;
  std::string out;
};

struct BuildArgs {
  std::string profile_file;
  int n = 0;
  double rate = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

struct SimulateArgs {
  std::string matrix;
  std::string meta;
  std::string snr = "0.5:0.25:1.5";
  int max_iter = 50;
  std::uint64_t seed = 1;
  long min_errors = 200;
  long max_frames = 1000000;
  long min_frames = 0;
  int threads = 0;
  bool uncoded = false;
  std::string out;
  std::string plot_data;
};

// ---- optimize-profile ----

void apply_caps(const std::vector<std::string>& caps, const opt::DesignProblem& p, opt::OptimizerConfig& cfg) {
  for (const auto& c : caps) {
    const auto colon = c.find(':');
    if (colon == std::string::npos) {
      // a bare value caps the least protected information class
      cfg.max_rho[p.parity_class - 1] = std::stod(c);
    } else {
      const int j = std::stoi(c.substr(0, colon)) - 1;
      if (j < 0 || j >= p.classes() || j == p.parity_class) throw CLI::ValidationError("--max-rho", "no such class in " + c);
      cfg.max_rho[j] = std::stod(c.substr(colon + 1));
    }
  }
}

ProfileDocument run_optimize(const OptimizeArgs& a, RunManifest& man) {
  DesignSpec spec = worked_example();
  ProfileDocument input;
  try {
    input = read_profile_file(a.lambda_file);
  } catch (const std::exception& e) {
    throw StageError(kUsage, "optimize", std::string("lambda file: ") + e.what());
  }
  man.add_input(a.lambda_file);
  spec = spec_from_document(input, spec);
  if (!a.classes.empty()) spec.part.info_fractions = parse_list(a.classes);
  const double rate = a.rate > 0.0 ? a.rate : spec.part.rate();
  if (a.n > 0) spec.part.n = a.n;
  spec.part.k = static_cast<int>(std::lround(spec.part.n * rate));
  if (a.dc > 0) spec.dc = a.dc;
  if (!input.global_lambda) throw StageError(kUsage, "optimize", "lambda file has no [global] lambda");

  Design d;
  try {
    d = make_design(spec);
  } catch (const DomainError& e) {
    throw StageError(kUsage, "optimize", e.what());
  }
  opt::OptimizerConfig cfg;
  cfg.grid_points = a.grid;
  apply_caps(a.max_rho, d.problem, cfg);

  if (a.sigma2 > 0.0 && !a.auto_sigma) {
    cfg.sigma2_design = a.sigma2;
    man.set("sigma2_source", "flag");
  } else {
    const auto ds = opt::auto_design_sigma(d.problem, a.design_factor);
    cfg.sigma2_design = ds.sigma2;
    man.set("sigma_star", real(ds.sigma_star));
    man.set("sigma2_source", "auto");
  }
  man.set("sigma2_design", real(cfg.sigma2_design));
  man.set("n", std::to_string(spec.part.n));
  man.set("k", std::to_string(spec.part.k));
  man.set("dc", std::to_string(spec.dc));
  man.set("info_fractions", join_list(spec.part.info_fractions));
  for (const auto& [j, v] : cfg.max_rho) man.set("max_rho_c" + std::to_string(j + 1), real(v));
  man.set("grid", std::to_string(a.grid));

  opt::OptimizedProfile r;
  try {
    r = opt::optimize_all(d.problem, cfg);
  } catch (const opt::OptimizationFailure& e) {
    throw StageError(kInfeasible, "optimize",
                     "class C" + std::to_string(e.class_index() + 1) + " infeasible (binding " + e.binding() +
                         "): " + e.what());
  }
  auto doc = profile_document(d, r, cfg);
  if (!a.out.empty()) doc.provenance.emplace_back("manifest", a.out + ".manifest.json");
  for (int c = 0; c < d.problem.classes(); ++c) {
    std::printf("C%d  d_min %d  rho", c + 1, r.d_min[c]);
    for (const auto& [s, v] : r.rho[c]) std::printf(" %d:%.5f", s, v);
    std::printf("\n");
  }
  std::printf("sigma2_design %.6f  deviation %.4f  certificate %s\n", r.sigma2, r.deviation,
              r.certificate ? "converged" : "failed");
  for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
  return doc;
}

// ---- build-code ----

code::SparseMatrix run_build(const BuildArgs& a, RunManifest& man, code::CodeMeta* meta_out) {
  ProfileDocument doc;
  try {
    doc = read_profile_file(a.profile_file);
  } catch (const std::exception& e) {
    throw StageError(kUsage, "build", std::string("profile file: ") + e.what());
  }
  man.add_input(a.profile_file);
  man.seed = a.seed;
  BuiltCode b;
  try {
    b = build_code(doc, a.n, a.rate, a.seed);
  } catch (const code::ConstructionFailure& e) {
    throw StageError(kConstruction, "build", e.what());
  }
  const auto mp = code::measure_profile(b.h);
  std::printf("n %d  m %d  edges %ld  girth %d  four-cycles %ld\n", b.h.n, b.h.m, b.h.edges(), mp.girth,
              mp.four_cycles);
  for (std::size_t c = 0; c < mp.rho.size(); ++c) {
    std::printf("C%zu rho", c + 1);
    for (const auto& [s, v] : mp.rho[c]) std::printf(" %d:%.5f", s, v);
    std::printf("\n");
  }
  auto notes = b.notes;
  if (!a.out.empty()) notes.push_back("manifest " + a.out + ".manifest.json");
  auto meta = code::meta_of(b.h, b.parity_class, notes);
  if (meta_out) *meta_out = meta;
  if (!a.out.empty()) {
    code::save_code(a.out, b.h, meta);
    man.add_output(a.out);
    man.add_output(a.out + ".meta");
  }
  return b.h;
}

// ---- simulate ----

std::vector<sim::SimPoint> run_simulate(const SimulateArgs& a, RunManifest& man, const code::SparseMatrix* given) {
  code::SparseMatrix h;
  if (given) {
    h = *given;
  } else {
    try {
      if (!a.meta.empty()) {
        std::ifstream f(a.meta);
        if (!f) throw std::runtime_error("cannot read " + a.meta);
        const auto meta = code::read_meta(f);
        h = code::load_code(a.matrix, nullptr);
        if (static_cast<int>(meta.class_of_column.size()) != h.n)
          throw std::runtime_error("meta does not match matrix length");
        h.class_of_column = meta.class_of_column;
        h.seed = meta.seed;
        man.add_input(a.meta);
      } else {
        h = code::load_code(a.matrix, nullptr);
      }
    } catch (const std::exception& e) {
      throw StageError(kUsage, "simulate", e.what());
    }
    man.add_input(a.matrix);
  }
  sim::SimConfig cfg;
  try {
    cfg.snr_db = parse_range(a.snr);
  } catch (const DomainError& e) {
    throw StageError(kUsage, "simulate", std::string("--snr: ") + e.what());
  }
  cfg.max_iter = a.max_iter;
  cfg.seed = a.seed;
  cfg.min_errors = a.min_errors;
  cfg.max_frames = a.max_frames;
  cfg.min_frames = a.min_frames;
  cfg.decode = !a.uncoded;
  cfg.threads = a.threads > 0 ? a.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  man.seed = a.seed;
  man.set("threads", std::to_string(cfg.threads));

  const auto pts = sim::run_ber(h, cfg);
  sim::write_csv(std::cout, pts, cfg.min_errors);
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw StageError(kUsage, "simulate", "cannot write " + a.out);
    sim::write_csv(f, pts, cfg.min_errors);
    f.close();
    man.add_output(a.out);
  }
  if (!a.plot_data.empty()) {
    for (const auto& path : sim::write_plot_data(a.plot_data, pts)) man.add_output(path);
  }
  return pts;
}

void write_manifest(RunManifest& man, const std::string& out, Clock::time_point t0) {
  if (out.empty()) return;
  man.wall_seconds = seconds_since(t0);
  man.write(out + ".manifest.json");
}

void echo(RunManifest& man, CLI::App* sub) {
  for (const auto* opt : sub->get_options()) {
    if (opt->get_name() == "--help") continue;
    const auto res = opt->results();
    std::string v;
    for (const auto& r : res) v += (v.empty() ? "" : " ") + r;
    man.set(opt->get_name(), opt->count() ? v : "(default)");
  }
}

// ---- trace-de / validate / measure ----

int run_trace(const std::string& profile_file, double sigma2, double ebn0, int max_iter, const std::string& out,
              RunManifest& man) {
  ProfileDocument doc;
  try {
    doc = read_profile_file(profile_file);
  } catch (const std::exception& e) {
    throw StageError(kUsage, "trace-de", e.what());
  }
  man.add_input(profile_file);
  const Design d = make_design(spec_from_document(doc));
  if (doc.check_types.empty()) throw StageError(kUsage, "trace-de", "profile has no check types");
  if (!(sigma2 > 0.0)) sigma2 = sim::sigma2_from_ebn0(ebn0, d.spec.part.rate());
  man.set("sigma2", real(sigma2));
  const auto in = opt::de_inputs(d.problem, doc.check_types);
  const auto tr = mi::de_run(in, sigma2, max_iter);
  std::ostringstream csv;
  csv << "iteration,class,I_v,I_c\n";
  char buf[128];
  for (std::size_t l = 0; l < tr.records.size(); ++l) {
    for (std::size_t j = 0; j < tr.records[l].iv.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.10f,%.10f\n", l + 1, j + 1, tr.records[l].iv[j], tr.records[l].ic[j]);
      csv << buf;
    }
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(out);
    if (!f) throw StageError(kUsage, "trace-de", "cannot write " + out);
    f << csv.str();
    f.close();
    man.add_output(out);
  }
  std::fprintf(stderr, "sigma2 %.6f  %s after %d iterations\n", sigma2, tr.converged ? "converged" : "not converged",
               tr.iterations_used);
  return kOk;
}

int run_validate(const std::string& profile_file, RunManifest& man) {
  ProfileDocument doc;
  try {
    doc = read_profile_file(profile_file);
  } catch (const std::exception& e) {
    throw StageError(kUsage, "validate", e.what());
  }
  man.add_input(profile_file);
  const Design d = make_design(spec_from_document(doc));
  const auto& p = d.problem;
  const auto ens = make_ensemble(p.node_counts, d.spec.part.n, doc.check_types, p.checks);
  const auto v = validate(ens);
  for (const auto& x : v) std::printf("violation %s [%d]: %s\n", to_string(x.kind).c_str(), x.index, x.detail.c_str());
  for (int j = 0; j < p.classes(); ++j) {
    std::printf("C%d rho", j + 1);
    for (const auto& [s, f] : aggregate_by_socket(check_edge_fraction(ens, j), j)) std::printf(" %d:%.5f", s, f);
    std::printf("\n");
  }
  std::printf("%zu violations\n", v.size());
  return v.empty() ? kOk : kInfeasible;
}

int run_measure(const std::string& matrix, const std::string& out, RunManifest& man) {
  code::SparseMatrix h;
  try {
    h = code::load_code(matrix, nullptr);
  } catch (const std::exception& e) {
    throw StageError(kUsage, "measure", e.what());
  }
  man.add_input(matrix);
  const auto mp = code::measure_profile(h);
  std::ostringstream os;
  os << "n " << h.n << "\nm " << h.m << "\nedges " << h.edges() << "\ngirth " << mp.girth << "\nfour_cycles "
     << mp.four_cycles << "\nsockets_balanced " << (mp.sockets_balanced ? 1 : 0) << "\n";
  char buf[64];
  for (std::size_t c = 0; c < mp.rho.size(); ++c) {
    os << "C" << c + 1 << " nodes";
    for (const auto& [deg, cnt] : mp.node_counts[c]) os << ' ' << deg << ':' << cnt;
    os << "\nC" << c + 1 << " rho";
    for (const auto& [s, v] : mp.rho[c]) {
      std::snprintf(buf, sizeof buf, " %d:%.6f", s, v);
      os << buf;
    }
    os << "\n";
  }
  std::cout << os.str();
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw StageError(kUsage, "measure", "cannot write " + out);
    f << os.str();
    f.close();
    man.add_output(out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design, construction and simulation of multi-edge-type UEP LDPC codes"};
  app.require_subcommand(1);
  const auto t0 = Clock::now();

  OptimizeArgs oa;
  auto* opt_cmd = app.add_subcommand("optimize-profile", "Optimize per-class check-node profiles");
  opt_cmd->add_option("--lambda-file", oa.lambda_file, "Profile file with [global] lambda (and optional [meta] n, k, dc, info_fractions)")
      ->required();
  opt_cmd->add_option("--classes", oa.classes, "Information class fractions, most protected first, e.g. 0.2,0.8");
  opt_cmd->add_option("--n", oa.n, "Block length");
  opt_cmd->add_option("--rate", oa.rate, "Code rate");
  opt_cmd->add_option("--dc", oa.dc, "Check-node degree");
  opt_cmd->add_option("--max-rho", oa.max_rho,
                      "Cap on any rho_s: 'v' for the least protected information class or 'j:v' for class j (1-based); repeatable");
  auto* s2 = opt_cmd->add_option("--sigma2", oa.sigma2, "Design noise variance");
  opt_cmd->add_flag("--auto-sigma", oa.auto_sigma, "Design at --design-factor times the uniform-ensemble DE threshold (default when --sigma2 is absent)")
      ->excludes(s2);
  opt_cmd->add_option("--design-factor", oa.design_factor, "Fraction of the threshold sigma used by --auto-sigma")
      ->capture_default_str();
  opt_cmd->add_option("--grid", oa.grid, "Points on the convergence-constraint grid")->capture_default_str();
  opt_cmd->add_option("--out", oa.out, "Output profile file");

  BuildArgs ba;
  auto* build_cmd = app.add_subcommand("build-code", "Build a parity-check matrix from an optimized profile");
  build_cmd->add_option("--profile-file", ba.profile_file, "Profile file from optimize-profile")->required();
  build_cmd->add_option("--n", ba.n, "Block length (default: the profile's)");
  build_cmd->add_option("--rate", ba.rate, "Code rate (default: the profile's)");
  build_cmd->add_option("--seed", ba.seed, "Construction seed")->capture_default_str();
  build_cmd->add_option("--out", ba.out, "Output alist; class labels go to <out>.meta")->required();

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Per-class BER on BPSK/AWGN with BP decoding");
  sim_cmd->add_option("--matrix", sa.matrix, "alist file")->required();
  sim_cmd->add_option("--meta", sa.meta, "Class-label sidecar (default: <matrix>.meta when present)");
  sim_cmd->add_option("--snr", sa.snr, "Eb/N0 range in dB, start:step:stop")->capture_default_str();
  sim_cmd->add_option("--max-iter", sa.max_iter, "BP iterations")->capture_default_str();
  sim_cmd->add_option("--seed", sa.seed, "Simulation seed")->capture_default_str();
  sim_cmd->add_option("--min-errors", sa.min_errors, "Stop a point after this many class-1 bit errors")->capture_default_str();
  sim_cmd->add_option("--max-frames", sa.max_frames, "Frame cap per point")->capture_default_str();
  sim_cmd->add_option("--min-frames", sa.min_frames, "Minimum frames per point")->capture_default_str();
  sim_cmd->add_option("--threads", sa.threads, "Worker threads (0: all cores)")->capture_default_str();
  sim_cmd->add_flag("--uncoded", sa.uncoded, "Skip decoding; hard decisions on the channel output");
  sim_cmd->add_option("--out", sa.out, "Results CSV");
  sim_cmd->add_option("--plot-data", sa.plot_data, "Prefix for per-class '<prefix>_C<j>.dat' series");

  std::string tr_profile, tr_out;
  double tr_sigma2 = 0.0, tr_ebn0 = 1.0;
  int tr_iter = mi::kDefaultMaxIter;
  auto* trace_cmd = app.add_subcommand("trace-de", "Density-evolution trace of a profile as CSV");
  trace_cmd->add_option("--profile-file", tr_profile, "Profile file with check types")->required();
  auto* tr_s2 = trace_cmd->add_option("--sigma2", tr_sigma2, "Noise variance");
  trace_cmd->add_option("--ebn0", tr_ebn0, "Eb/N0 in dB (used when --sigma2 is absent)")->excludes(tr_s2)->capture_default_str();
  trace_cmd->add_option("--max-iter", tr_iter, "Iterations")->capture_default_str();
  trace_cmd->add_option("--out", tr_out, "CSV file (default: stdout)");

  std::string va_profile;
  auto* val_cmd = app.add_subcommand("validate", "Check the ensemble defined by a profile file");
  val_cmd->add_option("--profile-file", va_profile, "Profile file with check types")->required();

  std::string me_matrix, me_out;
  auto* meas_cmd = app.add_subcommand("measure", "Measure the realized profile of a matrix");
  meas_cmd->add_option("--matrix", me_matrix, "alist file (class labels from <matrix>.meta)")->required();
  meas_cmd->add_option("--out", me_out, "Text report");

  OptimizeArgs po;
  BuildArgs pb;
  SimulateArgs ps;
  std::string out_dir;
  auto* pipe_cmd = app.add_subcommand("pipeline", "optimize-profile, build-code and simulate in one go");
  pipe_cmd->add_option("--lambda-file", po.lambda_file, "Profile file with [global] lambda")->required();
  pipe_cmd->add_option("--classes", po.classes, "Information class fractions");
  pipe_cmd->add_option("--n", po.n, "Block length");
  pipe_cmd->add_option("--rate", po.rate, "Code rate");
  pipe_cmd->add_option("--dc", po.dc, "Check-node degree");
  pipe_cmd->add_option("--max-rho", po.max_rho, "As for optimize-profile");
  pipe_cmd->add_option("--design-factor", po.design_factor, "As for optimize-profile")->capture_default_str();
  pipe_cmd->add_option("--seed", pb.seed, "Seed for construction and simulation")->capture_default_str();
  pipe_cmd->add_option("--snr", ps.snr, "Eb/N0 range in dB, start:step:stop")->capture_default_str();
  pipe_cmd->add_option("--max-iter", ps.max_iter, "BP iterations")->capture_default_str();
  pipe_cmd->add_option("--min-errors", ps.min_errors, "Stop rule")->capture_default_str();
  pipe_cmd->add_option("--max-frames", ps.max_frames, "Frame cap per point")->capture_default_str();
  pipe_cmd->add_option("--min-frames", ps.min_frames, "Minimum frames per point")->capture_default_str();
  pipe_cmd->add_option("--threads", ps.threads, "Worker threads (0: all cores)")->capture_default_str();
  pipe_cmd->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  RunManifest man;
  try {
    if (*opt_cmd) {
      man.subcommand = "optimize-profile";
      echo(man, opt_cmd);
      auto doc = run_optimize(oa, man);
      if (!oa.out.empty()) {
        write_profile_file(oa.out, doc);
        man.add_output(oa.out);
      } else {
        write_profile(std::cout, doc);
      }
      write_manifest(man, oa.out, t0);
    } else if (*build_cmd) {
      man.subcommand = "build-code";
      echo(man, build_cmd);
      run_build(ba, man, nullptr);
      write_manifest(man, ba.out, t0);
    } else if (*sim_cmd) {
      man.subcommand = "simulate";
      echo(man, sim_cmd);
      if (sa.meta.empty() && std::filesystem::exists(sa.matrix + ".meta")) sa.meta = sa.matrix + ".meta";
      run_simulate(sa, man, nullptr);
      write_manifest(man, sa.out, t0);
    } else if (*trace_cmd) {
      man.subcommand = "trace-de";
      echo(man, trace_cmd);
      run_trace(tr_profile, tr_sigma2, tr_ebn0, tr_iter, tr_out, man);
      write_manifest(man, tr_out, t0);
    } else if (*val_cmd) {
      man.subcommand = "validate";
      return run_validate(va_profile, man);
    } else if (*meas_cmd) {
      man.subcommand = "measure";
      echo(man, meas_cmd);
      run_measure(me_matrix, me_out, man);
      write_manifest(man, me_out, t0);
    } else if (*pipe_cmd) {
      man.subcommand = "pipeline";
      echo(man, pipe_cmd);
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw StageError(kUsage, "pipeline", "cannot create " + out_dir);
      const std::string dir = out_dir + "/";
      po.out = dir + "profile.txt";
      auto doc = run_optimize(po, man);
      write_profile_file(po.out, doc);
      man.add_output(po.out);

      pb.profile_file = po.out;
      pb.out = dir + "code.alist";
      const auto h = run_build(pb, man, nullptr);

      ps.seed = pb.seed;
      ps.out = dir + "results.csv";
      ps.plot_data = dir + "ber";
      run_simulate(ps, man, &h);
      write_manifest(man, dir + "pipeline", t0);
    }
  } catch (const StageError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.stage.c_str(), e.what());
    return e.code;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kOk;
}

#include "nrpca/cli.hpp"

#include "nrpca/certify.hpp"
#include "nrpca/graphs.hpp"
#include "nrpca/io.hpp"
#include "nrpca/preprocess.hpp"
#include "nrpca/report.hpp"
#include "nrpca/solver.hpp"
#include "nrpca/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nrpca::cli {

namespace fs = std::filesystem;
using report::json;

namespace {

constexpr const char* kTensorName = "frames.tensor";

struct PreprocessArgs {
  std::string input;
  std::string out;
  double shift = 5000.0;
  std::string square = "rescale";
};

struct SynthArgs {
  std::string out;
  std::size_t rows = 8;
  std::size_t cols = 8;
  std::size_t frames = 0;  // 0: rows * cols
  bool certified = false;
  std::size_t p_m = 1;
  std::size_t p_n = 1;
  double speed_x = 1.0;
  double speed_y = 0.0;
  std::size_t start_row = 0;
  std::size_t start_col = 0;
  bool wrap = false;
  double contrast = 10.0;
  double x_black = 5000.0;
  double x_white = 5255.0;
  double v0 = 1.0;
  std::uint64_t seed = 0;
  bool integral = false;
  std::string format = "tensor";
};

struct CertifyArgs {
  std::string input;
  std::string solution;
  std::string truth;
  std::string out;
  std::optional<std::size_t> rows, cols, frames;
  std::optional<std::size_t> p_m, p_n, p_f;
  double speed_x = 0.0;
  double speed_y = 0.0;
  std::optional<std::size_t> start_row, start_col;
  double eps_s = 0.5;
  double eps_c = 1e-6;
  bool strict = false;
};

struct SolveArgs {
  std::string input;
  std::string out;
  SolverConfig config;
  std::size_t restarts = 1;
  std::size_t threads = 0;
  double eps_s = 0.5;
  double eps_c = 1e-6;
  bool strict = false;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json manifest(const std::string& command, const std::string& input, const std::string& out) {
  return {{"command", command}, {"input", input}, {"out", out}};
}

// Masks hold 0/1 so they fit a graymap with maxval 1.
Frame mask_frame(const PerFrameSets& sets, std::size_t k) {
  const FrameGeometry& g = sets.geometry();
  Frame f = Frame::Zero(static_cast<Eigen::Index>(g.rows()), static_cast<Eigen::Index>(g.cols()));
  for (std::size_t h = 0; h < g.pixels(); ++h) {
    if (sets.is_foreground(h, k)) {
      f(static_cast<Eigen::Index>(h % g.rows()), static_cast<Eigen::Index>(h / g.rows())) = 1.0;
    }
  }
  return f;
}

void write_masks(const fs::path& dir, const PerFrameSets& sets) {
  ensure_dir(dir);
  for (std::size_t k = 0; k < sets.frames(); ++k) {
    io::write_pgm(dir / io::frame_name(k + 1, ".mask.pgm"), mask_frame(sets, k), 1);
  }
}

unsigned graymap_maxval(double peak) {
  if (peak <= 255.0) return 255;
  return 65535;
}

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const Video video = io::load_video(a.input);
  PreprocessConfig config;
  config.delta_x = a.shift;
  config.square = parse_square_strategy(a.square);
  const PreprocessResult result = preprocess(video, config);

  const fs::path dir(a.out);
  ensure_dir(dir);
  io::write_tensor(dir / kTensorName, result.video);
  json meta = {{"original", report::to_json(result.original)},
               {"geometry", report::to_json(result.realized)},
               {"delta_x", result.delta_x},
               {"beta", report::round6(result.beta)},
               {"square", to_string(result.square)},
               {"x_black", result.video.x_black},
               {"x_white", result.video.x_white}};
  report::write_json(dir / "metadata.json", meta);
  json m = manifest("preprocess", a.input, a.out);
  m["preprocess"] = {{"shift", a.shift}, {"square", a.square}};
  report::write_json(dir / "manifest.json", m);
  out << meta.dump(2) << '\n';
  return kExitOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const std::size_t frames = a.frames == 0 ? a.rows * a.cols : a.frames;
  const FrameGeometry g(a.rows, a.cols, frames);
  SceneSpec spec;
  if (a.certified) {
    spec = certified_scene(g);
  } else {
    spec.geometry = g;
    spec.rect.p_m = a.p_m;
    spec.rect.p_n = a.p_n;
    spec.rect.speed_x = a.speed_x;
    spec.rect.speed_y = a.speed_y;
    spec.start_row = a.start_row;
    spec.start_col = a.start_col;
    spec.boundary = a.wrap ? Boundary::kWrap : Boundary::kExit;
  }
  spec.x_black = a.x_black;
  spec.x_white = a.x_white;
  spec.v0 = a.v0;
  spec.object_contrast = a.contrast;
  const bool pgm = a.format == "pgm";
  if (!pgm && a.format != "tensor") throw InputError("--format must be tensor or pgm");
  spec.integral_background = a.integral || pgm;
  if (pgm && a.v0 != 1.0) throw InputError("pgm export needs --v0 1 for integral intensities");

  const Scene scene = generate(spec, a.seed);
  const fs::path dir(a.out);
  ensure_dir(dir);
  if (pgm) {
    if (a.x_white > 65535.0) throw InputError("pgm export needs x_white <= 65535");
    const unsigned maxval = graymap_maxval(a.x_white);
    ensure_dir(dir / "frames");
    for (std::size_t k = 0; k < frames; ++k) {
      io::write_pgm(dir / "frames" / io::frame_name(k + 1, ".pgm"), scene.video.frames[k], maxval);
    }
  } else {
    io::write_tensor(dir / kTensorName, scene.video);
  }
  write_masks(dir / "truth_masks", scene.truth);

  RectangleSpec rect = spec.rect;
  rect.p_f = scene.true_pf;
  const DegreeStats fg = foreground_degree_stats(scene.truth);
  const DegreeStats bg = background_degree_stats(scene.truth);
  json truth = {{"geometry", report::to_json(g)},
                {"x_black", spec.x_black},
                {"x_white", spec.x_white},
                {"seed", a.seed},
                {"rectangle", report::to_json(rect)},
                {"start_row", spec.start_row},
                {"start_col", spec.start_col},
                {"boundary", spec.boundary == Boundary::kWrap ? "wrap" : "exit"},
                {"true_pf", scene.true_pf},
                {"foreground_count", scene.truth.foreground_count()},
                {"degrees", {{"foreground_max", fg.max_degree}, {"background_min", bg.min_degree}}},
                {"background", report::to_json(balance(scene.background))}};
  report::write_json(dir / "truth.json", truth);
  json m = manifest("synth", "", a.out);
  m["synth"] = {{"certified", a.certified}, {"format", a.format}, {"contrast", a.contrast},
                {"v0", a.v0}, {"integral", spec.integral_background}};
  m["seeds"] = json::array({a.seed});
  report::write_json(dir / "manifest.json", m);

  json summary = truth;
  summary.erase("background");
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  std::optional<RectangleSpec> rect;
  if (a.p_m || a.p_n) {
    if (!a.p_m || !a.p_n) throw InputError("--pm and --pn must be given together");
    RectangleSpec r;
    r.p_m = *a.p_m;
    r.p_n = *a.p_n;
    r.p_f = a.p_f.value_or(1);
    r.speed_x = a.speed_x;
    r.speed_y = a.speed_y;
    if (!a.p_f && r.speed_x == 0.0 && r.speed_y == 0.0) {
      throw InputError("rectangle mode needs --pf or a speed");
    }
    rect = r;
  }

  CertificateReport cert;
  const bool posteriori = !a.solution.empty() || !a.truth.empty();
  if (posteriori) {
    if (a.input.empty()) throw InputError("--solution/--truth need --input");
    if (!a.solution.empty() && !a.truth.empty()) throw InputError("give --solution or --truth, not both");
    const DataMatrix X = assemble_data_matrix(io::load_video(a.input));
    Decomposition w;
    if (!a.solution.empty()) {
      w = report::decomposition_from_json(report::read_json(a.solution));
    } else {
      w = report::decomposition_from_json(report::read_json(a.truth).at("background"));
    }
    CertifyOptions opts;
    opts.eps_s = a.eps_s;
    opts.eps_c = a.eps_c;
    cert = certify(X, w, opts);
    if (rect) add_rectangle_check(cert, *rect);
  } else {
    if (!rect) throw InputError("certify needs --solution, --truth, or a rectangle (--pm --pn)");
    std::optional<FrameGeometry> g;
    if (!a.input.empty()) {
      g = io::load_video(a.input).geometry();
    } else if (a.rows && a.cols) {
      g = FrameGeometry(*a.rows, *a.cols, a.frames.value_or(*a.rows * *a.cols));
    } else {
      throw InputError("a priori mode needs --input or --rows/--cols");
    }
    std::optional<PerFrameSets> footprint;
    if (a.start_row || a.start_col) {
      footprint = rectangle_footprint(*g, *rect, a.start_row.value_or(0), a.start_col.value_or(0),
                                      Boundary::kExit);
    }
    cert = certify_a_priori(*rect, *g, footprint ? &*footprint : nullptr);
  }

  const json doc = report::to_json(cert);
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    ensure_dir(dir);
    report::write_json(dir / "certificate.json", doc);
    json m = manifest("certify", a.input, a.out);
    m["certify"] = {{"eps_s", a.eps_s}, {"eps_c", a.eps_c}, {"solution", a.solution},
                    {"truth", a.truth}, {"strict", a.strict}};
    if (rect) m["certify"]["rectangle"] = report::to_json(*rect);
    report::write_json(dir / "manifest.json", m);
  }
  out << doc.dump(2) << '\n';
  if (a.strict && !cert.pass()) return kExitCertificateFailed;
  return kExitOk;
}

void write_trace(const fs::path& path, const SolveResult& r, std::size_t stride) {
  std::ofstream f(path);
  if (!f) throw io::IoError("cannot write " + path.string());
  f << "iteration,objective\n";
  char buf[64];
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i * stride, r.objective_trace[i]);
    f << buf;
  }
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  a.config.validate();
  if (a.restarts == 0) throw InputError("--restarts must be at least 1");
  const DataMatrix X = assemble_data_matrix(io::load_video(a.input));
  const FrameGeometry& g = X.geometry();

  json restart_doc;
  SolveResult best;
  std::vector<std::uint64_t> seeds{a.config.seed};
  if (a.restarts > 1) {
    MultiRestartResult mr = multi_restart(X, a.restarts, a.config, a.threads);
    if (mr.results.empty()) {
      std::string why = mr.failures.empty() ? "no run finished" : mr.failures.front().second;
      throw SolverDiverged("every restart failed: " + why);
    }
    seeds = mr.seeds;
    json failures = json::array();
    for (const auto& [seed, msg] : mr.failures) failures.push_back({{"seed", seed}, {"error", msg}});
    restart_doc = {{"restarts", a.restarts},
                   {"completed", mr.results.size()},
                   {"reference_seed", mr.seeds[mr.reference]},
                   {"max_relative_distance", report::round6(mr.max_relative_distance)},
                   {"failures", failures}};
    best = std::move(mr.results[mr.reference]);
  } else {
    best = solve(X, a.config);
  }

  const fs::path dir(a.out);
  ensure_dir(dir);
  const auto [residual, sets] = residual_sets(X, best.w, a.eps_s);
  write_masks(dir / "masks", sets);
  ensure_dir(dir / "background");
  const Matrix background = best.w.u * best.w.v.transpose();
  const unsigned maxval = graymap_maxval(std::max(X.x_white(), background.maxCoeff()));
  for (std::size_t k = 0; k < g.frames(); ++k) {
    Frame f = Eigen::Map<const Matrix>(background.col(static_cast<Eigen::Index>(k)).data(),
                                       static_cast<Eigen::Index>(g.rows()), static_cast<Eigen::Index>(g.cols()));
    f = f.cwiseMax(0.0).cwiseMin(static_cast<double>(maxval));
    io::write_pgm(dir / "background" / io::frame_name(k + 1, ".pgm"), f, maxval);
  }
  report::write_json(dir / "decomposition.json", report::to_json(best.w));
  write_trace(dir / "trace.csv", best, a.config.trace_stride);

  CertifyOptions opts;
  opts.eps_s = a.eps_s;
  opts.eps_c = a.eps_c;
  const CertificateReport cert = certify(X, best.w, opts);
  json doc = {{"geometry", report::to_json(g)},
              {"solver", report::solve_summary(best)},
              {"foreground_count", sets.foreground_count()},
              {"residual_entries", residual.entries.size()},
              {"certificate", report::to_json(cert)}};
  if (!restart_doc.is_null()) doc["multi_restart"] = restart_doc;
  report::write_json(dir / "report.json", doc);

  json m = manifest("solve", a.input, a.out);
  m["solver"] = report::to_json(a.config);
  m["restarts"] = a.restarts;
  m["certify"] = {{"eps_s", a.eps_s}, {"eps_c", a.eps_c}, {"strict", a.strict}};
  m["seeds"] = seeds;
  report::write_json(dir / "manifest.json", m);

  out << doc.dump(2) << '\n';
  if (a.strict && !cert.pass()) return kExitCertificateFailed;
  return kExitOk;
}

void add_solver_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--lambda", a.config.lambda, "Balance regularization weight")->capture_default_str();
  cmd->add_option("--lr", a.config.learning_rate, "Initial step size")->capture_default_str();
  cmd->add_option("--lr-final", a.config.final_learning_rate, "Step size at the last iteration")
      ->capture_default_str();
  cmd->add_option("--decay-start", a.config.decay_start, "Fraction of iterations before the step decays")
      ->capture_default_str();
  cmd->add_option("--momentum", a.config.momentum, "Heavy-ball momentum")->capture_default_str();
  cmd->add_option("--iters", a.config.iterations, "Iterations per run")->capture_default_str();
  cmd->add_option("--batch", a.config.batch, "Sampled entries per step (0 = full)")->capture_default_str();
  cmd->add_option("--seed", a.config.seed, "Seed of the first run")->capture_default_str();
  cmd->add_option("--init-scale", a.config.init_scale, "Scale of the half-normal u0")->capture_default_str();
  cmd->add_option("--trace-stride", a.config.trace_stride, "Objective trace stride")->capture_default_str();
  cmd->add_option("--restarts", a.restarts, "Independent runs with seeds seed, seed+1, ...")
      ->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads (0 = NRPCA_THREADS or all cores)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-1 nonnegative background/foreground decomposition with landscape certificates", "nrpca"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Shift intensities and balance resolution against frames");
  p->add_option("--input", pre.input, "Frame directory or tensor file")->required();
  p->add_option("--out", pre.out, "Output directory")->required();
  p->add_option("--shift", pre.shift, "Intensity shift added to every pixel")->capture_default_str();
  p->add_option("--square", pre.square, "rescale, repeat or none")
      ->check(CLI::IsMember({"rescale", "repeat", "none"}))
      ->capture_default_str();

  SynthArgs syn;
  auto* s = app.add_subcommand("synth", "Generate a moving-rectangle scene with ground truth");
  s->add_option("--out", syn.out, "Output directory")->required();
  s->add_option("--rows", syn.rows, "Frame height")->capture_default_str();
  s->add_option("--cols", syn.cols, "Frame width")->capture_default_str();
  s->add_option("--frames", syn.frames, "Frame count (default rows*cols)");
  s->add_flag("--certified", syn.certified, "Pick a rectangle that passes both sufficient conditions");
  s->add_option("--pm", syn.p_m, "Rectangle height")->capture_default_str();
  s->add_option("--pn", syn.p_n, "Rectangle width")->capture_default_str();
  s->add_option("--speed-x", syn.speed_x, "Columns per frame")->capture_default_str();
  s->add_option("--speed-y", syn.speed_y, "Rows per frame")->capture_default_str();
  s->add_option("--start-row", syn.start_row, "0-based top row in the first frame");
  s->add_option("--start-col", syn.start_col, "0-based left column in the first frame");
  s->add_flag("--wrap", syn.wrap, "Wrap around the frame instead of exiting");
  s->add_option("--contrast", syn.contrast, "Object intensity offset")->capture_default_str();
  s->add_option("--x-black", syn.x_black, "Lower intensity bound")->capture_default_str();
  s->add_option("--x-white", syn.x_white, "Upper intensity bound")->capture_default_str();
  s->add_option("--v0", syn.v0, "Constant frame scaling")->capture_default_str();
  s->add_option("--seed", syn.seed, "Background pattern seed")->capture_default_str();
  s->add_flag("--integral", syn.integral, "Integer background intensities");
  s->add_option("--format", syn.format, "tensor or pgm")
      ->check(CLI::IsMember({"tensor", "pgm"}))
      ->capture_default_str();

  CertifyArgs cer;
  auto* c = app.add_subcommand("certify", "Evaluate the connectivity and identifiability conditions");
  c->add_option("--input", cer.input, "Preprocessed frame directory or tensor file");
  c->add_option("--solution", cer.solution, "decomposition.json from solve");
  c->add_option("--truth", cer.truth, "truth.json from synth");
  c->add_option("--out", cer.out, "Directory for certificate.json");
  c->add_option("--rows", cer.rows, "Frame height (a priori mode without --input)");
  c->add_option("--cols", cer.cols, "Frame width (a priori mode without --input)");
  c->add_option("--frames", cer.frames, "Frame count (a priori mode without --input)");
  c->add_option("--pm", cer.p_m, "Rectangle height");
  c->add_option("--pn", cer.p_n, "Rectangle width");
  c->add_option("--pf", cer.p_f, "Maximum frames any pixel is covered");
  c->add_option("--speed-x", cer.speed_x, "Columns per frame (derives p_f)");
  c->add_option("--speed-y", cer.speed_y, "Rows per frame (derives p_f)");
  c->add_option("--start-row", cer.start_row, "0-based start row; enables footprint checks");
  c->add_option("--start-col", cer.start_col, "0-based start column; enables footprint checks");
  c->add_option("--eps-s", cer.eps_s, "Residual zero tolerance")->capture_default_str();
  c->add_option("--eps-c", cer.eps_c, "Margin below the c bound")->capture_default_str();
  c->add_flag("--strict", cer.strict, "Exit with status 2 when the certificate fails");

  SolveArgs sol;
  auto* v = app.add_subcommand("solve", "Solve for the background and write foreground masks");
  v->add_option("--input", sol.input, "Preprocessed frame directory or tensor file")->required();
  v->add_option("--out", sol.out, "Output directory")->required();
  add_solver_flags(v, sol);
  v->add_option("--eps-s", sol.eps_s, "Residual zero tolerance")->capture_default_str();
  v->add_option("--eps-c", sol.eps_c, "Margin below the c bound")->capture_default_str();
  v->add_flag("--strict", sol.strict, "Exit with status 2 when the certificate fails");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "nrpca: " << e.what() << '\n';
    if (app.get_subcommands().empty()) err << app.help();
    return kExitError;
  }

  try {
    if (p->parsed()) return cmd_preprocess(pre, out);
    if (s->parsed()) return cmd_synth(syn, out);
    if (c->parsed()) return cmd_certify(cer, out);
    if (v->parsed()) return cmd_solve(sol, out);
  } catch (const std::exception& e) {
    err << "nrpca: error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace nrpca::cli

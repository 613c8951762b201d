// rbfd: generate targets, fit RBF decompositions, compute SVD baselines and
// run the experiment suites. All outputs are plain CSV (or RBFM binary / PGM).

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rbfd/rbfd.hpp"

namespace fs = std::filesystem;
using namespace rbfd;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3, kDiverged = 4 };

struct Common {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;

  /// Explicit seed, or a fresh one from the entropy source that is echoed so
  /// the run can be repeated.
  std::uint64_t resolve_seed() {
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      std::fprintf(stderr, "seed: %" PRIu64 "\n", *seed);
    }
    return *seed;
  }
};

void save(const std::string& path, const std::string& content) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_file(path, content);
}

std::string encode_matrix(const std::string& path, const DenseMatrix& m, bool ascii_pgm = false) {
  switch (format_for_path(path)) {
    case MatrixFormat::Binary: return matrix_to_binary(m);
    case MatrixFormat::Pgm: return image_to_pgm(matrix_to_image(m), !ascii_pgm);
    case MatrixFormat::Csv: break;
  }
  return matrix_to_csv(m);
}

void report_file(const std::string& what, const std::string& path, const std::string& content) {
  std::printf("%s -> %s (fnv1a %016" PRIx64 ")\n", what.c_str(), path.c_str(), fnv1a(content));
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  std::string family;
  std::string out;
  std::size_t n = 40, m = 0;
  double p = 0.5;
  std::size_t m_attach = 3;
  std::vector<std::size_t> sizes = {8, 12, 16, 20, 24};
  double p_in = 0.8, p_out = 0.2;
  double delta = 0.0;
  std::size_t dim = 3;
  double length_scale = 1.0;
  std::string input;
};

int cmd_gen(GenArgs& g, Common& c) {
  const auto seed = c.resolve_seed();
  if (g.out.empty()) g.out = g.family + (g.family == "scurve" ? "_points.csv" : ".csv");
  const std::string& f = g.family;

  if (f == "scurve") {
    const auto cloud = s_curve(g.n, g.delta, seed);
    const auto text = point_cloud_to_csv(cloud);
    save(g.out, text);
    std::printf("point cloud %zu x %zu (+ label t)\n", cloud.size(), cloud.dim);
    report_file("points", g.out, text);
    return kOk;
  }

  DenseMatrix matrix;
  std::optional<KExact2> truth;
  if (f == "gaussian") {
    matrix = gaussian_matrix(g.n, g.m ? g.m : g.n, seed);
  } else if (f == "er") {
    matrix = erdos_renyi(g.n, g.p, seed);
  } else if (f == "ba") {
    matrix = barabasi_albert(g.n, g.m_attach, seed);
  } else if (f == "sbm") {
    matrix = sbm(g.sizes, g.p_in, g.p_out, seed);
  } else if (f == "kexact2") {
    truth = k_exact2(g.n, seed);
    matrix = truth->matrix;
  } else if (f == "softdist") {
    const auto cloud = g.input.empty() ? s_curve(g.n, g.delta, seed) : read_point_cloud(g.input);
    matrix = soft_distance_matrix(cloud);
  } else if (f == "gram") {
    matrix = synthetic_gram(g.n, g.dim, g.length_scale, seed);
  } else if (f == "distance") {
    if (g.input.empty()) throw std::invalid_argument("gen distance needs --input <gram matrix>");
    matrix = distance_from_gram(read_matrix(g.input));
  } else {
    throw std::invalid_argument("unknown family '" + f +
                                "' (gaussian, er, ba, sbm, kexact2, scurve, softdist, gram, distance)");
  }

  const auto content = encode_matrix(g.out, matrix);
  save(g.out, content);
  std::printf("matrix %zu x %zu\n", matrix.rows(), matrix.cols());
  report_file("matrix", g.out, content);
  if (truth) {
    const auto stem = fs::path(g.out).replace_extension("").string();
    const auto path = stem + "_truth.csv";
    std::string text = "i,u1,u2\n";
    for (std::size_t i = 0; i < truth->u1.size(); ++i)
      text += std::to_string(i) + "," + format_double(truth->u1[i]) + "," + format_double(truth->u2[i]) + "\n";
    save(path, text);
    report_file("ground truth", path, text);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string input;
  std::string out = "model.csv";
  std::string trace = "trace.csv";
  std::string losses = "run_losses.csv";
  std::size_t r = 1;
  bool symmetric = false;
  std::string optimizer = "adam";
  double lr = 0.1, beta1 = 0.9, beta2 = 0.999, eps = 1e-8, weight_decay = 0.01;
  std::optional<std::size_t> iters;
  std::size_t runs = 100;
  double init_scale = 0.1;
  bool stochastic = false;
  std::size_t minibatch = 0;
  std::optional<double> target_loss;
  std::size_t trace_stride = 100;
};

int cmd_fit(FitArgs& a, Common& c) {
  const auto target = read_matrix(a.input);
  FitConfig cfg;
  cfg.r = a.r;
  cfg.symmetric = a.symmetric;
  cfg.optimizer = {parse_optimizer(a.optimizer), a.lr, a.beta1, a.beta2, a.eps, a.weight_decay};
  cfg.max_iters = a.iters.value_or(10000 * a.r);
  cfg.batch_runs = a.runs;
  cfg.init_scale = a.init_scale;
  cfg.stochastic = a.stochastic;
  cfg.minibatch_size = a.minibatch ? a.minibatch : (a.stochastic ? 8 * target.rows() : 0);
  cfg.target_loss = a.target_loss;
  cfg.trace_stride = a.trace_stride;
  cfg.threads = c.threads;
  cfg.seed = c.resolve_seed();

  const auto report = fit(target, cfg);

  const auto model_text = model_to_csv(report.best_model);
  save(a.out, model_text);
  std::string trace = "iteration,mse\n";
  for (const auto& p : report.loss_trajectory) trace += std::to_string(p.iteration) + "," + format_double(p.loss) + "\n";
  save(a.trace, trace);
  std::string losses = "run,final_mse\n";
  for (std::size_t i = 0; i < report.per_run_final_losses.size(); ++i)
    losses += std::to_string(i) + "," + format_double(report.per_run_final_losses[i]) + "\n";
  save(a.losses, losses);

  std::printf("best mse %s (run %zu of %zu, %zu iterations, %zu diverged)\n", format_double(report.best_loss).c_str(),
              report.best_run, report.per_run_final_losses.size(), report.iterations_used, report.diverged_runs);
  std::printf("params %zu (vectors %zu)\n", param_count(report.best_model), vector_param_count(report.best_model));
  if (cfg.target_loss)
    std::printf("target_loss %s %s\n", format_double(*cfg.target_loss).c_str(),
                report.best_loss <= *cfg.target_loss ? "reached" : "not reached");
  report_file("model", a.out, model_text);
  return kOk;
}

// ---------------------------------------------------------------------------
// svd

struct SvdArgs {
  std::string input;
  std::optional<std::size_t> rank;
  std::optional<std::size_t> curve;
  bool symmetric = false;
  std::string out;
  std::string reconstruction;
};

int cmd_svd(SvdArgs& a, Common&) {
  if (a.rank.has_value() == a.curve.has_value()) throw std::invalid_argument("svd: give exactly one of --rank or --curve");
  const auto target = read_matrix(a.input);
  if (a.curve) {
    const auto curve = a.symmetric ? symmetric_mse_curve(target, *a.curve) : svd_mse_curve(target, *a.curve);
    const auto text = curve_to_csv(curve);
    const auto path = a.out.empty() ? std::string("svd_curve.csv") : a.out;
    save(path, text);
    std::printf("rank %zu mse %s\n", curve.back().first, format_double(curve.back().second).c_str());
    report_file("curve", path, text);
    return kOk;
  }
  const auto approx = a.symmetric ? symmetric_lowrank(target, *a.rank) : truncated_svd(target, *a.rank);
  const auto rec = approx.reconstruct();
  const auto text = svd_to_csv(approx);
  const auto path = a.out.empty() ? std::string("svd.csv") : a.out;
  save(path, text);
  std::printf("rank %zu mse %s params %zu (vectors %zu)\n", approx.rank(),
              format_double(mean_squared_difference(target, rec)).c_str(), approx.param_count(),
              approx.vector_param_count());
  report_file("svd", path, text);
  if (!a.reconstruction.empty()) {
    const auto content = encode_matrix(a.reconstruction, rec);
    save(a.reconstruction, content);
    report_file("reconstruction", a.reconstruction, content);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconstructArgs {
  std::string input;
  std::string out = "reconstruction.csv";
  std::string target;
};

int cmd_reconstruct(ReconstructArgs& a, Common&) {
  const auto lines = detail::read_lines(a.input);
  DenseMatrix rec;
  if (!lines.empty() && detail::trim(lines[0]) == "rank,rows,cols,symmetric")
    rec = svd_from_csv_lines(lines, a.input).reconstruct();
  else
    rec = evaluate_full(model_from_csv_lines(lines, a.input));
  const auto content = encode_matrix(a.out, rec);
  save(a.out, content);
  std::printf("matrix %zu x %zu\n", rec.rows(), rec.cols());
  if (!a.target.empty())
    std::printf("mse %s\n", format_double(mean_squared_difference(read_matrix(a.target), rec)).c_str());
  report_file("reconstruction", a.out, content);
  return kOk;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentArgs {
  std::string suite;
  std::string out_dir = "results";
  std::optional<std::size_t> runs;
  std::optional<std::size_t> iters;
  std::optional<double> lr;
  std::string image;
  bool quiet = false;
};

int cmd_experiment(ExperimentArgs& a, Common& c) {
  experiments::Options opt;
  opt.seed = c.resolve_seed();
  opt.threads = c.threads;
  opt.runs = a.runs;
  opt.iters = a.iters;
  opt.learning_rate = a.lr;
  opt.image_path = a.image;
  if (!a.quiet) opt.log = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };

  const auto out = experiments::run_suite(a.suite, opt);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const auto prefix = (dir / out.suite).string();
  const auto results = experiments::results_csv(out);
  save(prefix + "_results.csv", results);
  save(prefix + "_metrics.csv", experiments::metrics_csv(out));
  save(prefix + "_timing.csv", experiments::timing_csv(out));
  for (const auto& art : out.artifacts) save((dir / art.name).string(), art.content);

  for (const auto& m : out.metrics)
    std::printf("%s %s %s r=%zu %s = %s\n", m.experiment.c_str(), m.dataset.c_str(), m.method.c_str(), m.components,
                m.metric.c_str(), format_double(m.value).c_str());
  report_file("results", prefix + "_results.csv", results);
  return kOk;
}

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
  std::string input;
  std::string output;
  bool ascii = false;
};

int cmd_convert(ConvertArgs& a, Common&) {
  const auto m = read_matrix(a.input);
  const auto content = encode_matrix(a.output, m, a.ascii);
  save(a.output, content);
  std::printf("matrix %zu x %zu\n", m.rows(), m.cols());
  report_file("converted", a.output, content);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RBF matrix decomposition: generation, fitting, SVD baselines and experiment suites"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file; command-line flags win");
  Common common;
  app.add_option("--seed", common.seed, "Root seed (random and printed when omitted)");
  app.add_option("--threads", common.threads, "Worker threads for restarts (0: all cores); results do not depend on it")
      ->capture_default_str();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a target matrix or point cloud");
  gen_cmd->add_option("family", gen.family, "gaussian | er | ba | sbm | kexact2 | scurve | softdist | gram | distance")
      ->required();
  gen_cmd->add_option("--out,-o", gen.out, "Output path (.csv, .bin, .pgm)");
  gen_cmd->add_option("--n", gen.n, "Rows / vertices / points")->capture_default_str();
  gen_cmd->add_option("--m", gen.m, "Columns (gaussian; default n)");
  gen_cmd->add_option("--p", gen.p, "Edge probability (er)")->capture_default_str();
  gen_cmd->add_option("--m-attach", gen.m_attach, "Edges per new vertex (ba)")->capture_default_str();
  gen_cmd->add_option("--sizes", gen.sizes, "Block sizes (sbm)")->delimiter(',');
  gen_cmd->add_option("--p-in", gen.p_in, "Within-block probability (sbm)")->capture_default_str();
  gen_cmd->add_option("--p-out", gen.p_out, "Between-block probability (sbm)")->capture_default_str();
  gen_cmd->add_option("--delta", gen.delta, "Noise standard deviation (scurve, softdist)")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "Point dimension (gram)")->capture_default_str();
  gen_cmd->add_option("--length-scale", gen.length_scale, "Kernel length scale (gram)")->capture_default_str();
  gen_cmd->add_option("--input", gen.input, "Point cloud (softdist) or Gram matrix (distance)");

  FitArgs fa;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an RBF decomposition with batched restarts");
  fit_cmd->add_option("matrix", fa.input, "Target matrix (.csv, .bin, .pgm)")->required();
  fit_cmd->add_option("--r", fa.r, "Number of components")->capture_default_str();
  fit_cmd->add_flag("--symmetric", fa.symmetric, "Tie row and column vectors (square targets)");
  fit_cmd->add_option("--optimizer", fa.optimizer, "adam | adamw | adagrad")->capture_default_str();
  fit_cmd->add_option("--lr", fa.lr, "Learning rate")->capture_default_str();
  fit_cmd->add_option("--beta1", fa.beta1)->capture_default_str();
  fit_cmd->add_option("--beta2", fa.beta2)->capture_default_str();
  fit_cmd->add_option("--eps", fa.eps)->capture_default_str();
  fit_cmd->add_option("--weight-decay", fa.weight_decay, "AdamW decay on component vectors")->capture_default_str();
  fit_cmd->add_option("--iters", fa.iters, "Iterations per run (default 10000 r)");
  fit_cmd->add_option("--runs", fa.runs, "Independent restarts")->capture_default_str();
  fit_cmd->add_option("--init-scale", fa.init_scale, "Std of initial vector entries")->capture_default_str();
  fit_cmd->add_flag("--stochastic", fa.stochastic, "Mini-batch gradients over random entries");
  fit_cmd->add_option("--minibatch", fa.minibatch, "Entries per step (default 8 n)");
  fit_cmd->add_option("--target-loss", fa.target_loss, "Stop a run once its MSE is at or below this");
  fit_cmd->add_option("--trace-stride", fa.trace_stride, "Iterations between trace points")->capture_default_str();
  fit_cmd->add_option("--out,-o", fa.out, "Best model")->capture_default_str();
  fit_cmd->add_option("--trace", fa.trace, "Loss trajectory of the best run")->capture_default_str();
  fit_cmd->add_option("--losses", fa.losses, "Final loss of every run")->capture_default_str();

  SvdArgs sa;
  auto* svd_cmd = app.add_subcommand("svd", "Truncated SVD baseline or its error curve");
  svd_cmd->add_option("matrix", sa.input, "Target matrix")->required();
  svd_cmd->add_option("--rank", sa.rank, "Rank of the truncation");
  svd_cmd->add_option("--curve", sa.curve, "Write MSE for ranks 1..N");
  svd_cmd->add_flag("--symmetric", sa.symmetric, "Eigen variant for symmetric targets");
  svd_cmd->add_option("--out,-o", sa.out, "Output path (default svd.csv or svd_curve.csv)");
  svd_cmd->add_option("--reconstruction", sa.reconstruction, "Also write the rank-r reconstruction");

  ReconstructArgs ra;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Evaluate a model or SVD file into a matrix");
  rec_cmd->add_option("model", ra.input, "Model or SVD CSV")->required();
  rec_cmd->add_option("--out,-o", ra.out, "Output matrix (.csv, .bin, .pgm)")->capture_default_str();
  rec_cmd->add_option("--target", ra.target, "Print the MSE against this matrix");

  ExperimentArgs ea;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a paired RBF-vs-SVD experiment suite");
  exp_cmd->add_option("suite", ea.suite, "kexact2 | gaussian | graphs | sbm | scurve | edges | image | gram")
      ->required();
  exp_cmd->add_option("--out-dir", ea.out_dir, "Directory for result tables and artifacts")->capture_default_str();
  exp_cmd->add_option("--runs", ea.runs, "Override restarts per fit");
  exp_cmd->add_option("--iters", ea.iters, "Override iterations per run");
  exp_cmd->add_option("--lr", ea.lr, "Override learning rate");
  exp_cmd->add_option("--image", ea.image, "Input image for the image suite (PGM/PPM)");
  exp_cmd->add_flag("--quiet", ea.quiet, "No progress lines");

  ConvertArgs ca;
  auto* conv_cmd = app.add_subcommand("convert", "Convert between CSV, RBFM binary and PGM");
  conv_cmd->add_option("input", ca.input)->required();
  conv_cmd->add_option("output", ca.output)->required();
  conv_cmd->add_flag("--ascii", ca.ascii, "Write PGM as P2 text");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, common);
    if (fit_cmd->parsed()) return cmd_fit(fa, common);
    if (svd_cmd->parsed()) return cmd_svd(sa, common);
    if (rec_cmd->parsed()) return cmd_reconstruct(ra, common);
    if (exp_cmd->parsed()) return cmd_experiment(ea, common);
    if (conv_cmd->parsed()) return cmd_convert(ca, common);
  } catch (const AllRunsDivergedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDiverged;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kUsage;
}

// Command-line entry point: featurize program graphs, generate synthetic
// data, train/cross-validate the architectures, run the sweeps, and convert
// sweep reports between formats. Every run is fully determined by its
// resolved configuration and seed, which are echoed into each report.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flawnet/flawnet.hpp"

namespace fs = std::filesystem;
using namespace flawnet;

namespace {

struct ModelFlags {
  std::string arch = "corrnet";
  std::size_t width = 50;
  std::size_t depth = 1;
  std::string lambda = "0.1";
  std::string init = "default";
  std::size_t epochs = 100;
  std::size_t batch_size = 256;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  bool augment_train = false;
  std::string data;
  std::string match;  // parity-match the baseline against this architecture
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--arch", f.arch, "Architecture: corrnet|jae|bidnn|baseline")
      ->capture_default_str();
  cmd->add_option("--width", f.width, "Nodes per layer")->capture_default_str();
  cmd->add_option("--depth", f.depth, "Layers per stage")->capture_default_str();
  cmd->add_option("--lambda", f.lambda, "Correlation weight (number or 'auto'; corrnet only)")
      ->capture_default_str();
  cmd->add_option("--init", f.init, "Init scheme: default|kaiming|xavier|lsuv|constant[:c]")
      ->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "Training epochs per phase")->capture_default_str();
  cmd->add_option("--batch-size", f.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--lr", f.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed")->capture_default_str();
  cmd->add_flag("--augment-train", f.augment_train,
                "Triple the training rows with zero-modality copies");
  cmd->add_option("--data", f.data, "Dataset CSV")->required();
  cmd->add_option("--match", f.match,
                  "Baseline only: parity-match the width against this architecture's "
                  "parameter count (corrnet|jae|bidnn)");
}

ArchConfig to_config(const ModelFlags& f) {
  ArchConfig cfg;
  cfg.kind = parse_arch_kind(f.arch);
  cfg.layer_width = f.width;
  cfg.layer_depth = f.depth;
  if (f.lambda == "auto") {
    cfg.lambda_auto = true;
  } else {
    try {
      cfg.lambda = std::stod(f.lambda);
    } catch (const std::exception&) {
      throw ConfigError("invalid --lambda value '" + f.lambda + "'");
    }
  }
  cfg.init = parse_init_scheme(f.init);
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch_size;
  cfg.learning_rate = f.lr;
  cfg.seed = f.seed;
  cfg.augment_train = f.augment_train;
  return cfg;
}

/// Resolves --match by replacing the baseline width with the parity match.
ArchConfig resolve_match(ArchConfig cfg, const std::string& match,
                         const BimodalDataset& ds) {
  if (match.empty()) return cfg;
  if (cfg.kind != ArchKind::Baseline)
    throw ConfigError("--match applies only to --arch baseline");
  ArchConfig ref = cfg;
  ref.kind = parse_arch_kind(match);
  if (ref.kind == ArchKind::Baseline)
    throw ConfigError("--match must name a multimodal architecture");
  ref.dim_x = ds.dim_x();
  ref.dim_y = ds.dim_y();
  MultimodalModel target = build_model(ref);
  MultimodalModel matched = build_baseline_matched(ref, model_param_count(target));
  cfg.layer_width = matched.config.layer_width;
  return cfg;
}

bool color_enabled() {
  return std::getenv("NO_COLOR") == nullptr && isatty(fileno(stdout));
}

std::string emph(const std::string& s) {
  return color_enabled() ? "\033[1m" + s + "\033[0m" : s;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
}

int cmd_featurize(const std::string& input, const std::string& output) {
  const auto graphs = parse_graph_json(input);
  const BimodalDataset ds = featurize_graphs(graphs);
  write_dataset_csv(ds, output);
  std::cout << "featurized " << ds.size() << " functions into " << ds.dim_x()
            << " features -> " << output << '\n';
  return 0;
}

int cmd_synth(const SynthConfig& cfg, const std::string& output) {
  const BimodalDataset ds = gen_synthetic(cfg);
  write_dataset_csv(ds, output);
  std::cout << "generated " << ds.size() << " instances (" << ds.dim_x() << "+" << ds.dim_y()
            << " features) -> " << output << '\n';
  return 0;
}

int cmd_train(const ModelFlags& flags, std::size_t fold_index, const std::string& out_dir) {
  const BimodalDataset ds = load_dataset_csv(flags.data);
  ArchConfig cfg = resolve_match(to_config(flags), flags.match, ds);
  const FoldPlan plan = make_folds(ds.size(), cfg.seed);
  if (fold_index >= plan.folds.size())
    throw ConfigError("--fold must be in [0, " + std::to_string(plan.folds.size() - 1) + "]");
  const Fold& fold = plan.folds[fold_index];
  const NormStats stats = fit_normalization(ds, fold.train);
  const BimodalDataset nds = apply_normalization(ds, stats);
  TrainOutcome outcome = train_model_full(cfg, nds, fold);
  ensure_dir(out_dir);
  write_json_file(out_dir + "/train_report.json", to_json(outcome.report));
  save_model(outcome.model, out_dir + "/model.json");
  std::cout << emph("test balanced accuracy: ")
            << outcome.report.test_balanced_accuracy << '\n'
            << "report -> " << out_dir << "/train_report.json\n";
  return 0;
}

int cmd_cv(const ModelFlags& flags, const std::string& out_dir) {
  const BimodalDataset ds = load_dataset_csv(flags.data);
  ArchConfig cfg = resolve_match(to_config(flags), flags.match, ds);
  const CvReport cv = run_cv(cfg, ds, cfg.seed);
  ensure_dir(out_dir);
  write_json_file(out_dir + "/cv_report.json", to_json(cv));
  std::cout << emph("mean test balanced accuracy: ") << cv.mean_test_balanced_accuracy
            << " +/- " << cv.std_test_balanced_accuracy << '\n';
  if (cfg.kind == ArchKind::CorrNet && cfg.lambda_auto)
    for (std::size_t f = 0; f < cv.folds.size(); ++f)
      std::cout << "fold " << f << " auto lambda: " << cv.folds[f].lambda_resolved << '\n';
  std::cout << "report -> " << out_dir << "/cv_report.json\n";
  return 0;
}

int cmd_sweep(const ModelFlags& flags, const std::string& kind_str, std::size_t threads,
              const std::string& out_dir) {
  const SweepKind kind = parse_sweep_kind(kind_str);
  const BimodalDataset ds = load_dataset_csv(flags.data);
  const ArchConfig base = to_config(flags);
  const SweepTable table = run_sweep(kind, ds, base, base.seed, threads);
  ensure_dir(out_dir);
  const std::string stem = out_dir + "/sweep_" + to_string(kind);
  write_json_file(stem + ".json", to_json(table));
  write_text_file(stem + ".csv", sweep_to_csv(table));
  write_text_file(stem + ".md", sweep_to_markdown(table));
  std::cout << sweep_to_markdown(table) << "reports -> " << stem << ".{json,csv,md}\n";
  return 0;
}

int cmd_report(const std::string& input, const std::string& format, const std::string& out_dir) {
  const SweepTable table = load_sweep_json(input);
  ensure_dir(out_dir);
  const std::string stem = out_dir + "/sweep_" + to_string(table.kind);
  if (format == "csv") {
    write_text_file(stem + ".csv", sweep_to_csv(table));
    std::cout << "report -> " << stem << ".csv\n";
  } else if (format == "markdown") {
    write_text_file(stem + ".md", sweep_to_markdown(table));
    std::cout << "report -> " << stem << ".md\n";
  } else {
    throw ConfigError("unknown report format '" + format + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal flaw prediction toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Structured config file; command-line flags override it");
  app.allow_config_extras(false);

  std::string feat_in, feat_out;
  auto* featurize = app.add_subcommand("featurize", "Convert program graphs to a feature CSV");
  featurize->add_option("graphs", feat_in, "Graph interchange JSON")->required();
  featurize->add_option("-o,--output", feat_out, "Output CSV path")->required();

  SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic bimodal dataset");
  synth->add_option("--n", synth_cfg.n, "Instances")->capture_default_str();
  synth->add_option("--latent-dim", synth_cfg.latent_dim, "Shared latent dimension")
      ->capture_default_str();
  synth->add_option("--dim-x", synth_cfg.dim_x, "Source-modality features")
      ->capture_default_str();
  synth->add_option("--dim-y", synth_cfg.dim_y, "Binary-modality features")
      ->capture_default_str();
  synth->add_option("--noise-x", synth_cfg.noise_x, "Noise level on x")->capture_default_str();
  synth->add_option("--noise-y", synth_cfg.noise_y, "Noise level on y")->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed, "Seed")->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Output CSV path")->required();

  ModelFlags train_flags;
  std::size_t train_fold = 0;
  std::string train_out;
  auto* train = app.add_subcommand("train", "Train one model on one fold");
  add_model_flags(train, train_flags);
  train->add_option("--fold", train_fold, "Fold index (0-4)")->capture_default_str();
  train->add_option("-o,--output", train_out, "Report directory")->required();

  ModelFlags cv_flags;
  std::string cv_out;
  auto* cv = app.add_subcommand("cv", "5-fold cross validation");
  add_model_flags(cv, cv_flags);
  cv->add_option("-o,--output", cv_out, "Report directory")->required();

  ModelFlags sweep_flags;
  std::string sweep_kind, sweep_out;
  std::size_t sweep_threads = 1;
  auto* sweep = app.add_subcommand("sweep", "Run one of the ablation sweeps");
  add_model_flags(sweep, sweep_flags);
  sweep->add_option("--kind", sweep_kind, "size|init|lambda|singlemulti")->required();
  sweep->add_option("--threads", sweep_threads, "Parallel sweep cells")->capture_default_str();
  sweep->add_option("-o,--output", sweep_out, "Report directory")->required();

  std::string report_in, report_format = "markdown", report_out;
  auto* report = app.add_subcommand("report", "Re-emit a sweep report in another format");
  report->add_option("--in", report_in, "Sweep report JSON")->required();
  report->add_option("--format", report_format, "csv|markdown")->capture_default_str();
  report->add_option("-o,--output", report_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*featurize) return cmd_featurize(feat_in, feat_out);
    if (*synth) return cmd_synth(synth_cfg, synth_out);
    if (*train) return cmd_train(train_flags, train_fold, train_out);
    if (*cv) return cmd_cv(cv_flags, cv_out);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_kind, sweep_threads, sweep_out);
    if (*report) return cmd_report(report_in, report_format, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

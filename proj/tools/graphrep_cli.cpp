// Command-line front end: format, decompose, train, kernel, evaluate and the
// chained pipeline. Exit codes: 0 ok, 1 user error, 2 internal error. Errors
// are reported on stderr as a single line `error: <kind>: <message>`.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "graphrep/error.hpp"
#include "graphrep/log.hpp"
#include "graphrep/pipeline.hpp"

namespace {

using namespace graphrep;

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << "error: " << kind << ": " << one_line(message) << '\n';
  return code;
}

// The option only documents --config; expand_config consumes it before
// parsing.
CLI::App* with_config(CLI::App* sub) {
  static std::string unused;
  sub->add_option("--config", unused, "TOML key = value file; flags override it");
  return sub;
}

// Rewrites `<sub> ... --config FILE ...` into `<sub> --key=value ... ...` so
// config values act like flags given first. Options keep their last value,
// so explicit flags win. Keys must name options of the subcommand, either at
// top level or under a [<sub>] section.
std::vector<std::string> expand_config(const CLI::App& app, int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::size_t sub_pos = 0;
  const CLI::App* sub = nullptr;
  for (std::size_t i = 1; i < args.size() && !sub; ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      sub = app.get_subcommand_no_throw(args[i]);
      sub_pos = i;
    }
  }
  if (!sub) return args;
  std::string path;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  if (!std::filesystem::is_regular_file(path)) {
    throw IngestionError("config file " + path + " does not exist");
  }
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::Error& e) {
    throw ParseError(path + ": " + e.what());
  }
  std::vector<std::string> expanded;
  for (const auto& item : items) {
    // Section markers, and the echo of --config in saved configs.
    if (item.name == "++" || item.name == "--" || item.name == "config") continue;
    if (!item.parents.empty() &&
        (item.parents.size() != 1 || item.parents.front() != sub->get_name())) {
      throw ConfigError(path + ": unknown config key '" + item.fullname() + "'");
    }
    if (sub->get_option_no_throw("--" + item.name) == nullptr) {
      throw ConfigError(path + ": unknown config key '" + item.name + "'");
    }
    for (const auto& value : item.inputs) expanded.push_back("--" + item.name + "=" + value);
    if (item.inputs.empty()) expanded.push_back("--" + item.name);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_pos + 1), expanded.begin(),
              expanded.end());
  return args;
}

void save_resolved(const CLI::App* sub, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / (sub->get_name() + ".config.toml"), std::ios::binary);
  out << sub->config_to_str(true, false);
}

void add_decompose_options(CLI::App* sub, DecomposeParams& p) {
  sub->add_option("--method", p.method, "wl, sp, graphlet or aw")
      ->check(CLI::IsMember({"wl", "sp", "graphlet", "aw"}))
      ->capture_default_str();
  sub->add_option("--wl-depth", p.wl_depth, "WL iterations")->capture_default_str();
  sub->add_flag("--include-depth0,!--no-depth0", p.include_depth0, "emit raw-label tokens")
      ->capture_default_str();
  sub->add_option("--graphlet-size", p.graphlet_size, "graphlet nodes (2-8)")->capture_default_str();
  sub->add_option("--graphlet-samples", p.graphlet_samples, "graphlets per graph")
      ->capture_default_str();
  sub->add_option("--walk-length,--length", p.walk_length, "anonymous walk edges")->capture_default_str();
  sub->add_option("--budget", p.walk_budget, "max walks per graph")->capture_default_str();
}

void add_train_options(CLI::App* sub, TrainParams& p, std::string& optimizer,
                       std::string& reduction, double& min_lr) {
  sub->add_option("--dim", p.dim, "embedding dimension")->capture_default_str();
  sub->add_option("--epochs", p.train.epochs)->capture_default_str();
  sub->add_option("--batch-size", p.train.batch_size)->capture_default_str();
  sub->add_option("--lr", p.train.initial_lr, "initial learning rate")->capture_default_str();
  sub->add_option("--min-lr", min_lr, "final learning rate (default 1e-4 * lr)");
  sub->add_option("--negatives", p.train.negatives, "negative samples per pair")
      ->capture_default_str();
  sub->add_option("--window", p.train.window, "context window (sgns, pvdm)")
      ->capture_default_str();
  sub->add_option("--min-count", p.min_count, "drop rarer patterns")->capture_default_str();
  sub->add_option("--noise-exponent", p.noise_exponent, "unigram noise exponent")
      ->capture_default_str();
  sub->add_option("--optimizer", optimizer)->capture_default_str();
  sub->add_option("--reduction", reduction, "per-row batch gradient: row-mean or sum")
      ->capture_default_str();
  sub->add_flag("--hogwild", p.train.hogwild, "lock-free parallel training (non-deterministic)");
}

void apply_train_extras(TrainParams& p, const std::string& optimizer,
                        const std::string& reduction, double min_lr) {
  p.train.optimizer = parse_optimizer(optimizer);
  p.train.reduction = parse_reduction(reduction);
  if (min_lr > 0.0) p.train.min_lr = min_lr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed representations of graphs from substructure patterns"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  bool quiet = false;
  bool verbose = false;
  app.add_flag("-q,--quiet", quiet, "suppress warnings");
  app.add_flag("-v,--verbose", verbose, "progress messages");

  std::uint64_t seed = 0;
  std::size_t threads = 1;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--threads", threads, "worker threads; 1 is the deterministic path")
        ->capture_default_str();
  };

  // format
  std::string input_dir;
  std::string name;
  std::string output_dir;
  auto* format = with_config(app.add_subcommand("format", "TU-Dortmund files -> GEXF + manifest"));
  format->add_option("--input", input_dir, "directory with <name>_A.txt etc.")->required();
  format->add_option("--name", name, "dataset name")->required();
  format->add_option("--output", output_dir)->required();
  add_common(format);

  // decompose
  std::string dataset_dir;
  DecomposeParams decompose_params;
  auto* decompose = with_config(app.add_subcommand("decompose", "induce pattern documents"));
  decompose->add_option("--dataset", dataset_dir, "formatted dataset directory")->required();
  add_decompose_options(decompose, decompose_params);
  add_common(decompose);

  // train
  std::string extension;
  std::string out_dir;
  TrainParams train_params;
  std::string optimizer = "sgd";
  std::string reduction = "row-mean";
  double min_lr = -1.0;
  auto* train = with_config(app.add_subcommand("train", "learn embeddings from documents"));
  train->add_option("--dataset", dataset_dir)->required();
  train->add_option("--extension", extension, "document extension, e.g. wld2")->required();
  train->add_option("--model", train_params.model, "sgns, pvdbow or pvdm")
      ->check(CLI::IsMember({"sgns", "pvdbow", "pvdm"}))
      ->capture_default_str();
  train->add_option("--out", out_dir)->required();
  add_train_options(train, train_params, optimizer, reduction, min_lr);
  add_common(train);

  // kernel
  KernelParams kernel_params;
  double gamma = -1.0;
  std::string embeddings;
  auto* kernel = with_config(app.add_subcommand("kernel", "build a graph kernel matrix"));
  kernel->add_option("--dataset", dataset_dir)->required();
  kernel->add_option("--extension", extension)->required();
  kernel->add_option("--type", kernel_params.type, "linear, rbf or deep")
      ->check(CLI::IsMember({"linear", "rbf", "deep"}))
      ->capture_default_str();
  kernel->add_option("--gamma", gamma, "rbf width (default: median heuristic)");
  kernel->add_option("--embeddings", embeddings, "pattern_embeddings.json for the deep kernel");
  kernel->add_option("--out", out_dir)->required();
  add_common(kernel);

  // evaluate
  std::string representation;
  EvaluateParams evaluate_params;
  auto* evaluate = with_config(app.add_subcommand("evaluate", "repeated k-fold k-NN accuracy"));
  evaluate->add_option("--dataset", dataset_dir)->required();
  evaluate->add_option("--input", representation, "kernel .csv or graph embedding .json")
      ->required();
  evaluate->add_option("--folds", evaluate_params.folds)->capture_default_str();
  evaluate->add_option("--repeats", evaluate_params.repeats)->capture_default_str();
  evaluate->add_option("--k-neighbors", evaluate_params.k_neighbors)->capture_default_str();
  evaluate->add_option("--out", out_dir)->required();
  add_common(evaluate);

  // pipeline
  PipelineConfig pipeline_config;
  std::string pipeline_optimizer = "sgd";
  std::string pipeline_reduction = "row-mean";
  double pipeline_min_lr = -1.0;
  double pipeline_gamma = -1.0;
  auto* pipeline = with_config(app.add_subcommand("pipeline", "format -> ... -> evaluate"));
  pipeline->add_option("--input", input_dir)->required();
  pipeline->add_option("--name", name)->required();
  pipeline->add_option("--output", output_dir)->required();
  add_decompose_options(pipeline, pipeline_config.decompose);
  pipeline->add_option("--model", pipeline_config.model, "none, sgns, pvdbow or pvdm")
      ->check(CLI::IsMember({"none", "sgns", "pvdbow", "pvdm"}))
      ->capture_default_str();
  add_train_options(pipeline, pipeline_config.train, pipeline_optimizer, pipeline_reduction,
                    pipeline_min_lr);
  pipeline->add_option("--kernel", pipeline_config.kernel, "none, linear, rbf or deep")
      ->check(CLI::IsMember({"none", "linear", "rbf", "deep"}))
      ->capture_default_str();
  pipeline->add_option("--gamma", pipeline_gamma, "rbf width (default: median heuristic)");
  pipeline->add_option("--evaluate-on", pipeline_config.evaluate_on, "kernel or embeddings")
      ->check(CLI::IsMember({"kernel", "embeddings"}))
      ->capture_default_str();
  pipeline->add_option("--folds", pipeline_config.evaluate.folds)->capture_default_str();
  pipeline->add_option("--repeats", pipeline_config.evaluate.repeats)->capture_default_str();
  pipeline->add_option("--k-neighbors", pipeline_config.evaluate.k_neighbors)
      ->capture_default_str();
  add_common(pipeline);

  try {
    const auto args = expand_config(app, argc, argv);
    std::vector<const char*> raw;
    for (const auto& a : args) raw.push_back(a.c_str());
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const graphrep::Error& e) {
    return fail(e.kind(), e.what(), 1);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 1);
  }

  log::set_level(quiet ? log::Level::kQuiet : verbose ? log::Level::kInfo : log::Level::kWarn);

  try {
    if (*format) {
      const auto manifest = format_dataset(input_dir, name, output_dir, threads);
      std::cout << "formatted " << manifest.entries.size() << " graphs into " << output_dir
                << '\n';
    } else if (*decompose) {
      decompose_params.seed = seed;
      decompose_params.threads = threads;
      const auto out = run_decompose(dataset_dir, decompose_params);
      std::cout << "wrote " << out.documents << " ." << out.extension << " documents, "
                << out.vocabulary << " patterns (" << out.vocab_path.string() << ")\n";
    } else if (*train) {
      apply_train_extras(train_params, optimizer, reduction, min_lr);
      train_params.train.seed = seed;
      train_params.train.threads = threads;
      const auto out = run_train(dataset_dir, extension, train_params, out_dir);
      save_resolved(train, out_dir);
      std::cout << "final epoch loss " << out.result.epoch_loss.back() << "; wrote "
                << out.embeddings_path.string() << '\n';
    } else if (*kernel) {
      if (gamma > 0.0) kernel_params.gamma = gamma;
      kernel_params.pattern_embeddings = embeddings;
      kernel_params.threads = threads;
      const auto out = run_kernel(dataset_dir, extension, kernel_params, out_dir);
      save_resolved(kernel, out_dir);
      std::cout << "wrote " << out.kernel_path.string() << " (" << out.kernel.size() << " graphs)\n";
    } else if (*evaluate) {
      evaluate_params.seed = seed;
      const auto report = run_evaluate(dataset_dir, representation, evaluate_params, out_dir);
      save_resolved(evaluate, out_dir);
      std::cout << report_table(report);
    } else if (*pipeline) {
      pipeline_config.input_dir = input_dir;
      pipeline_config.dataset_name = name;
      pipeline_config.output_dir = output_dir;
      pipeline_config.seed = seed;
      pipeline_config.threads = threads;
      apply_train_extras(pipeline_config.train, pipeline_optimizer, pipeline_reduction,
                         pipeline_min_lr);
      pipeline_config.train.train.threads = threads;
      if (pipeline_gamma > 0.0) pipeline_config.gamma = pipeline_gamma;
      std::cout << report_table(run_pipeline(pipeline_config));
    }
  } catch (const graphrep::Error& e) {
    return fail(e.kind(), e.what(), e.user_error() ? 1 : 2);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("io", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
  return 0;
}

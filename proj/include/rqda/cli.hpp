#ifndef RQDA_CLI_HPP
#define RQDA_CLI_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rqda/csv.hpp"
#include "rqda/ensemble.hpp"
#include "rqda/error.hpp"
#include "rqda/model_io.hpp"
#include "rqda/synthdata.hpp"

// Batch command-line front end: synth, train, predict, eval, bayes-risk.
// Every failure is reported as a single "error: ..." line with exit code 1.
namespace rqda::cli {

struct ScenarioFlags {
  Eigen::Index p = 5;
  double pi1 = 0.5;
  std::string scenario = "random";
  std::string marginal = "identity";
  std::string breakpoints;
  std::uint64_t seed = 0;
};

inline void add_scenario_flags(CLI::App& cmd, ScenarioFlags& f) {
  cmd.add_option("--p", f.p, "Number of features")->check(CLI::PositiveNumber);
  cmd.add_option("--pi1", f.pi1, "Prior probability of class 1, strictly inside (0, 1)");
  cmd.add_option("--scenario", f.scenario, "Class correlation structure")
      ->check(CLI::IsMember({"random", "null", "contrast"}));
  cmd.add_option("--marginal", f.marginal, "Marginal map applied to every feature")
      ->check(CLI::IsMember({"identity", "exp", "cube", "breakpoints", "mixed"}));
  cmd.add_option("--breakpoints", f.breakpoints, "Knots 'x:y,x:y,...' for --marginal breakpoints");
  cmd.add_option("--seed", f.seed, "Master seed")->required();
}

inline MarginalMap parse_breakpoints(const std::string& text) {
  std::vector<double> xs, ys;
  std::stringstream ss(text);
  std::string knot;
  while (std::getline(ss, knot, ',')) {
    const auto colon = knot.find(':');
    if (colon == std::string::npos) {
      throw ContractError("breakpoint knots must be written as x:y");
    }
    try {
      xs.push_back(std::stod(knot.substr(0, colon)));
      ys.push_back(std::stod(knot.substr(colon + 1)));
    } catch (const std::exception&) {
      throw ContractError("invalid breakpoint knot '" + knot + "'");
    }
  }
  return MarginalMap::piecewise(std::move(xs), std::move(ys));
}

// Sub-stream layout under the master seed.
enum StreamId : std::uint64_t { kSigmaStream = 0, kTrainStream = 1, kTestStream = 2, kRiskStream = 3 };

inline ScenarioSpec build_scenario(const ScenarioFlags& f) {
  ScenarioSpec spec;
  spec.p = f.p;
  spec.pi1 = f.pi1;
  spec.seed = f.seed;
  RandomStream rng(derive_seed(f.seed, {kSigmaStream}));
  if (f.scenario == "random") {
    spec.sigma[0] = random_correlation_matrix(f.p, rng);
    spec.sigma[1] = random_correlation_matrix(f.p, rng);
  } else if (f.scenario == "null") {
    spec.sigma[0] = spec.sigma[1] = random_correlation_matrix(f.p, rng);
  } else {
    spec.sigma = contrast_sigmas(f.p);
  }
  if (f.marginal == "mixed") {
    spec.marginals = mixed_marginals(f.p);
  } else if (f.marginal != "identity") {
    MarginalMap m;
    if (f.marginal == "exp") {
      m = MarginalMap::exponential();
    } else if (f.marginal == "cube") {
      m = MarginalMap::cube();
    } else {
      m = f.breakpoints.empty() ? default_breakpoint_map() : parse_breakpoints(f.breakpoints);
    }
    spec.marginals.assign(static_cast<std::size_t>(f.p), m);
  }
  spec.validate();
  return spec;
}

inline void write_dataset(const Dataset& data, const std::string& path, bool include_latent) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  const Eigen::Index p = data.X.cols();
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < p; ++j) header.push_back("x" + std::to_string(j + 1));
  header.push_back("y");
  if (include_latent) {
    for (Eigen::Index j = 0; j < p; ++j) header.push_back("s" + std::to_string(j + 1));
  }
  csv::write_header(out, header);
  for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      out << csv::format_double(data.X(i, j)) << ',';
    }
    out << data.y[static_cast<std::size_t>(i)];
    if (include_latent) {
      for (Eigen::Index j = 0; j < p; ++j) {
        out << ',' << csv::format_double(data.latent(i, j));
      }
    }
    out << '\n';
  }
  if (!out) {
    throw DataError("failed writing '" + path + "'");
  }
}

inline void print_risk(std::ostream& out, const RiskEstimate& r) {
  out << "bayes_risk " << csv::format_double(r.risk) << " std_error " << csv::format_double(r.std_error) << '\n';
}

struct SynthFlags {
  ScenarioFlags scenario;
  std::size_t n_train = 100;
  std::size_t n_test = 100;
  std::string out_train = "train.csv";
  std::string out_test = "test.csv";
  bool include_latent = false;
  bool fixed_counts = false;
  bool bayes_risk = false;
  std::size_t mc_samples = 200000;
};

inline int cmd_synth(const SynthFlags& f, std::ostream& out) {
  const ScenarioSpec spec = build_scenario(f.scenario);
  RandomStream train_rng(derive_seed(spec.seed, {kTrainStream}));
  RandomStream test_rng(derive_seed(spec.seed, {kTestStream}));
  write_dataset(sample_meta_gaussian(f.n_train, spec, train_rng, f.fixed_counts), f.out_train, f.include_latent);
  write_dataset(sample_meta_gaussian(f.n_test, spec, test_rng, f.fixed_counts), f.out_test, f.include_latent);
  out << "wrote " << f.n_train << " rows to " << f.out_train << '\n';
  out << "wrote " << f.n_test << " rows to " << f.out_test << '\n';
  if (f.bayes_risk) {
    RandomStream risk_rng(derive_seed(spec.seed, {kRiskStream}));
    print_risk(out, monte_carlo_bayes_risk(spec, f.mc_samples, risk_rng));
  }
  return 0;
}

struct BayesRiskFlags {
  ScenarioFlags scenario;
  std::size_t samples = 200000;
};

inline int cmd_bayes_risk(const BayesRiskFlags& f, std::ostream& out) {
  const ScenarioSpec spec = build_scenario(f.scenario);
  RandomStream rng(derive_seed(spec.seed, {kRiskStream}));
  print_risk(out, monte_carlo_bayes_risk(spec, f.samples, rng));
  return 0;
}

struct TrainFlags {
  std::string data;
  std::string label_col = "y";
  Eigen::Index d = 2;
  std::size_t b1 = 100;
  std::size_t b2 = 10;
  std::string projection = "haar";
  std::optional<double> ridge;
  std::string alpha = "auto";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string model_out = "model.json";
};

inline int cmd_train(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  const auto data = csv::split_label(csv::read(f.data), f.label_col);
  EnsembleConfig config;
  config.d = f.d;
  config.b1 = f.b1;
  config.b2 = f.b2;
  config.flavor = *parse_flavor(f.projection);
  config.ridge = f.ridge;
  config.seed = f.seed;
  config.threads = f.threads;
  if (f.alpha != "auto") {
    try {
      std::size_t used = 0;
      config.alpha = std::stod(f.alpha, &used);
      if (used != f.alpha.size()) throw std::invalid_argument(f.alpha);
    } catch (const std::exception&) {
      throw ContractError("--alpha must be 'auto' or a number in [0, 1]");
    }
  }
  const EnsembleModel model = train_ensemble(data.X, data.y, config);
  for (std::size_t b = 0; b < model.blocks.size(); ++b) {
    const auto& blk = model.blocks[b];
    for (int r = 0; r < 2; ++r) {
      if (blk.model.class_count[static_cast<std::size_t>(r)] < static_cast<std::size_t>(config.d) + 1) {
        err << "warning: block " << b << ": class " << r << " has fewer than d+1 samples\n";
      }
    }
    out << "block " << b << " candidate " << blk.candidate << " training_error "
        << csv::format_double(blk.training_error) << '\n';
  }
  out << "alpha " << csv::format_double(model.alpha) << (config.alpha ? " (fixed)" : " (auto)") << '\n';
  save_model(model, f.model_out);
  out << "model written to " << f.model_out << '\n';
  return 0;
}

// Features are every column except the label column, which may be absent.
inline Matrix prediction_features(const EnsembleModel& model, const std::string& path, const std::string& label_col) {
  auto data = csv::split_label(csv::read(path), label_col, false);
  if (static_cast<std::size_t>(data.X.cols()) != model.features()) {
    throw DataError("feature dimension mismatch: model expects p=" + std::to_string(model.features()) +
                    ", data has " + std::to_string(data.X.cols()));
  }
  return std::move(data.X);
}

struct PredictFlags {
  std::string model;
  std::string data;
  std::string out = "predictions.csv";
  std::string label_col = "y";
};

inline int cmd_predict(const PredictFlags& f, std::ostream& out) {
  const EnsembleModel model = load_model(f.model);
  const auto preds = predict(model, prediction_features(model, f.data, f.label_col));
  std::ofstream file(f.out, std::ios::binary);
  if (!file) {
    throw DataError("cannot write '" + f.out + "'");
  }
  file << "pred,vote\n";
  for (const auto& p : preds) {
    file << p.label << ',' << csv::format_double(p.vote) << '\n';
  }
  out << "wrote " << preds.size() << " predictions to " << f.out << '\n';
  return 0;
}

struct EvalFlags {
  std::string model;
  std::string data;
  std::string label_col = "y";
};

inline int cmd_eval(const EvalFlags& f, std::ostream& out) {
  const EnsembleModel model = load_model(f.model);
  const auto data = csv::split_label(csv::read(f.data), f.label_col);
  if (static_cast<std::size_t>(data.X.cols()) != model.features()) {
    throw DataError("feature dimension mismatch: model expects p=" + std::to_string(model.features()) +
                    ", data has " + std::to_string(data.X.cols()));
  }
  const auto preds = predict(model, data.X);
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ++confusion[data.y[i]][preds[i].label];
  }
  const double error = static_cast<double>(confusion[0][1] + confusion[1][0]) / static_cast<double>(preds.size());
  out << "samples " << preds.size() << '\n';
  out << "alpha " << csv::format_double(model.alpha) << '\n';
  out << "test_error " << csv::format_double(error) << '\n';
  out << "confusion true\\pred 0 1\n";
  out << "confusion 0 " << confusion[0][0] << ' ' << confusion[0][1] << '\n';
  out << "confusion 1 " << confusion[1][0] << ' ' << confusion[1][1] << '\n';
  return 0;
}

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Copula-based robust QDA random-projection ensemble classifier", "rqda"};
  app.require_subcommand(1);

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate meta-Gaussian train/test CSV files");
  add_scenario_flags(*synth_cmd, synth.scenario);
  synth_cmd->add_option("--n-train", synth.n_train)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--n-test", synth.n_test)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out-train", synth.out_train);
  synth_cmd->add_option("--out-test", synth.out_test);
  synth_cmd->add_flag("--include-latent", synth.include_latent, "Also write latent scores s1..sp");
  synth_cmd->add_flag("--fixed-counts", synth.fixed_counts, "Exactly round(n*pi1) rows of class 1");
  synth_cmd->add_flag("--bayes-risk", synth.bayes_risk, "Print the Monte Carlo Bayes risk");
  synth_cmd->add_option("--mc-samples", synth.mc_samples)->check(CLI::PositiveNumber);

  BayesRiskFlags risk;
  auto* risk_cmd = app.add_subcommand("bayes-risk", "Monte Carlo Bayes risk of a scenario");
  add_scenario_flags(*risk_cmd, risk.scenario);
  risk_cmd->add_option("--samples", risk.samples)->check(CLI::PositiveNumber);

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Fit an ensemble and write the model file");
  train_cmd->add_option("--data", train.data)->required();
  train_cmd->add_option("--label-col", train.label_col);
  train_cmd->add_option("--d", train.d, "Projected dimension")->check(CLI::PositiveNumber);
  train_cmd->add_option("--b1", train.b1, "Number of blocks")->check(CLI::PositiveNumber);
  train_cmd->add_option("--b2", train.b2, "Candidates per block")->check(CLI::PositiveNumber);
  train_cmd->add_option("--projection", train.projection)->check(CLI::IsMember({"gaussian", "haar", "axis"}));
  train_cmd->add_option("--ridge", train.ridge, "Fixed ridge (default: 1e-6 * trace / d per class)");
  train_cmd->add_option("--alpha", train.alpha, "'auto' or a fixed vote threshold in [0, 1]");
  train_cmd->add_option("--seed", train.seed)->required();
  train_cmd->add_option("--threads", train.threads, "Worker threads (0: all cores)");
  train_cmd->add_option("--model-out", train.model_out);

  PredictFlags pred;
  auto* pred_cmd = app.add_subcommand("predict", "Write pred,vote for each row");
  pred_cmd->add_option("--model", pred.model)->required();
  pred_cmd->add_option("--data", pred.data)->required();
  pred_cmd->add_option("--out", pred.out);
  pred_cmd->add_option("--label-col", pred.label_col, "Ignored column if present");

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Report test error and confusion matrix");
  eval_cmd->add_option("--model", eval.model)->required();
  eval_cmd->add_option("--data", eval.data)->required();
  eval_cmd->add_option("--label-col", eval.label_col);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*risk_cmd) return cmd_bayes_risk(risk, out);
    if (*train_cmd) return cmd_train(train, out, err);
    if (*pred_cmd) return cmd_predict(pred, out);
    if (*eval_cmd) return cmd_eval(eval, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

} // namespace rqda::cli

#endif // RQDA_CLI_HPP

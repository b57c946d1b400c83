// Command-line front end: preprocess / train / evaluate / predict.
//
// Exit codes: 0 success, 1 I/O (including corrupt model files), 2
// configuration or validation, 3 numeric divergence.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aeroforecast/cli.hpp"
#include "aeroforecast/io_util.hpp"
#include "aeroforecast/log.hpp"

namespace {

struct Paths {
  std::string raw_csv;
  std::string windows_csv;
  std::string model_file;
  std::string loss_csv;
  std::string report_dir;
};

struct FlagState {
  std::string split = "0.70,0.15,0.15";
  std::string optimizer = "adam";
};

// All tunables live on the root app so a flat key=value config file can set
// any of them and any subcommand can override them with flags (subcommands
// fall through unmatched flags to the root).
void add_common_options(CLI::App& app, aero::RunConfig& cfg, FlagState& flags,
                        Paths& paths) {
  app.set_config("--config", "", "flat key=value config file; flags override it");
  app.allow_config_extras(false);

  app.add_option("--seed", cfg.train.seed, "rng seed for weights and shuffling")
      ->capture_default_str();
  app.add_option("--epochs", cfg.train.epochs, "training epochs")->capture_default_str();
  app.add_option("--lookback", cfg.lookback, "input windows per sample")
      ->capture_default_str();
  app.add_option("--batch", cfg.train.batch_size, "mini-batch size")
      ->capture_default_str();
  app.add_option("--lr", cfg.train.optimizer.learning_rate, "learning rate")
      ->capture_default_str();
  app.add_option("--optimizer", flags.optimizer, "adam or sgd")->capture_default_str();
  app.add_option("--beta1", cfg.train.optimizer.beta1, "adam beta1")
      ->capture_default_str();
  app.add_option("--beta2", cfg.train.optimizer.beta2, "adam beta2")
      ->capture_default_str();
  app.add_option("--epsilon", cfg.train.optimizer.epsilon, "adam epsilon")
      ->capture_default_str();
  app.add_option("--clip", cfg.train.clip_norm, "global gradient-norm clip, 0 disables")
      ->capture_default_str();
  app.add_option("--split", flags.split, "train,val,test ratios")->capture_default_str();
  app.add_option("--coverage", cfg.aggregate.coverage_threshold,
                 "minimum valid hours per 6-hour window")
      ->capture_default_str();
  app.add_option("--weather-topk", cfg.aggregate.weather_topk,
                 "one-hot encode the k most frequent weather tokens, 0 ignores")
      ->capture_default_str();
  app.add_option("--bins", cfg.bin_width, "histogram bin width in ug/m3")
      ->capture_default_str();
  app.add_option("--filters", cfg.model.conv_filters, "conv output channels")
      ->capture_default_str();
  app.add_option("--kernel", cfg.model.kernel_size, "conv kernel size")
      ->capture_default_str();
  app.add_option("--pool", cfg.model.pool_width, "max-pool width")
      ->capture_default_str();
  app.add_option("--lstm1", cfg.model.lstm1_units, "first LSTM units")
      ->capture_default_str();
  app.add_option("--lstm2", cfg.model.lstm2_units, "second LSTM units")
      ->capture_default_str();
  app.add_option("--dense1", cfg.model.dense1_units, "first dense units")
      ->capture_default_str();
  app.add_option("--dense2", cfg.model.dense2_units, "second dense units")
      ->capture_default_str();
  app.add_option("--loss-csv", paths.loss_csv,
                 "per-epoch loss CSV for train (default: <model_out>.loss.csv)");
  app.add_option("--n-last", cfg.predict_last,
                 "how many trailing blocks predict emits")
      ->capture_default_str();
}

// "0.70,0.15,0.15" -> SplitRatios; validation happens in RunConfig::validate.
aero::SplitRatios parse_split(const std::string& text) {
  std::vector<std::string> parts = aero::split_csv_line(text);
  if (parts.size() != 3) {
    throw aero::ValidationError("--split needs three comma-separated ratios, got '" +
                                text + "'");
  }
  aero::SplitRatios r;
  double* slots[3] = {&r.train, &r.val, &r.test};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = aero::parse_double(parts[i]);
    if (!v) {
      throw aero::ValidationError("bad ratio '" + parts[i] + "' in --split");
    }
    *slots[i] = *v;
  }
  return r;
}

void apply_flags(aero::RunConfig& cfg, const FlagState& flags) {
  cfg.split = parse_split(flags.split);
  std::string kind = aero::to_lower(flags.optimizer);
  if (kind == "adam") {
    cfg.train.optimizer.kind = aero::OptimizerKind::adam;
  } else if (kind == "sgd") {
    cfg.train.optimizer.kind = aero::OptimizerKind::sgd;
  } else {
    throw aero::ValidationError("unknown optimizer '" + flags.optimizer +
                                "' (expected adam or sgd)");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CNN-LSTM toolkit for 6-hour PM2.5 forecasting"};
  app.require_subcommand(1);

  aero::RunConfig cfg;
  FlagState flags;
  Paths paths;
  add_common_options(app, cfg, flags, paths);

  CLI::App* pre = app.add_subcommand(
      "preprocess", "hourly CSV -> cleaned, aggregated, derived window CSV");
  pre->fallthrough();
  pre->add_option("raw_csv", paths.raw_csv, "hourly input CSV")->required();
  pre->add_option("windows_csv", paths.windows_csv, "output window CSV")->required();

  CLI::App* tr = app.add_subcommand("train", "train a model on a window CSV");
  tr->fallthrough();
  tr->add_option("windows_csv", paths.windows_csv, "window CSV from preprocess")
      ->required();
  tr->add_option("model_out", paths.model_file, "output model file")->required();

  CLI::App* ev = app.add_subcommand("evaluate", "test-split metrics and export files");
  ev->fallthrough();
  ev->add_option("windows_csv", paths.windows_csv, "window CSV from preprocess")
      ->required();
  ev->add_option("model_in", paths.model_file, "trained model file")->required();
  ev->add_option("report_dir", paths.report_dir,
                 "directory for forecast.csv, metrics.txt, histogram.csv")
      ->required();

  CLI::App* pr = app.add_subcommand("predict", "print next-window predictions in ug/m3");
  pr->fallthrough();
  pr->add_option("model_in", paths.model_file, "trained model file")->required();
  pr->add_option("windows_csv", paths.windows_csv, "window CSV from preprocess")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_flags(cfg, flags);

    if (pre->parsed()) {
      aero::PreprocessSummary s = aero::run_preprocess(paths.raw_csv, paths.windows_csv, cfg);
      std::cout << aero::preprocess_report_text(s);
      return 0;
    }
    if (tr->parsed()) {
      std::string loss = paths.loss_csv.empty() ? paths.model_file + ".loss.csv"
                                                : paths.loss_csv;
      aero::TrainSummary s = aero::run_train(paths.windows_csv, paths.model_file, loss, cfg);
      std::cout << aero::train_summary_text(s);
      return 0;
    }
    if (ev->parsed()) {
      aero::EvaluateSummary s =
          aero::run_evaluate(paths.windows_csv, paths.model_file, paths.report_dir, cfg);
      std::cout << aero::metrics_text(s);
      return 0;
    }
    if (pr->parsed()) {
      auto preds = aero::run_predict(paths.model_file, paths.windows_csv, cfg.predict_last);
      std::cout << aero::predictions_text(preds);
      return 0;
    }
    return 2;  // unreachable with require_subcommand(1)
  } catch (const aero::TruncationError& e) {
    aero::log_error(e.what());
    return 1;
  } catch (const aero::ChecksumError& e) {
    aero::log_error(e.what());
    return 1;
  } catch (const aero::IoError& e) {
    aero::log_error(e.what());
    return 1;
  } catch (const aero::NumericError& e) {
    aero::log_error(e.what());
    return 3;
  } catch (const aero::Error& e) {
    // validation, dimension, protocol, version and other format errors
    aero::log_error(e.what());
    return 2;
  } catch (const std::exception& e) {
    aero::log_error(e.what());
    return 1;
  }
}

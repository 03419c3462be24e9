// Copyright 2026 The dtmil Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dtmil/cli.h"

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <memory>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "dtmil/data_io.h"
#include "dtmil/dtc.h"
#include "dtmil/errors.h"
#include "dtmil/eval.h"
#include "dtmil/mil_core.h"
#include "dtmil/synthetic.h"
#include "json.hpp"

namespace dtmil {
namespace {

struct GlobalFlags {
  bool verbose = false;
  int threads = 1;
};

void AddHyperFlags(CLI::App* sub, Hyperparams& h, bool with_c = true) {
  if (with_c) {
    sub->add_option("--c1", h.c1, "weight of the ||w||^2 regularizer")
        ->capture_default_str();
    sub->add_option("--c2", h.c2, "weight of the codeword regularizer")
        ->capture_default_str();
  }
  sub->add_option("--kappa", h.kappa, "transfer dictionary size")
      ->capture_default_str();
  sub->add_option("--eta", h.eta, "codeword step size")->capture_default_str();
  sub->add_option("--inner-iters", h.inner_iters,
                  "codeword descent steps per outer iteration")
      ->capture_default_str();
  sub->add_option("--max-outer", h.max_outer, "maximum outer iterations")
      ->capture_default_str();
  sub->add_option("--tol", h.tol, "relative dual change for convergence")
      ->capture_default_str();
  sub->add_option("--r-max", h.r_max, "codeword norm clip")
      ->capture_default_str();
  sub->add_option("--seed", h.seed, "random seed")->capture_default_str();
}

void RequirePositive(int value, const char* name, int minimum = 1) {
  if (value < minimum) {
    throw InvalidInputError(std::string(name) + " must be >= " +
                            std::to_string(minimum));
  }
}

void RequirePositive(double value, const char* name) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw InvalidInputError(std::string(name) + " must be positive");
  }
}

void LogFit(const FitReport& report, bool verbose, std::ostream& err) {
  for (const std::string& warning : report.warnings) {
    err << "warning: " << warning << "\n";
  }
  if (!verbose) return;
  err << std::setprecision(10);
  for (int t = 0; t < report.outer_iterations; ++t) {
    err << "outer " << (t + 1) << ": dual=" << report.dual_values[t]
        << " primal=" << report.primal_values[t] << "\n";
  }
  err << "final dual=" << report.final_dual_value
      << " converged=" << (report.converged ? "true" : "false")
      << " seconds=" << report.wall_time_seconds << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Domain-transfer multi-instance dictionary learning"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags global;
  app.add_flag("-v,--verbose", global.verbose,
               "log per-iteration dual/primal values to stderr");
  app.add_option("--threads", global.threads, "fold-level worker threads")
      ->capture_default_str();

  // synth
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic "
                                                "source/target pair");
  std::string synth_config;
  std::uint64_t synth_seed = 0;
  std::string out_source, out_target;
  synth->add_option("--config", synth_config, "SynthConfig JSON file");
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out-source", out_source)->required();
  synth->add_option("--out-target", out_target)->required();

  // train-source
  CLI::App* train = app.add_subcommand("train-source",
                                       "train the source dictionary and "
                                       "classifier");
  std::string train_data, train_out;
  int train_words = 20;
  double train_c = 1.0;
  std::uint64_t train_seed = 0;
  train->add_option("--data", train_data)->required();
  train->add_option("--words", train_words)->capture_default_str();
  train->add_option("--c", train_c)->capture_default_str();
  train->add_option("--seed", train_seed)->capture_default_str();
  train->add_option("--out", train_out)->required();

  // adapt
  CLI::App* adapt = app.add_subcommand("adapt", "learn the transfer "
                                                "dictionary and adaptation "
                                                "weights");
  std::string adapt_source, adapt_target, adapt_out;
  Hyperparams adapt_hyper;
  adapt->add_option("--source-model", adapt_source)->required();
  adapt->add_option("--target-train", adapt_target)->required();
  AddHyperFlags(adapt, adapt_hyper);
  adapt->add_option("--out", adapt_out)->required();

  // eval
  CLI::App* eval = app.add_subcommand("eval", "accuracy of a model on a "
                                              "labeled dataset");
  std::string eval_model, eval_data, eval_out;
  eval->add_option("--model", eval_model)->required();
  eval->add_option("--data", eval_data)->required();
  eval->add_option("--out", eval_out)->required();

  // protocol
  CLI::App* protocol = app.add_subcommand("protocol", "k-fold transfer "
                                                      "protocol");
  std::string proto_source, proto_target, proto_out;
  int proto_folds = 10;
  Hyperparams proto_hyper;
  SourceTrainingOptions proto_source_opts;
  bool proto_conventional = false;
  bool proto_timing = false;
  protocol->add_option("--source", proto_source)->required();
  protocol->add_option("--target", proto_target)->required();
  protocol->add_option("--folds", proto_folds)->capture_default_str();
  AddHyperFlags(protocol, proto_hyper);
  protocol->add_option("--words", proto_source_opts.words,
                       "source (and target-only baseline) dictionary size")
      ->capture_default_str();
  protocol->add_option("--source-c", proto_source_opts.c,
                       "source (and target-only baseline) regularization")
      ->capture_default_str();
  protocol->add_flag("--conventional", proto_conventional,
                     "train on k-1 folds, test on one");
  protocol->add_flag("--timing", proto_timing,
                     "include per-fold wall time in the report");
  protocol->add_option("--out", proto_out)->required();

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "C1 x C2 sensitivity sweep");
  std::string sweep_source, sweep_target, sweep_out;
  std::vector<double> c1_grid, c2_grid;
  int sweep_folds = 10;
  Hyperparams sweep_hyper;
  SourceTrainingOptions sweep_source_opts;
  sweep->add_option("--source", sweep_source)->required();
  sweep->add_option("--target", sweep_target)->required();
  sweep->add_option("--c1", c1_grid, "comma-separated C1 values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--c2", c2_grid, "comma-separated C2 values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--folds", sweep_folds)->capture_default_str();
  AddHyperFlags(sweep, sweep_hyper, /*with_c=*/false);
  sweep->add_option("--words", sweep_source_opts.words)->capture_default_str();
  sweep->add_option("--source-c", sweep_source_opts.c)->capture_default_str();
  sweep->add_option("--out", sweep_out)->required();

  // embed
  CLI::App* embed = app.add_subcommand("embed", "dump bag-level features");
  std::string embed_model, embed_data, embed_out, embed_dict = "phi";
  embed->add_option("--model", embed_model)->required();
  embed->add_option("--data", embed_data)->required();
  embed->add_option("--dict", embed_dict)
      ->check(CLI::IsMember({"phi", "psi"}))
      ->capture_default_str();
  embed->add_option("--out", embed_out)->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    RequirePositive(global.threads, "--threads");
    ProtocolOptions proto_options;
    proto_options.threads = global.threads;

    if (*synth) {
      SynthConfig config;
      if (!synth_config.empty()) config = ParseSynthConfig(ReadFile(synth_config));
      config.Validate();
      const SynthData data = GenerateSynthetic(config, synth_seed);
      SaveDataset(data.source, out_source);
      SaveDataset(data.target, out_target);
    } else if (*train) {
      RequirePositive(train_words, "--words");
      RequirePositive(train_c, "--c");
      const std::vector<Bag> bags = LoadDataset(train_data);
      SaveModel(TrainSource(bags, train_words, train_c, train_seed), train_out);
    } else if (*adapt) {
      adapt_hyper.Validate();
      const SourceModel source = LoadSourceModel(adapt_source);
      const std::vector<Bag> bags = LoadDataset(adapt_target);
      const FitResult fit = FitDtc(bags, source, adapt_hyper);
      LogFit(fit.report, global.verbose, err);
      SaveModel(fit.model, adapt_out);
    } else if (*eval) {
      const AnyModel model = LoadModel(eval_model);
      const std::vector<Bag> bags = LoadDataset(eval_data);
      const double accuracy = std::visit(
          [&bags](const auto& m) { return Accuracy(m, bags); }, model);
      nlohmann::ordered_json report;
      report["accuracy"] = accuracy;
      report["n"] = bags.size();
      WriteFileAtomic(eval_out, report.dump(2) + "\n");
    } else if (*protocol) {
      proto_hyper.Validate();
      RequirePositive(proto_folds, "--folds", 2);
      RequirePositive(proto_source_opts.words, "--words");
      RequirePositive(proto_source_opts.c, "--source-c");
      const std::vector<Bag> source = LoadDataset(proto_source);
      const std::vector<Bag> target = LoadDataset(proto_target);
      const SourceModel source_model =
          TrainSource(source, proto_source_opts.words, proto_source_opts.c,
                      proto_hyper.seed);
      proto_options.conventional = proto_conventional;
      proto_options.target_only_words = proto_source_opts.words;
      proto_options.target_only_c = proto_source_opts.c;
      const ProtocolReport report = RunProtocol(
          target, proto_hyper, proto_folds, source_model, proto_options);
      if (global.verbose) {
        for (int f = 0; f < report.k; ++f) {
          err << "fold " << f << ": accuracy=" << report.per_fold_accuracy[f]
              << " seconds=" << report.per_fold_seconds[f] << "\n";
        }
      }
      WriteFileAtomic(proto_out, ReportToJson(report, proto_timing));
    } else if (*sweep) {
      RequirePositive(sweep_folds, "--folds", 2);
      RequirePositive(sweep_source_opts.words, "--words");
      RequirePositive(sweep_source_opts.c, "--source-c");
      for (double c : c1_grid) RequirePositive(c, "--c1");
      for (double c : c2_grid) RequirePositive(c, "--c2");
      sweep_hyper.Validate();
      const std::vector<Bag> source = LoadDataset(sweep_source);
      const std::vector<Bag> target = LoadDataset(sweep_target);
      proto_options.target_only_words = sweep_source_opts.words;
      proto_options.target_only_c = sweep_source_opts.c;
      const std::vector<SweepRow> rows =
          Sweep(source, target, sweep_hyper, c1_grid, c2_grid, sweep_folds,
                sweep_hyper.seed, sweep_source_opts, proto_options);
      WriteFileAtomic(sweep_out, SweepToCsv(rows));
    } else if (*embed) {
      const AnyModel model = LoadModel(embed_model);
      const std::vector<Bag> bags = LoadDataset(embed_data);
      const Dictionary* dict = nullptr;
      if (embed_dict == "phi") {
        dict = std::visit(
            [](const auto& m) -> const Dictionary* {
              if constexpr (std::is_same_v<std::decay_t<decltype(m)>,
                                           SourceModel>) {
                return &m.phi;
              } else {
                return &m.source.phi;
              }
            },
            model);
      } else {
        const auto* adapted = std::get_if<AdaptedModel>(&model);
        if (adapted == nullptr) {
          throw InvalidInputError("--dict psi needs an adapted model");
        }
        dict = &adapted->psi;
      }
      std::string lines;
      for (const Bag& bag : bags) {
        const BagFeature z = EmbedBag(bag, *dict);
        nlohmann::ordered_json record;
        record["id"] = bag.id();
        if (bag.label()) record["label"] = static_cast<int>(*bag.label());
        record["feature"] = std::vector<double>(z.data(), z.data() + z.size());
        lines += record.dump() + "\n";
      }
      WriteFileAtomic(embed_out, lines);
    }
  } catch (const InvalidInputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace dtmil

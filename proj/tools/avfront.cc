// tools/avfront.cc

// Copyright 2026  The avfront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "avfront/harness.h"

using namespace avfront;

namespace {

int ReportError(const std::string &code, const std::string &message) {
  nlohmann::json j = {{"error", code}, {"message", message}};
  std::cerr << j.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"avfront: audio-visual speech enhancement with face frontalization"};
  app.require_subcommand(1);

  CommandPaths paths;
  uint64_t seed = 0;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", paths.config, "JSON experiment config (defaults if omitted)");
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", paths.out, "output directory")->required();
  };

  auto *synth = app.add_subcommand("synth-data", "generate the synthetic audio-visual corpus");
  add_common(synth);

  auto *front = app.add_subcommand("frontalize", "estimate poses and frontalize landmark tracks");
  add_common(front);
  front->add_option("--corpus", paths.corpus, "corpus directory");
  front->add_option("--landmarks", paths.landmarks, "single landmark track CSV");
  front->add_option("--model", paths.model, "morphable model JSON (with --landmarks)");
  front->add_option("--utterance", paths.utterance, "restrict to one utterance id");

  auto *train = app.add_subcommand("train-prior", "train the speech priors");
  add_common(train);
  train->add_option("--corpus", paths.corpus, "corpus directory")->required();
  train->add_option("--frontal", paths.frontal, "frontalize output directory")->required();

  auto *enh = app.add_subcommand("enhance", "enhance the test mixtures with every method");
  add_common(enh);
  enh->add_option("--corpus", paths.corpus, "corpus directory")->required();
  enh->add_option("--frontal", paths.frontal, "frontalize output directory");
  enh->add_option("--priors", paths.priors, "train-prior output directory");
  enh->add_option("--utterance", paths.utterance, "restrict to one utterance id");

  auto *eval = app.add_subcommand("evaluate", "score enhanced outputs and emit tables");
  add_common(eval);
  eval->add_option("--corpus", paths.corpus, "corpus directory")->required();
  eval->add_option("--enhanced", paths.enhanced, "enhance output directory")->required();
  eval->add_option("--utterance", paths.utterance, "restrict to one utterance id");

  auto *fig4 = app.add_subcommand("fig4", "upper-lip trajectories before and after frontalization");
  add_common(fig4);
  fig4->add_option("--corpus", paths.corpus, "corpus directory")->required();
  fig4->add_option("--frontal", paths.frontal, "frontalize output directory")->required();
  fig4->add_option("--utterance", paths.utterance, "restrict to one utterance id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return ReportError("InvalidArgument", e.what());
  }

  try {
    CLI::App *sub = app.get_subcommands().front();
    const bool has_seed = sub->count("--seed") > 0;
    const ExperimentConfig cfg = LoadConfigOrDefault(paths.config, has_seed ? &seed : nullptr);
    if (sub == synth) CmdSynthData(cfg, paths);
    else if (sub == front) CmdFrontalize(cfg, paths);
    else if (sub == train) CmdTrainPrior(cfg, paths);
    else if (sub == enh) CmdEnhance(cfg, paths);
    else if (sub == eval) CmdEvaluate(cfg, paths);
    else if (sub == fig4) CmdFig4(cfg, paths);
  } catch (const Error &e) {
    return ReportError(std::string(ErrorCodeName(e.code())), e.what());
  } catch (const std::exception &e) {
    return ReportError("Internal", e.what());
  }
  return 0;
}

// tools/avsr.cc

// Copyright 2026  The avsrbench Authors

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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "avsr/base/error.h"
#include "avsr/model/lm.h"
#include "avsr/runner/checkpoint.h"
#include "avsr/runner/config.h"
#include "avsr/runner/evaluate.h"
#include "avsr/runner/experiment.h"
#include "avsr/runner/trainer.h"

namespace fs = std::filesystem;

namespace avsr {
namespace {

const char kCorpusFile[] = "corpus.conf";

// Options every verb shares.
struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

void AddCommon(CLI::App* app, Common& c, const std::string& seed_help) {
  app->add_option("--config", c.config, "experiment config (key=value file)")
      ->check(CLI::ExistingFile);
  app->add_option("--set", c.sets, "override a config key, e.g. --set train.epochs=3");
  app->add_option("--seed", c.seed, seed_help);
}

Config LoadConfig(const Common& c) {
  Config cfg = c.config.empty() ? Config() : Config::Load(c.config);
  std::string overrides;
  for (const auto& s : c.sets) overrides += s + "\n";
  cfg.Merge(Config::Parse(overrides, "--set"));
  return cfg;
}

// Media references become absolute so manifests from different directories
// can be merged.
Manifest LoadAbsolute(const std::string& path) {
  Manifest m = LoadManifest(path);
  const fs::path base = fs::absolute(m.base_dir.empty() ? fs::path(".") : fs::path(m.base_dir));
  for (auto& r : m.records) {
    for (std::string* ref : {&r.audio, &r.video}) {
      if (!ref->empty() && fs::path(*ref).is_relative()) *ref = (base / *ref).lexically_normal().string();
    }
  }
  m.base_dir.clear();
  return m;
}

Manifest LoadManifests(const std::vector<std::string>& paths, const std::string& name) {
  std::vector<Manifest> parts;
  for (const auto& p : paths) parts.push_back(LoadAbsolute(p));
  if (parts.size() == 1) return parts[0];
  return MergeManifests(parts, name);
}

int Prepare(const Common& common, const std::string& out_dir) {
  const Config cfg = LoadConfig(common);
  CorpusConfig corpus = ReadCorpusConfig(cfg);
  cfg.CheckAllUsed("corpus");
  if (common.seed) corpus.seed = *common.seed;
  const DeskCorpus d = GenerateDeskCorpus(corpus);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  for (const auto& [name, m] : {std::pair{"labelled", &d.labelled},
                                std::pair{"unlabelled", &d.unlabelled},
                                std::pair{"eval", &d.eval}}) {
    const std::string path = (dir / (std::string(name) + ".jsonl")).string();
    SaveManifest(*m, path);
    spdlog::info("wrote {} ({} records, {:.3f} h)", path, m->size(), TotalHours(*m));
  }
  Config snapshot;
  WriteCorpusConfig(corpus, snapshot);
  snapshot.Save((dir / kCorpusFile).string());
  return 0;
}

int TrainVocab(const Common& common, const std::vector<std::string>& in, int size,
               const std::string& out) {
  const Config cfg = LoadConfig(common);
  if (size <= 0) size = cfg.GetInt("experiment.vocab_size", 256);
  const Vocabulary v = TrainVocabulary(LoadManifests(in, "vocab"), size);
  v.Save(out);
  spdlog::info("wrote {} ({} pieces)", out, v.size());
  return 0;
}

struct PseudoLabelArgs {
  std::vector<std::string> in;
  std::string labelled;
  std::string out;
  std::string transcriber = "oracle:wer=0.1";
  std::string keep_lang = "eng";
  double min_conf = 0.0;
  double fraction = 1.0;
  std::string corpus;
};

int PseudoLabel(const Common& common, const PseudoLabelArgs& a) {
  const std::string corpus_path =
      a.corpus.empty() ? (fs::path(a.in[0]).parent_path() / kCorpusFile).string() : a.corpus;
  const Config corpus_cfg = Config::Load(corpus_path);
  const CorpusConfig corpus = ReadCorpusConfig(corpus_cfg);
  corpus_cfg.CheckAllUsed(corpus_path);
  std::string spec = a.transcriber;
  if (common.seed && spec.find("seed=") == std::string::npos) {
    spec += (spec.find(':') == std::string::npos ? ":" : ",") + ("seed=" + std::to_string(*common.seed));
  }
  const auto transcriber = MakeTranscriber(spec, DeskInventory(corpus));
  const OracleLanguageFilter filter;
  PoolOptions opts;
  opts.keep_language = a.keep_lang;
  opts.min_conf = a.min_conf;
  opts.fraction = a.fraction;
  opts.seed = common.seed.value_or(0);
  Manifest labelled;
  if (!a.labelled.empty()) labelled = LoadAbsolute(a.labelled);
  labelled.name = "pool";
  std::vector<Manifest> unlabelled;
  for (const auto& p : a.in) unlabelled.push_back(LoadAbsolute(p));
  const TrainingPool pool = BuildTrainingPool(labelled, unlabelled, *transcriber, filter, opts);
  SaveManifest(pool.pool, a.out);
  std::cout << PoolStatsJson(pool.stats) << std::endl;
  return 0;
}

int TrainVerb(const Common& common, const std::vector<std::string>& train_paths,
              const std::string& vocab_path, const std::string& out,
              const std::string& modality) {
  Config cfg = LoadConfig(common);
  if (!modality.empty()) cfg.Set("model.modality", modality);
  ModelConfig model = ReadModelConfig(cfg);
  TrainConfig train = ReadTrainConfig(cfg);
  cfg.CheckAllUsed("model/train");
  if (common.seed) {
    train.seed = *common.seed;
    model.init_seed = *common.seed;
  }
  const Vocabulary vocab = Vocabulary::Load(vocab_path);
  const Manifest pool = LoadManifests(train_paths, "train");
  std::ofstream curve(out + ".loss.csv");
  if (!curve) Fail("cannot open for writing: ", out + ".loss.csv");
  curve << "epoch,loss,ctc,attention,records,skipped,seconds\n";
  TrainHooks hooks;
  hooks.divergence_checkpoint = out + ".diverged";
  hooks.on_epoch = [&](int epoch, const EpochStats& s) {
    curve << epoch + 1 << ',' << FormatDouble(s.loss) << ',' << FormatDouble(s.ctc) << ','
          << FormatDouble(s.attention) << ',' << s.records << ',' << s.skipped << ','
          << FormatDouble(s.seconds) << std::endl;
  };
  const TrainResult r = Train(pool, vocab, model, train, hooks);
  Config meta;
  WriteTrainConfig(train, meta);
  meta.Set("meta.epochs_completed", static_cast<int>(r.epochs.size()));
  meta.Set("meta.final_loss", r.epochs.back().loss);
  SaveCheckpoint(MakeCheckpoint(*r.model, vocab, meta), out);
  spdlog::info("wrote {} after {:.1f} s", out, r.seconds);
  return 0;
}

struct EvaluateArgs {
  std::string checkpoint;
  std::vector<std::string> manifests;
  DecodeConfig decode;
  std::string lm_text;
  std::string noise;
  double snr = kCleanSnr;
  std::string babble;
  std::string out;
};

int EvaluateVerb(const Common& common, const EvaluateArgs& a) {
  const Checkpoint ckpt = LoadCheckpoint(a.checkpoint);
  const auto model = RestoreModel(ckpt);
  const Manifest m = LoadManifests(a.manifests, "eval");
  EvalOptions opts;
  opts.decode = a.decode;
  std::optional<CharBigramLm> lm;
  if (!a.lm_text.empty()) {
    std::vector<std::string> texts;
    for (const auto& r : LoadManifest(a.lm_text).records) texts.push_back(r.transcript);
    lm.emplace(ckpt.vocab, texts);
    opts.lm = &*lm;
  }
  Manifest babble;
  if (!a.noise.empty()) {
    opts.noise = NoiseSpec{ParseNoiseKind(a.noise), a.snr, common.seed.value_or(0)};
    if (!a.babble.empty()) {
      babble = LoadAbsolute(a.babble);
      opts.babble_corpus = &babble;
    }
  }
  const EvalResult r = Evaluate(*model, ckpt.vocab, m, opts);
  if (!a.out.empty()) {
    std::ofstream os(a.out);
    if (!os) Fail("cannot open for writing: ", a.out);
    for (std::size_t i = 0; i < r.ids.size(); ++i) {
      os << nlohmann::json{{"id", r.ids[i]}, {"ref", r.refs[i]}, {"hyp", r.hyps[i]}}.dump()
         << '\n';
    }
  }
  nlohmann::json j{{"wer", r.wer.wer()},
                   {"edits", r.wer.edits},
                   {"ref_words", r.wer.ref_words},
                   {"records", r.ids.size()}};
  std::cout << j.dump() << std::endl;
  return 0;
}

int Ablate(const Common& common, const std::string& kind, const std::string& out,
           const std::string& save_dir) {
  const Config cfg = LoadConfig(common);
  ExperimentConfig e = ExperimentFromConfig(cfg);
  if (common.seed) {
    e.seed = *common.seed;
    e.pool.seed = *common.seed;
    e.train.seed = *common.seed;
    e.model.init_seed = *common.seed;
  }
  ModelCallback on_model;
  std::optional<Vocabulary> vocab;
  if (!save_dir.empty()) {
    fs::create_directories(save_dir);
    // RunAblation derives the same vocabulary from the same corpus.
    vocab.emplace(TrainDeskVocabulary(GenerateDeskCorpus(e.corpus), e.vocab_size));
    on_model = [&](const std::string& label, const AvsrModel& model) {
      std::string file = label;
      for (char& ch : file) {
        if (ch == '=' || ch == '/' || ch == ' ') ch = '_';
      }
      SaveCheckpoint(MakeCheckpoint(model, *vocab), (fs::path(save_dir) / (file + ".ckpt")).string());
    };
  }
  const AblationResult r = RunAblation(ParseAblationKind(kind), e, on_model);
  const fs::path parent = fs::path(out).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  r.report.Write(out);
  std::cout << r.report.Markdown();
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Audio-visual speech recognition workbench on a synthetic desk corpus"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  Common c_prep, c_vocab, c_pl, c_train, c_eval, c_ablate;

  auto* prep = app.add_subcommand("prepare", "generate the desk corpus and write media plus manifests");
  AddCommon(prep, c_prep, "corpus seed");
  std::string prep_out;
  prep->add_option("--out", prep_out, "output directory")->required();

  auto* vocab = app.add_subcommand("train-vocab", "learn a subword vocabulary from transcripts");
  AddCommon(vocab, c_vocab, "accepted for uniformity; vocabulary training is deterministic");
  std::vector<std::string> vocab_in;
  int vocab_size = 0;
  std::string vocab_out;
  vocab->add_option("--in", vocab_in, "manifest(s)")->required()->check(CLI::ExistingFile);
  vocab->add_option("--size", vocab_size, "vocabulary size (default experiment.vocab_size)");
  vocab->add_option("--out", vocab_out, "vocabulary file")->required();

  auto* pl = app.add_subcommand("pseudo-label", "auto-label unlabelled data and build a training pool");
  AddCommon(pl, c_pl, "subset and transcriber seed");
  PseudoLabelArgs pla;
  pl->add_option("--in", pla.in, "unlabelled manifest(s)")->required()->check(CLI::ExistingFile);
  pl->add_option("--labelled", pla.labelled, "human-labelled manifest to prepend")
      ->check(CLI::ExistingFile);
  pl->add_option("--out", pla.out, "pool manifest")->required();
  pl->add_option("--transcriber", pla.transcriber, "transcriber spec")->capture_default_str();
  pl->add_option("--keep-lang", pla.keep_lang, "language to keep")->capture_default_str();
  pl->add_option("--min-conf", pla.min_conf, "language confidence threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  pl->add_option("--fraction", pla.fraction, "fraction of the auto-labelled data to keep")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  pl->add_option("--corpus", pla.corpus, "corpus.conf written by prepare (default: next to --in)");

  auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
  AddCommon(train, c_train, "initialization, batch order and augmentation seed");
  std::vector<std::string> train_in;
  std::string train_vocab, train_out, train_modality;
  train->add_option("--train", train_in, "training manifest(s)")->required()->check(CLI::ExistingFile);
  train->add_option("--vocab", train_vocab, "vocabulary file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "checkpoint path")->required();
  train->add_option("--modality", train_modality, "A, V or AV (overrides model.modality)");

  auto* eval = app.add_subcommand("evaluate", "decode a manifest and report WER");
  AddCommon(eval, c_eval, "noise seed");
  EvaluateArgs ea;
  eval->add_option("--checkpoint", ea.checkpoint, "checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--manifest", ea.manifests, "manifest(s)")->required()->check(CLI::ExistingFile);
  eval->add_option("--beam", ea.decode.beam, "beam size")->capture_default_str();
  eval->add_option("--ctc-weight", ea.decode.ctc_weight, "CTC weight in decoding")->capture_default_str();
  eval->add_option("--lm-weight", ea.decode.lm_weight, "LM weight")->capture_default_str();
  eval->add_option("--length-penalty", ea.decode.length_penalty, "per-token bonus")->capture_default_str();
  eval->add_option("--max-len", ea.decode.max_len, "max output tokens (0: encoder frames)")
      ->capture_default_str();
  eval->add_option("--lm-text", ea.lm_text, "manifest whose transcripts train a character LM")
      ->check(CLI::ExistingFile);
  eval->add_option("--noise", ea.noise, "white, pink or babble");
  eval->add_option("--snr", ea.snr, "SNR in dB (inf: clean)");
  eval->add_option("--babble", ea.babble, "manifest supplying babble talkers")->check(CLI::ExistingFile);
  eval->add_option("--out", ea.out, "per-record hypotheses (JSONL)");

  auto* ablate = app.add_subcommand("ablate", "run an ablation and write CSV and Markdown reports");
  AddCommon(ablate, c_ablate, "experiment seed (pool, transcriber, training, initialization)");
  std::string ablate_kind, ablate_out, ablate_save;
  ablate->add_option("kind", ablate_kind, "scaling, transcriber or noise")
      ->required()
      ->check(CLI::IsMember({"scaling", "transcriber", "noise"}));
  ablate->add_option("--out", ablate_out, "report stem (writes .csv and .md)")->required();
  ablate->add_option("--save-models", ablate_save, "directory for per-run checkpoints");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*prep) return Prepare(c_prep, prep_out);
  if (*vocab) return TrainVocab(c_vocab, vocab_in, vocab_size, vocab_out);
  if (*pl) return PseudoLabel(c_pl, pla);
  if (*train) return TrainVerb(c_train, train_in, train_vocab, train_out, train_modality);
  if (*eval) return EvaluateVerb(c_eval, ea);
  if (*ablate) return Ablate(c_ablate, ablate_kind, ablate_out, ablate_save);
  return 1;
}

}  // namespace
}  // namespace avsr

int main(int argc, char** argv) {
  try {
    return avsr::Main(argc, argv);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
}

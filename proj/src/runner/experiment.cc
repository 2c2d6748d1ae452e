// src/runner/experiment.cc

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

#include "avsr/runner/experiment.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "avsr/base/error.h"
#include "avsr/base/random.h"
#include "avsr/model/lm.h"
#include "avsr/runner/metrics.h"

namespace avsr {

void CorpusConfig::Validate() const {
  AVSR_CHECK(labelled_hours > 0, "corpus.labelled_hours must be > 0");
  AVSR_CHECK(unlabelled_hours >= 0 && other_language_hours >= 0,
             "unlabelled hours must be >= 0");
  AVSR_CHECK(eval_records >= 1, "corpus.eval_records must be >= 1");
  AVSR_CHECK(words_per_record >= 1, "corpus.words_per_record must be >= 1");
  AVSR_CHECK(language != other_language, "corpus.other_language must differ from language");
}

int CorpusConfig::RecordsFor(double hours) const {
  const double seconds_per_record = words_per_record * kWordSeconds;
  const double n = hours * 3600.0 / seconds_per_record;
  const long long rounded = std::llround(n);
  if (std::abs(n - static_cast<double>(rounded)) > 1e-6) {
    Fail(hours, " h is not a whole number of ", seconds_per_record, " s records");
  }
  return static_cast<int>(rounded);
}

void WriteCorpusConfig(const CorpusConfig& c, Config& out) {
  out.Set("corpus.labelled_hours", c.labelled_hours);
  out.Set("corpus.unlabelled_hours", c.unlabelled_hours);
  out.Set("corpus.other_language_hours", c.other_language_hours);
  out.Set("corpus.eval_records", c.eval_records);
  out.Set("corpus.words_per_record", c.words_per_record);
  out.Set("corpus.vocab_size_words", c.vocab_size_words);
  out.Set("corpus.frame_size", c.frame_size);
  out.Set("corpus.language", c.language);
  out.Set("corpus.other_language", c.other_language);
  out.Set("corpus.seed", c.seed);
  out.Set("corpus.inventory_seed", c.inventory_seed);
}

CorpusConfig ReadCorpusConfig(const Config& c, CorpusConfig b) {
  b.labelled_hours = c.GetDouble("corpus.labelled_hours", b.labelled_hours);
  b.unlabelled_hours = c.GetDouble("corpus.unlabelled_hours", b.unlabelled_hours);
  b.other_language_hours = c.GetDouble("corpus.other_language_hours", b.other_language_hours);
  b.eval_records = c.GetInt("corpus.eval_records", b.eval_records);
  b.words_per_record = c.GetInt("corpus.words_per_record", b.words_per_record);
  b.vocab_size_words = c.GetInt("corpus.vocab_size_words", b.vocab_size_words);
  b.frame_size = c.GetInt("corpus.frame_size", b.frame_size);
  b.language = c.GetString("corpus.language", b.language);
  b.other_language = c.GetString("corpus.other_language", b.other_language);
  b.seed = c.GetU64("corpus.seed", b.seed);
  b.inventory_seed = c.GetU64("corpus.inventory_seed", b.inventory_seed);
  b.Validate();
  return b;
}

DeskCorpus GenerateDeskCorpus(const CorpusConfig& c) {
  c.Validate();
  auto make = [&](int n, const std::string& lang, const std::string& source,
                  const std::string& prefix, const char* stream) {
    SynthCorpusSpec s;
    s.n_samples = n;
    s.min_words = s.max_words = c.words_per_record;
    s.vocab_size_words = c.vocab_size_words;
    s.seed = DeriveSeed(c.seed, HashString(stream));
    s.inventory_seed = c.inventory_seed;
    s.language_mix = {{lang, 1.0}};
    s.frame_size = c.frame_size;
    s.source = source;
    s.id_prefix = prefix;
    return GenerateSyntheticCorpus(s);
  };
  DeskCorpus d;
  d.labelled = make(c.RecordsFor(c.labelled_hours), c.language, "labelled", "lab-", "labelled");
  const Manifest kept = make(c.RecordsFor(c.unlabelled_hours), c.language, "unlabelled",
                             "unl-" + c.language + "-", "unlabelled");
  const Manifest other = make(c.RecordsFor(c.other_language_hours), c.other_language,
                              "unlabelled", "unl-" + c.other_language + "-", "other");
  d.unlabelled = MergeManifests({kept, other}, "unlabelled");
  d.eval = make(c.eval_records, c.language, "eval", "eval-", "eval");
  d.inventory = DeskInventory(c);
  return d;
}

std::shared_ptr<const WordInventory> DeskInventory(const CorpusConfig& c) {
  c.Validate();
  SynthCorpusSpec all;
  all.vocab_size_words = c.vocab_size_words;
  all.inventory_seed = c.inventory_seed;
  all.frame_size = c.frame_size;
  all.language_mix = {{c.language, 0.5}, {c.other_language, 0.5}};
  return InventoryFor(all);
}

namespace {

std::vector<std::string> SplitComma(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config ExperimentToConfig(const ExperimentConfig& e) {
  Config c;
  WriteCorpusConfig(e.corpus, c);
  WriteModelConfig(e.model, c);
  WriteTrainConfig(e.train, c);
  WriteDecodeConfig(e.decode, c);
  c.Set("experiment.vocab_size", e.vocab_size);
  c.Set("experiment.transcriber", e.transcriber);
  c.Set("experiment.keep_language", e.pool.keep_language);
  c.Set("experiment.min_conf", e.pool.min_conf);
  c.Set("experiment.fraction", e.pool.fraction);
  c.Set("experiment.fractions", e.fractions);
  c.Set("experiment.corruption_levels", e.corruption_levels);
  c.Set("experiment.scaling_modality", ModalityCode(e.scaling_modality));
  c.Set("experiment.transcriber_modality", ModalityCode(e.transcriber_modality));
  c.Set("experiment.noise_fraction", e.noise_fraction);
  std::string kinds;
  for (std::size_t i = 0; i < e.eval_noises.size(); ++i) {
    kinds += (i ? "," : "") + ToString(e.eval_noises[i]);
  }
  c.Set("experiment.eval_noises", kinds);
  c.Set("experiment.snr_grid", e.snr_grid);
  c.Set("experiment.seed", e.seed);
  return c;
}

ExperimentConfig ExperimentFromConfig(const Config& c, ExperimentConfig e) {
  e.corpus = ReadCorpusConfig(c, e.corpus);
  e.model = ReadModelConfig(c, e.model);
  e.train = ReadTrainConfig(c, e.train);
  e.decode = ReadDecodeConfig(c, e.decode);
  e.vocab_size = c.GetInt("experiment.vocab_size", e.vocab_size);
  e.transcriber = c.GetString("experiment.transcriber", e.transcriber);
  e.pool.keep_language = c.GetString("experiment.keep_language", e.corpus.language);
  e.pool.min_conf = c.GetDouble("experiment.min_conf", e.pool.min_conf);
  e.pool.fraction = c.GetDouble("experiment.fraction", e.pool.fraction);
  e.fractions = c.GetDoubles("experiment.fractions", e.fractions);
  e.corruption_levels = c.GetDoubles("experiment.corruption_levels", e.corruption_levels);
  if (c.Has("experiment.scaling_modality")) {
    e.scaling_modality = ParseModality(c.GetString("experiment.scaling_modality", ""));
  }
  if (c.Has("experiment.transcriber_modality")) {
    e.transcriber_modality = ParseModality(c.GetString("experiment.transcriber_modality", ""));
  }
  e.noise_fraction = c.GetDouble("experiment.noise_fraction", e.noise_fraction);
  if (c.Has("experiment.eval_noises")) {
    e.eval_noises.clear();
    for (const auto& k : SplitComma(c.GetString("experiment.eval_noises", ""))) {
      e.eval_noises.push_back(ParseNoiseKind(k));
    }
  }
  e.snr_grid = c.GetDoubles("experiment.snr_grid", e.snr_grid);
  e.seed = c.GetU64("experiment.seed", e.seed);
  e.pool.seed = e.seed;
  c.CheckAllUsed("experiment config");
  return e;
}

std::string Percent(double fraction) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * fraction;
  return os.str();
}

namespace {

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string RunReport::Csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + CsvField(columns[i]);
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + CsvField(row[i]);
    out += "\n";
  }
  return out;
}

std::string RunReport::Markdown() const {
  std::ostringstream os;
  os << "# " << title << "\n\n|";
  for (const auto& c : columns) os << ' ' << c << " |";
  os << "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) os << " --- |";
  os << "\n";
  for (const auto& row : rows) {
    os << "|";
    for (const auto& v : row) os << ' ' << v << " |";
    os << "\n";
  }
  if (!loss_curves.empty()) {
    os << "\n## Training loss per epoch\n\n";
    for (const auto& [label, curve] : loss_curves) {
      os << "- " << label << ":";
      for (double l : curve) os << ' ' << Fixed(l, 4);
      os << "\n";
    }
  }
  os << "\nWall time: " << Fixed(seconds, 1) << " s\n\n## Configuration\n\n```\n"
     << config.ToString() << "```\n";
  return os.str();
}

void RunReport::Write(const std::string& stem) const {
  for (const auto& [ext, text] : {std::pair{".csv", Csv()}, std::pair{".md", Markdown()}}) {
    std::ofstream os(stem + ext);
    if (!os) Fail("cannot open for writing: ", stem + ext);
    os << text;
    if (!os) Fail("write failed: ", stem + ext);
  }
}

AblationKind ParseAblationKind(const std::string& s) {
  if (s == "scaling") return AblationKind::kScaling;
  if (s == "transcriber") return AblationKind::kTranscriber;
  if (s == "noise") return AblationKind::kNoise;
  Fail("unknown ablation '", s, "' (expected scaling, transcriber or noise)");
}

std::string ToString(AblationKind kind) {
  switch (kind) {
    case AblationKind::kScaling:
      return "scaling";
    case AblationKind::kTranscriber:
      return "transcriber";
    case AblationKind::kNoise:
      return "noise";
  }
  return "?";
}

Vocabulary TrainDeskVocabulary(const DeskCorpus& corpus, int size) {
  return TrainVocabulary(corpus.labelled, size);
}

TrainingPool BuildDeskPool(const DeskCorpus& corpus, const std::string& transcriber,
                           const PoolOptions& opts) {
  const auto t = MakeTranscriber(transcriber, corpus.inventory);
  return BuildTrainingPool(corpus.labelled, {corpus.unlabelled}, *t, OracleLanguageFilter(),
                           opts);
}

double LabelWer(const Manifest& pool, const Manifest& truth) {
  std::unordered_map<std::string, const std::string*> by_id;
  for (const auto& r : truth.records) by_id[r.id] = &r.transcript;
  std::vector<std::string> refs, hyps;
  for (const auto& r : pool.records) {
    if (r.provenance.kind != LabelKind::kAuto) continue;
    auto it = by_id.find(r.id);
    if (it == by_id.end()) Fail("record ", r.id, " is not in the reference manifest");
    refs.push_back(*it->second);
    hyps.push_back(r.transcript);
  }
  if (refs.empty()) return 0.0;
  return Wer(refs, hyps);
}

namespace {

// Filter + auto-label once; pools for several fractions are then nested
// subsets of the same labelled extra data.
struct AutoLabelled {
  Manifest extra;
  std::size_t dropped = 0;
};

AutoLabelled LabelUnlabelled(const DeskCorpus& corpus, const Transcriber& t,
                             const PoolOptions& opts) {
  AutoLabelStats stats;
  AutoLabelled out;
  out.extra = AutoLabel(
      FilterLanguage(corpus.unlabelled, OracleLanguageFilter(), opts.keep_language, opts.min_conf),
      t, &stats);
  out.dropped = stats.dropped_ids.size();
  return out;
}

TrainingPool ComposePool(const Manifest& labelled, const AutoLabelled& a, double fraction,
                         std::uint64_t seed) {
  const Manifest extra = SubsetByFraction(a.extra, fraction, seed);
  TrainingPool p{MergeManifests({labelled, extra}, labelled.name), {}};
  p.stats = ComputePoolStats(p.pool);
  p.stats.dropped = a.dropped;
  return p;
}

std::string Hours(double h) { return Fixed(h, 3); }

double HoursOf(const PoolStats& s, const std::string& kind) {
  auto it = s.hours_by_provenance.find(kind);
  return it == s.hours_by_provenance.end() ? 0.0 : it->second;
}

struct Trained {
  std::unique_ptr<AvsrModel> model;
  std::vector<double> losses;
};

Trained TrainRun(const std::string& label, const Manifest& pool, const Vocabulary& vocab,
                 const ExperimentConfig& cfg, Modality modality, bool noise,
                 const ModelCallback& on_model) {
  ModelConfig m = cfg.model;
  m.modality = modality;
  TrainConfig t = cfg.train;
  t.noise = noise;
  spdlog::info("[{}] training", label);
  TrainResult r = Train(pool, vocab, m, t);
  Trained out;
  for (const auto& e : r.epochs) out.losses.push_back(e.loss);
  out.model = std::move(r.model);
  if (on_model) on_model(label, *out.model);
  return out;
}

double EvalWer(const AvsrModel& model, const Vocabulary& vocab, const DeskCorpus& corpus,
               const ExperimentConfig& cfg, const LanguageModel* lm,
               std::optional<NoiseSpec> noise = std::nullopt) {
  EvalOptions opts;
  opts.decode = cfg.decode;
  opts.lm = lm;
  opts.noise = noise;
  opts.babble_corpus = &corpus.eval;
  return Evaluate(model, vocab, corpus.eval, opts).wer.wer();
}

}  // namespace

AblationResult RunAblation(AblationKind kind, const ExperimentConfig& cfg,
                           const ModelCallback& on_model) {
  const auto t0 = std::chrono::steady_clock::now();
  AblationResult res;
  RunReport& rep = res.report;
  rep.config = ExperimentToConfig(cfg);
  const DeskCorpus corpus = GenerateDeskCorpus(cfg.corpus);
  const Vocabulary vocab = TrainDeskVocabulary(corpus, cfg.vocab_size);
  // Shallow fusion uses a character LM over the human transcripts.
  std::optional<CharBigramLm> lm_storage;
  if (cfg.decode.lm_weight != 0.0) {
    std::vector<std::string> texts;
    for (const auto& r : corpus.labelled.records) texts.push_back(r.transcript);
    lm_storage.emplace(vocab, texts);
  }
  const LanguageModel* lm = lm_storage ? &*lm_storage : nullptr;
  switch (kind) {
    case AblationKind::kScaling: {
      rep.title = "Impact of the amount of auto-labelled training data (" +
                  ModalityCode(cfg.scaling_modality) + ")";
      rep.columns = {"extra data %", "labelled h", "auto h", "total h", "records", "WER %"};
      const auto t = MakeTranscriber(cfg.transcriber, corpus.inventory);
      const AutoLabelled extra = LabelUnlabelled(corpus, *t, cfg.pool);
      for (double f : cfg.fractions) {
        const TrainingPool p = ComposePool(corpus.labelled, extra, f, cfg.pool.seed);
        const std::string label = "fraction=" + FormatDouble(f);
        const Trained tr =
            TrainRun(label, p.pool, vocab, cfg, cfg.scaling_modality, false, on_model);
        const double wer = EvalWer(*tr.model, vocab, corpus, cfg, lm);
        rep.loss_curves[label] = tr.losses;
        res.scaling.push_back({f, p.stats, wer});
        rep.rows.push_back({Fixed(100 * f, 0), Hours(HoursOf(p.stats, "human")),
                            Hours(HoursOf(p.stats, "auto")), Hours(p.stats.total_hours),
                            std::to_string(p.stats.records), Percent(wer)});
      }
      break;
    }
    case AblationKind::kTranscriber: {
      rep.title = "Impact of the transcriber quality (" + ModalityCode(cfg.transcriber_modality) +
                  ")";
      rep.columns = {"transcriber", "label WER %", "total h", "WER %"};
      for (double c : cfg.corruption_levels) {
        const std::string spec = "oracle:wer=" + FormatDouble(c) + ",seed=" + std::to_string(cfg.seed);
        const auto t = MakeTranscriber(spec, corpus.inventory);
        const TrainingPool p =
            ComposePool(corpus.labelled, LabelUnlabelled(corpus, *t, cfg.pool), cfg.pool.fraction,
                        cfg.pool.seed);
        const double label_wer = LabelWer(p.pool, corpus.unlabelled);
        const std::string label = "corruption=" + FormatDouble(c);
        const Trained tr =
            TrainRun(label, p.pool, vocab, cfg, cfg.transcriber_modality, false, on_model);
        const double wer = EvalWer(*tr.model, vocab, corpus, cfg, lm);
        rep.loss_curves[label] = tr.losses;
        res.transcriber.push_back({c, label_wer, p.stats, wer});
        rep.rows.push_back({t->id(), Percent(label_wer), Hours(p.stats.total_hours), Percent(wer)});
      }
      break;
    }
    case AblationKind::kNoise: {
      rep.title = "WER as a function of the noise level (trained with babble)";
      rep.columns = {"noise", "SNR dB", "A WER %", "AV WER %"};
      const auto t = MakeTranscriber(cfg.transcriber, corpus.inventory);
      const TrainingPool p = ComposePool(corpus.labelled, LabelUnlabelled(corpus, *t, cfg.pool),
                                         cfg.noise_fraction, cfg.pool.seed);
      const Trained a = TrainRun("A", p.pool, vocab, cfg, Modality::kAudio, true, on_model);
      const Trained av = TrainRun("AV", p.pool, vocab, cfg, Modality::kFused, true, on_model);
      rep.loss_curves["A"] = a.losses;
      rep.loss_curves["AV"] = av.losses;
      const double clean_a = EvalWer(*a.model, vocab, corpus, cfg, lm);
      const double clean_av = EvalWer(*av.model, vocab, corpus, cfg, lm);
      rep.rows.push_back({"none", "clean", Percent(clean_a), Percent(clean_av)});
      for (NoiseKind k : cfg.eval_noises) {
        for (double snr : cfg.snr_grid) {
          const NoiseSpec n{k, snr, DeriveSeed(cfg.seed, HashString("eval-noise"))};
          const double wa = EvalWer(*a.model, vocab, corpus, cfg, lm, n);
          const double wav = EvalWer(*av.model, vocab, corpus, cfg, lm, n);
          res.noise.push_back({k, snr, wa, wav});
          rep.rows.push_back({ToString(k), FormatDouble(snr), Percent(wa), Percent(wav)});
        }
      }
      break;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace avsr

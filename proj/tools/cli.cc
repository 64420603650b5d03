// Copyright 2026 The USF Toolkit Authors.
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

#include "cli.h"

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "usf/demo.h"
#include "usf/error.h"
#include "usf/eval.h"
#include "usf/fst.h"
#include "usf/fusion.h"
#include "usf/lab.h"
#include "usf/lm.h"
#include "usf/nbest_io.h"
#include "usf/parallel.h"
#include "usf/segmentation.h"
#include "usf/sweep.h"
#include "usf/text.h"
#include "usf/vocab.h"

namespace usf::cli {

namespace {

struct LmOptions {
  std::string source = "attached";
  std::string corpus;
  int order = 2;
  double k = 1.0;
};

struct FusionOptions {
  double alpha = kDefaultAlpha;
  double beta = 0.0;
  double gamma = 0.0;
  std::string level;  // empty: follow the FST
  std::string stage = "on_the_fly";
  std::string marker{kDefaultBoundaryMarker};
};

struct Options {
  int jobs = 0;

  // extract-vocab
  std::string corpus;
  bool lowercase = false;

  // build-fst, sweep
  std::string counts;
  long long n_thresh = kDefaultNThresh;
  bool all = false;
  double weight = -1.0;
  std::string inventory;

  // rescore, evaluate, sweep
  std::string nbest;
  std::string fst;
  std::string refs;
  size_t oracle_depth = kDefaultOracleDepth;
  FusionOptions fusion;
  LmOptions lm;

  // lab
  std::string model;
  std::string lexicon;
  std::vector<double> alpha_grid = DefaultAlphaGrid();
  size_t cap = kDefaultSegmentationCap;

  // sweep
  std::string param = "alpha";
  std::vector<std::string> grid = {"0.5", "0.75", "1.0", "2.0"};
  std::string table;

  // gen-demo
  std::string out_dir;
  uint64_t seed = DemoConfig{}.seed;

  std::string out;
};

void AddFusionFlags(CLI::App* cmd, FusionOptions& f, bool with_level) {
  cmd->add_option("--alpha", f.alpha, "USF interpolation weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--beta", f.beta, "second-pass LM weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--gamma", f.gamma, "per-word insertion reward");
  if (with_level) {
    cmd->add_option("--level", f.level, "fusion level (word|subword); defaults to the FST's")
        ->check(CLI::IsMember({"word", "subword"}));
  }
  cmd->add_option("--stage", f.stage, "where USF applies (on_the_fly|second_pass)")
      ->check(CLI::IsMember({"on_the_fly", "second_pass"}));
  cmd->add_option("--marker", f.marker, "word-boundary marker on subword units");
}

void AddLmFlags(CLI::App* cmd, LmOptions& lm) {
  cmd->add_option("--lm", lm.source,
                  "second-pass score source: 'attached' uses nlm_logprob from the "
                  "n-best file, 'builtin' trains an add-k n-gram on --lm-corpus")
      ->check(CLI::IsMember({"attached", "builtin"}));
  cmd->add_option("--lm-corpus", lm.corpus, "training text for --lm builtin");
  cmd->add_option("--lm-order", lm.order, "builtin n-gram order")->check(CLI::Range(1, 2));
  cmd->add_option("--lm-k", lm.k, "builtin add-k constant")->check(CLI::PositiveNumber);
}

FusionParams MakeParams(const FusionOptions& f, std::optional<FusionLevel> fst_level) {
  FusionParams p;
  p.alpha = f.alpha;
  p.beta = f.beta;
  p.gamma = f.gamma;
  p.usf_stage = ParseUsfStage(f.stage);
  p.boundary_marker = f.marker;
  if (!f.level.empty()) {
    p.level = ParseFusionLevel(f.level);
    if (fst_level && *fst_level != p.level) {
      throw ConfigError(std::string("--level ") + f.level + " does not match FST level " +
                        ToString(*fst_level));
    }
  } else if (fst_level) {
    p.level = *fst_level;
  }
  p.Validate();
  return p;
}

LmScoreSource MakeLm(const LmOptions& lm) {
  if (lm.source == "attached") return LmScoreSource::FileAttached();
  if (lm.corpus.empty()) throw ArgumentError("--lm builtin requires --lm-corpus");
  return LmScoreSource::TrainNgram(ReadLines(lm.corpus), lm.order, lm.k);
}

std::vector<NBestList> LoadNbest(const Options& o) {
  auto data = ReadNbestJsonl(o.nbest, o.fusion.marker);
  if (o.refs.empty()) return data;
  std::unordered_map<std::string, std::string> refs;
  for (auto& u : ReadTestsetTsv(o.refs)) refs.emplace(u.utt_id, u.reference);
  for (auto& nb : data) {
    auto it = refs.find(nb.utt_id);
    if (it == refs.end()) {
      throw ArgumentError("utterance '" + nb.utt_id + "' is missing from " + o.refs);
    }
    nb.reference = it->second;
  }
  return data;
}

int CmdExtractVocab(const Options& o) {
  CountOptions opts;
  opts.lowercase = o.lowercase;
  VocabCounts counts = CountUnigramsFile(o.corpus, opts);
  WriteFileAtomic(o.out, FormatCountsTsv(counts));
  std::cerr << "extract-vocab: " << counts.total_types() << " types, "
            << counts.total_tokens() << " tokens\n";
  return 0;
}

int CmdBuildFst(const Options& o) {
  VocabCounts counts = ReadCountsTsv(o.counts);
  auto band = SelectBand(counts, o.n_thresh, o.all);
  std::vector<std::string> words(band.begin(), band.end());
  const FusionLevel level = ParseFusionLevel(o.fusion.level.empty() ? "word" : o.fusion.level);
  std::optional<SubwordInventory> inv;
  if (level == FusionLevel::kSubword) {
    if (o.inventory.empty()) throw ConfigError("--level subword requires --inventory");
    inv = ReadInventoryTsv(o.inventory);
  }
  UnigramFst fst = UnigramFst::Build(words, o.weight, level, inv ? &*inv : nullptr);
  WriteFileAtomic(o.out, fst.Serialize());
  std::cerr << "build-fst: " << fst.size() << " words (level=" << ToString(level) << ")\n";
  return 0;
}

int CmdRescore(const Options& o) {
  auto data = ReadNbestJsonl(o.nbest, o.fusion.marker);
  std::optional<UnigramFst> fst;
  if (!o.fst.empty()) fst = ReadFst(o.fst);
  const FusionParams params =
      MakeParams(o.fusion, fst ? std::optional(fst->level()) : std::nullopt);
  const LmScoreSource lm = MakeLm(o.lm);
  auto scored = RescoreDataset(data, params, fst ? &*fst : nullptr, lm);
  WriteFileAtomic(o.out, FormatNbestJsonl(scored));
  std::cerr << "rescore: " << scored.size() << " utterances\n";
  return 0;
}

int CmdLab(const Options& o) {
  EmissionModel em = ReadEmissionModel(o.model);
  Lexicon lex(ReadLexiconWords(o.lexicon), em.inventory(), o.cap);
  std::optional<UnigramFst> fst;
  if (!o.fst.empty()) {
    fst = ReadFst(o.fst);
  } else {
    // Default reward list: every lexicon word with more than one
    // segmentation, the words exposed to max-vs-sum search error.
    std::vector<std::string> ambiguous;
    for (const auto& w : lex.words()) {
      if (lex.segmentations(w).size() > 1) ambiguous.push_back(w);
    }
    if (!ambiguous.empty()) fst = UnigramFst::Build(ambiguous, o.weight, FusionLevel::kWord);
  }
  auto rows = SearchErrorReport(em, lex, fst ? &*fst : nullptr, o.alpha_grid);
  WriteFileAtomic(o.out, FormatSearchErrorTsv(rows));
  size_t flagged = 0;
  for (const auto& r : rows) flagged += r.search_error ? 1 : 0;
  std::cerr << "lab: " << rows.size() << " words, " << flagged << " search errors\n";
  return 0;
}

std::string EvaluateTsv(std::span<const NBestList> data, size_t depth) {
  std::vector<TestUtterance> testset;
  for (const auto& nb : data) {
    if (!nb.reference) throw ArgumentError("utterance '" + nb.utt_id + "' has no reference");
    testset.push_back({nb.utt_id, *nb.reference});
  }
  const auto rare = FilterByIds(data, ExtractRareTestset(testset));
  std::string out = "set\tutterances\tref_tokens\twer\toracle_wer\n";
  auto row = [&](const char* name, std::span<const NBestList> subset) {
    out += name;
    out += '\t' + std::to_string(subset.size());
    if (subset.empty()) {
      out += "\t0\t-\t-\n";
      return;
    }
    const WerReport top = TopOneWer(subset);
    const WerReport oracle = OracleWer(subset, depth);
    out += '\t' + std::to_string(top.ref_tokens);
    out += '\t' + FormatFixed6(top.wer());
    out += '\t' + FormatFixed6(oracle.wer());
    out += '\n';
  };
  row("gen", data);
  row("rare", rare);
  return out;
}

int CmdEvaluate(const Options& o) {
  auto data = LoadNbest(o);
  const std::string tsv = EvaluateTsv(data, o.oracle_depth);
  if (o.out.empty()) {
    std::cout << tsv;
  } else {
    WriteFileAtomic(o.out, tsv);
  }
  return 0;
}

int CmdSweep(const Options& o) {
  auto data = LoadNbest(o);
  VocabCounts counts = ReadCountsTsv(o.counts);
  std::optional<SubwordInventory> inv;
  if (!o.inventory.empty()) inv = ReadInventoryTsv(o.inventory);
  SweepConfig cfg;
  cfg.params = MakeParams(o.fusion, std::nullopt);
  cfg.n_thresh = o.n_thresh;
  cfg.include_all = o.all;
  cfg.arc_weight = o.weight;
  cfg.oracle_depth = o.oracle_depth;
  cfg.inventory = inv ? &*inv : nullptr;
  const LmScoreSource lm = MakeLm(o.lm);
  SweepResult result = RunSweep(data, counts, lm, ParseSweepParam(o.param), o.grid, cfg);
  const std::string tsv = FormatSweepTsv(result);
  const std::string table = FormatSweepTable(result);
  WriteFileAtomic(o.out, tsv);
  if (o.table.empty()) {
    std::cout << table;
  } else {
    WriteFileAtomic(o.table, table);
  }
  return 0;
}

int CmdGenDemo(const Options& o) {
  DemoConfig cfg;
  cfg.seed = o.seed;
  WriteDemo(GenerateDemo(cfg), o.out_dir);
  std::cerr << "gen-demo: wrote " << o.out_dir << "\n";
  return 0;
}

}  // namespace

int Run(int argc, const char* const* argv) {
  CLI::App app{"usf: unigram shallow fusion toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style key = value file; command-line flags override it");

  Options o;
  app.add_option("--jobs,-j", o.jobs, "worker threads for parallel kernels (0 = default)")
      ->envname("USF_JOBS")
      ->check(CLI::NonNegativeNumber);

  std::function<int()> action;

  auto* ev = app.add_subcommand("extract-vocab", "count unigrams in a training corpus");
  ev->add_option("--corpus", o.corpus, "UTF-8 transcripts, one utterance per line")->required();
  ev->add_option("--out", o.out, "counts TSV to write")->required();
  ev->add_flag("--lowercase", o.lowercase, "lowercase tokens before counting");
  ev->callback([&] { action = [&] { return CmdExtractVocab(o); }; });

  auto* bf = app.add_subcommand("build-fst", "build the unigram reward FST from counts");
  bf->add_option("--counts", o.counts, "counts TSV from extract-vocab")->required();
  bf->add_option("--n-thresh", o.n_thresh, "keep words with 2 <= count <= n-thresh")
      ->check(CLI::Range(2LL, std::numeric_limits<long long>::max()));
  bf->add_flag("--all", o.all, "keep every word with count >= 2");
  bf->add_option("--weight", o.weight, "arc weight (tropical cost; -1 rewards by +1)");
  bf->add_option("--level", o.fusion.level, "word or subword")
      ->check(CLI::IsMember({"word", "subword"}));
  bf->add_option("--inventory", o.inventory, "subword inventory TSV (subword level)");
  bf->add_option("--out", o.out, "FST text file to write")->required();
  bf->callback([&] { action = [&] { return CmdBuildFst(o); }; });

  auto* rs = app.add_subcommand("rescore", "rerank n-best lists with USF and LM scores");
  rs->add_option("--nbest", o.nbest, "n-best JSONL")->required();
  rs->add_option("--fst", o.fst, "FST text file; omit for no USF term");
  AddFusionFlags(rs, o.fusion, true);
  AddLmFlags(rs, o.lm);
  rs->add_option("--out", o.out, "rescored JSONL to write")->required();
  rs->callback([&] { action = [&] { return CmdRescore(o); }; });

  auto* lab = app.add_subcommand("lab", "segmentation search-error report on a toy model");
  lab->add_option("--model", o.model, "emission model JSON")->required();
  lab->add_option("--lexicon", o.lexicon, "lexicon, one word per line")->required();
  lab->add_option("--fst", o.fst,
                  "reward FST; default rewards every word with more than one segmentation");
  lab->add_option("--weight", o.weight, "arc weight for the default FST");
  lab->add_option("--alpha-grid", o.alpha_grid, "alpha values tried when repairing errors")
      ->delimiter(',');
  lab->add_option("--cap", o.cap, "maximum segmentations per word")->check(CLI::PositiveNumber);
  lab->add_option("--out", o.out, "report TSV to write")->required();
  lab->callback([&] { action = [&] { return CmdLab(o); }; });

  auto* eva = app.add_subcommand("evaluate", "top-1 and oracle WER on general and rare sets");
  eva->add_option("--nbest", o.nbest, "n-best JSONL (rescored or not)")->required();
  eva->add_option("--refs", o.refs, "test-set TSV utt_id<TAB>reference; overrides 'ref'");
  eva->add_option("--oracle-depth", o.oracle_depth, "hypotheses considered by oracle WER")
      ->check(CLI::PositiveNumber);
  eva->add_option("--marker", o.fusion.marker, "word-boundary marker on subword units");
  eva->add_option("--out", o.out, "metrics TSV; stdout when omitted");
  eva->callback([&] { action = [&] { return CmdEvaluate(o); }; });

  auto* sw = app.add_subcommand("sweep", "WERR sweep over alpha, n_thresh or level");
  sw->add_option("--nbest", o.nbest, "n-best JSONL with references")->required();
  sw->add_option("--refs", o.refs, "test-set TSV; overrides 'ref'");
  sw->add_option("--counts", o.counts, "training counts TSV")->required();
  sw->add_option("--param", o.param, "swept parameter")
      ->check(CLI::IsMember({"alpha", "n_thresh", "level"}));
  sw->add_option("--grid", o.grid, "comma-separated grid ('all' allowed for n_thresh)")
      ->delimiter(',');
  AddFusionFlags(sw, o.fusion, true);
  AddLmFlags(sw, o.lm);
  sw->add_option("--n-thresh", o.n_thresh, "band upper bound for cells that keep it fixed")
      ->check(CLI::Range(2LL, std::numeric_limits<long long>::max()));
  sw->add_flag("--all", o.all, "use every word with count >= 2 for fixed cells");
  sw->add_option("--weight", o.weight, "arc weight");
  sw->add_option("--inventory", o.inventory, "subword inventory TSV (subword cells)");
  sw->add_option("--oracle-depth", o.oracle_depth, "hypotheses considered by oracle WER")
      ->check(CLI::PositiveNumber);
  sw->add_option("--out", o.out, "sweep TSV to write")->required();
  sw->add_option("--table", o.table, "formatted table file; stdout when omitted");
  sw->callback([&] { action = [&] { return CmdSweep(o); }; });

  auto* gd = app.add_subcommand("gen-demo", "write the seeded synthetic demo dataset");
  gd->add_option("--out-dir", o.out_dir, "directory to write into")->required();
  gd->add_option("--seed", o.seed, "random seed");
  gd->callback([&] { action = [&] { return CmdGenDemo(o); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  SetJobs(o.jobs);
  try {
    return action ? action() : 1;
  } catch (const IoError& e) {
    std::cerr << "usf: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "usf: " << e.what() << "\n";
    return 1;
  }
}

int Run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("usf");
  for (const auto& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace usf::cli

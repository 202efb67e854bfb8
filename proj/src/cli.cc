#include "labner/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "labner/bio.h"
#include "labner/brat.h"
#include "labner/bridge.h"
#include "labner/conll.h"
#include "labner/crf.h"
#include "labner/error.h"
#include "labner/eval.h"
#include "labner/features.h"
#include "labner/fragmentation.h"
#include "labner/split.h"
#include "labner/subword.h"
#include "labner/text.h"

namespace labner {
namespace {

namespace fs = std::filesystem;

// Bad flag combinations found after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in = OpenInput(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Output files staged in memory and written together once a command has
// succeeded, each through a temporary file and a rename.
class Outputs {
 public:
  explicit Outputs(std::ostream &stdout_stream) : stdout_(stdout_stream) {}

  // An empty path means the data stream.
  std::ostream &Open(const std::string &path) {
    files_.push_back({path, std::make_unique<std::ostringstream>()});
    return *files_.back().buffer;
  }

  void Commit() {
    for (const File &file : files_) {
      if (file.path.empty()) {
        stdout_ << file.buffer->str();
        continue;
      }
      fs::path path(file.path);
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      fs::path temp = path;
      temp += ".tmp";
      {
        std::ofstream out(temp, std::ios::binary);
        out << file.buffer->str();
        if (!out) throw DataError("cannot write '" + file.path + "'");
      }
      fs::rename(temp, path);
    }
  }

 private:
  struct File {
    std::string path;
    std::unique_ptr<std::ostringstream> buffer;
  };
  std::ostream &stdout_;
  std::vector<File> files_;
};

Corpus LoadConll(const std::string &path, bool tab_separated = false,
                 bool allow_untagged = true) {
  std::ifstream in = OpenInput(path);
  ConllOptions options;
  options.column_sep = tab_separated ? ColumnSep::kTab : ColumnSep::kWhitespace;
  options.allow_untagged = allow_untagged;
  try {
    return ParseConll(in, options);
  } catch (const ParseError &e) {
    throw DataError(path + ": " + e.what());
  }
}

// BRAT input: a directory of <id>.txt/<id>.ann pairs, or a single .ann or
// .txt path whose sibling holds the other half.
Corpus LoadBrat(const std::string &path, std::ostream &err) {
  std::vector<fs::path> stems;
  if (fs::is_directory(path)) {
    for (const auto &entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".ann") {
        stems.push_back(fs::path(entry.path()).replace_extension());
      }
    }
    std::sort(stems.begin(), stems.end());
    if (stems.empty()) throw DataError("no .ann files in '" + path + "'");
  } else {
    stems.push_back(fs::path(path).replace_extension());
  }
  Corpus corpus;
  for (const fs::path &stem : stems) {
    fs::path txt = stem, ann = stem;
    txt += ".txt";
    ann += ".ann";
    const std::string text = ReadFile(txt.string());
    std::ifstream annotations = OpenInput(ann.string());
    BratDocument doc;
    try {
      doc = ParseBrat(text, annotations, stem.filename().string());
    } catch (const Error &e) {
      throw DataError(ann.string() + ": " + e.what());
    }
    for (const std::string &warning : doc.warnings) {
      err << "warning: " << ann.string() << ": " << warning << '\n';
    }
    corpus.documents.push_back(std::move(doc.document));
  }
  corpus.label_set = CollectLabelSet(corpus.documents);
  return corpus;
}

Vocabulary LoadVocabFile(const std::string &path, bool uncased) {
  std::ifstream in = OpenInput(path);
  VocabOptions options;
  options.case_mode = uncased ? CaseMode::kUncased : CaseMode::kCased;
  try {
    return LoadVocab(in, options);
  } catch (const ParseError &e) {
    throw DataError(path + ": " + e.what());
  }
}

LabelSet LoadLabels(const std::string &path) {
  std::ifstream in = OpenInput(path);
  return ReadLabelSet(in);
}

// Gazetteers from a directory of <type>.txt files.
std::vector<Gazetteer> LoadGazetteers(const std::string &dir) {
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Gazetteer> gazetteers;
  for (const fs::path &file : files) {
    std::ifstream in = OpenInput(file.string());
    gazetteers.push_back(ReadGazetteer(file.stem().string(), in));
  }
  return gazetteers;
}

std::string Fixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

std::string SpanList(const std::vector<EntitySpan> &spans) {
  std::ostringstream out;
  for (size_t i = 0; i < spans.size(); ++i) {
    if (i) out << ' ';
    out << spans[i];
  }
  return spans.empty() ? "-" : out.str();
}

const std::map<std::string, RepairMode> kRepairModes = {
    {"begin", RepairMode::kBegin},
    {"merge", RepairMode::kMerge},
    {"raw", RepairMode::kDrop},
};

struct ConvertFlags {
  std::string from = "conll", to = "conll", in, out, labels;
  bool tab = false;
};

void Convert(const ConvertFlags &f, Outputs &outputs, std::ostream &err) {
  if (f.to == "brat" && f.out.empty()) {
    throw UsageError("--to brat needs an --out directory");
  }
  Corpus corpus = f.from == "brat" ? LoadBrat(f.in, err) : LoadConll(f.in, f.tab);
  if (!f.labels.empty()) {
    LabelSet declared = LoadLabels(f.labels);
    for (const std::string &type : corpus.label_set.types()) {
      if (!declared.Contains(type)) {
        throw DataError("entity type '" + type + "' is not in " + f.labels);
      }
    }
    corpus.label_set = declared;
  }
  if (f.to == "conll") {
    WriteConll(corpus, outputs.Open(f.out));
    return;
  }
  for (const Document &doc : corpus.documents) {
    if (doc.id.find_first_of("/\\") != std::string::npos || doc.id.empty() ||
        doc.id == "." || doc.id == "..") {
      throw DataError("document id '" + doc.id + "' is not a file name");
    }
    BratFiles files = WriteBrat(doc);
    const fs::path base = fs::path(f.out) / doc.id;
    outputs.Open(base.string() + ".txt") << files.text;
    outputs.Open(base.string() + ".ann") << files.annotations;
  }
}

struct SplitFlags {
  std::string in;
  std::vector<double> ratios;
  std::vector<std::string> outs;
  uint64_t seed = 1;
  bool tab = false;
};

void SplitCommand(const SplitFlags &f, Outputs &outputs, std::ostream &err) {
  if (f.outs.size() != f.ratios.size()) {
    throw UsageError("give one --out per ratio (" +
                     std::to_string(f.ratios.size()) + " ratios, " +
                     std::to_string(f.outs.size()) + " outputs)");
  }
  Corpus corpus = LoadConll(f.in, f.tab);
  std::vector<Corpus> parts = SplitDataset(corpus, f.ratios, f.seed);
  for (size_t i = 0; i < parts.size(); ++i) {
    WriteConll(parts[i], outputs.Open(f.outs[i]));
    err << f.outs[i] << ": " << parts[i].documents.size() << " documents, "
        << parts[i].num_sentences() << " sentences\n";
  }
}

struct TokenizeFlags {
  std::string in, vocab, out;
  bool uncased = false, tab = false;
  int budget = kDefaultChunkBudget;
};

// The bridge record layout without scores, so exporters can fill them in.
void Tokenize(const TokenizeFlags &f, Outputs &outputs) {
  Corpus corpus = LoadConll(f.in, f.tab);
  Vocabulary vocab = LoadVocabFile(f.vocab, f.uncased);
  std::ostream &out = outputs.Open(f.out);
  out << "#version " << kBridgeFormatVersion << '\n'
      << "#alphabet " << Join(corpus.label_set.TagNames(), "\t") << '\n'
      << "#vocab " << vocab.Identifier() << '\n'
      << "#budget " << f.budget << '\n';
  for (const Document &doc : corpus.documents) {
    for (int s = 0; s < static_cast<int>(doc.sentences.size()); ++s) {
      if (doc.sentences[s].size() == 0) continue;
      AlignedSentence aligned = TokenizeSentence(doc.sentences[s], vocab);
      ChunkPlan plan = ChunkSentence(aligned, f.budget);
      for (size_t c = 0; c < plan.chunks.size(); ++c) {
        const WordRange &range = plan.chunks[c];
        std::string sent = std::to_string(s);
        if (plan.chunks.size() > 1) sent += "." + std::to_string(c);
        const int first = aligned.first_piece_index[range.begin];
        const int count = PieceCount(aligned, range);
        for (int p = first; p < first + count; ++p) {
          out << doc.id << '\t' << sent << '\t' << p - first << '\t'
              << aligned.pieces[p] << '\t'
              << aligned.word_index[p] - range.begin << '\n';
        }
      }
    }
  }
}

struct GazetteerFlags {
  std::string in, out_dir;
  double min_ratio = 0.5;
  bool tab = false;
};

void BuildGazetteersCommand(const GazetteerFlags &f, Outputs &outputs,
                            std::ostream &err) {
  Corpus corpus = LoadConll(f.in, f.tab, false);
  for (const Gazetteer &gazetteer : BuildGazetteers(corpus, f.min_ratio)) {
    std::ostream &out =
        outputs.Open((fs::path(f.out_dir) / (gazetteer.name() + ".txt")).string());
    for (const std::string &entry : gazetteer.Entries()) out << entry << '\n';
    err << gazetteer.name() << ": " << gazetteer.size() << " entries\n";
  }
}

struct TrainFlags {
  std::string train, dev, out, templates, gazetteers;
  bool no_gazetteers = false, tab = false, quiet = false;
  double min_ratio = 0.5;
  std::string optimizer = "lbfgs";
  TrainConfig config;
  bool unconstrained_dev = false;
};

void TrainCommand(TrainFlags f, Outputs &outputs, std::ostream &err) {
  if (!f.gazetteers.empty() && f.no_gazetteers) {
    throw UsageError("--gazetteers and --no-gazetteers exclude each other");
  }
  Corpus train = LoadConll(f.train, f.tab, false);
  Corpus dev;
  if (!f.dev.empty()) dev = LoadConll(f.dev, f.tab, false);

  std::vector<FeatureTemplate> templates = DefaultTemplates();
  if (!f.templates.empty()) {
    std::ifstream in = OpenInput(f.templates);
    templates = ReadTemplates(in);
  }
  std::vector<Gazetteer> gazetteers;
  if (!f.gazetteers.empty()) {
    gazetteers = LoadGazetteers(f.gazetteers);
  } else if (!f.no_gazetteers) {
    gazetteers = BuildGazetteers(train, f.min_ratio);
  }

  f.config.optimizer = f.optimizer == "sgd" ? Optimizer::kSgd : Optimizer::kLbfgs;
  f.config.constrained_decoding = !f.unconstrained_dev;
  if (!f.quiet) {
    f.config.on_epoch = [&err](const EpochLog &log) {
      err << "epoch " << log.epoch << " objective "
          << Fixed(log.train_objective, 6);
      if (log.dev_f1) err << " dev_f1 " << Fixed(*log.dev_f1, 4);
      err << '\n';
    };
  }
  TrainResult result = Train(
      train, dev, FeatureExtractor(std::move(templates), std::move(gazetteers)),
      f.config);
  for (const std::string &warning : result.warnings) {
    err << "warning: " << warning << '\n';
  }
  err << "features " << result.model.num_features() << ", parameters "
      << result.model.num_params() << '\n';
  SaveModel(result.model, outputs.Open(f.out));
}

struct TagFlags {
  std::string model, in, out;
  bool unconstrained = false, tab = false;
};

void TagCommand(const TagFlags &f, Outputs &outputs) {
  std::ifstream in = OpenInput(f.model);
  CrfModel model = LoadModel(in);
  Corpus corpus = LoadConll(f.in, f.tab);
  WriteConll(Tag(model, corpus, !f.unconstrained), outputs.Open(f.out));
}

struct PredictFlags {
  std::string bridge, in, vocab, labels, out;
  std::string decode = "argmax";
  bool uncased = false, tab = false;
};

void PredictCommand(const PredictFlags &f, Outputs &outputs) {
  std::optional<LabelSet> expected;
  if (!f.labels.empty()) expected = LoadLabels(f.labels);
  std::ifstream in = OpenInput(f.bridge);
  BridgeFile file;
  try {
    file = ReadBridge(in, expected ? &*expected : nullptr);
  } catch (const ParseError &e) {
    throw DataError(f.bridge + ": " + e.what());
  }
  Corpus corpus = LoadConll(f.in, f.tab);
  Vocabulary vocab = LoadVocabFile(f.vocab, f.uncased);
  DecodeMode mode =
      f.decode == "constrained" ? DecodeMode::kConstrained : DecodeMode::kArgmax;
  WriteConll(PredictCorpus(file, corpus, vocab, mode), outputs.Open(f.out));
}

struct EvalFlags {
  std::string gold, pred, out, errors;
  std::string mode = "both", repair = "begin", format = "table";
  bool tab = false;
};

void EvalCommand(const EvalFlags &f, Outputs &outputs, std::ostream &err) {
  Corpus gold = LoadConll(f.gold, f.tab, false);
  Corpus pred = LoadConll(f.pred, f.tab, false);
  const RepairMode repair = kRepairModes.at(f.repair);
  int repaired_gold = 0;
  for (const Document &doc : gold.documents) {
    for (const Sentence &sentence : doc.sentences) {
      repaired_gold += sentence.unvalidated;
    }
  }
  if (repaired_gold > 0) {
    err << "warning: " << repaired_gold
        << " gold sentence(s) violate BIO and were repaired (" << f.repair
        << ")\n";
  }
  RepairCorpus(gold, repair);
  RepairCorpus(pred, repair);

  std::ostream &out = outputs.Open(f.out);
  std::vector<EvalReport> reports;
  if (f.mode != "partial") reports.push_back(Evaluate(gold, pred, MatchMode::kExact));
  if (f.mode != "exact") reports.push_back(Evaluate(gold, pred, MatchMode::kPartial));
  if (f.format == "kv") {
    for (const EvalReport &report : reports) WriteEvalKeyValues(report, out);
  } else if (reports.size() == 2) {
    WriteEvalTable(reports[0], reports[1], out);
  } else {
    WriteEvalTable(reports[0], out);
  }

  if (!f.errors.empty()) {
    std::ostream &tsv = outputs.Open(f.errors);
    tsv << "category\tdocument\tsentence\tgold\tpred\toverlaps_other_type\n";
    for (const SpanError &e : BuildErrorReport(gold, pred)) {
      tsv << ErrorCategoryName(e.category) << '\t' << e.document << '\t'
          << e.sentence << '\t' << SpanList(e.gold) << '\t' << SpanList(e.pred)
          << '\t' << (e.overlaps_other_type ? "yes" : "no") << '\n';
    }
  }
}

struct KappaFlags {
  std::string a, b, out;
  bool tab = false;
};

void KappaCommand(const KappaFlags &f, Outputs &outputs) {
  Corpus a = LoadConll(f.a, f.tab, false);
  Corpus b = LoadConll(f.b, f.tab, false);
  RepairCorpus(a, RepairMode::kBegin);
  RepairCorpus(b, RepairMode::kBegin);
  AgreementReport report = CohenKappa(a, b);
  outputs.Open(f.out) << "kappa=" << Fixed(report.kappa, 6) << '\n'
                      << "observed=" << Fixed(report.observed, 6) << '\n'
                      << "expected=" << Fixed(report.expected, 6) << '\n'
                      << "units=" << report.units << '\n';
}

struct FragFlags {
  std::string in, vocab, out;
  int top = 20;
  bool uncased = false, tab = false;
};

void FragCommand(const FragFlags &f, Outputs &outputs) {
  Corpus corpus = LoadConll(f.in, f.tab);
  Vocabulary vocab = LoadVocabFile(f.vocab, f.uncased);
  WriteFragmentationTsv(BuildFragmentationReport(corpus, vocab), f.top,
                        outputs.Open(f.out));
}

CLI::Option *AddTab(CLI::App *sub, bool &flag) {
  return sub->add_flag("--tab-separated", flag,
                       "CoNLL columns are separated by one tab");
}

}  // namespace

int Run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Sequence labeling toolkit for protocol NER", "labner"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_config("--config", "",
                 "Run file: 'option = value' lines under a [train-crf] "
                 "section; command-line flags take precedence");

  const std::vector<std::string> formats = {"conll", "brat"};

  ConvertFlags convert;
  auto *convert_cmd = app.add_subcommand("convert", "Convert between BRAT and CoNLL");
  convert_cmd->add_option("--from", convert.from, "Input format")
      ->check(CLI::IsMember(formats));
  convert_cmd->add_option("--to", convert.to, "Output format")
      ->check(CLI::IsMember(formats));
  convert_cmd->add_option("--in", convert.in, "Input file or BRAT directory")
      ->required()->check(CLI::ExistingPath);
  convert_cmd->add_option("--out", convert.out, "Output file or BRAT directory");
  convert_cmd->add_option("--labels", convert.labels,
                          "Label set file fixing the type order")
      ->check(CLI::ExistingFile);
  AddTab(convert_cmd, convert.tab);

  SplitFlags split;
  auto *split_cmd = app.add_subcommand("split", "Split documents by ratio");
  split_cmd->add_option("--in", split.in, "CoNLL corpus")
      ->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--ratios", split.ratios, "Comma-separated ratios")
      ->required()->delimiter(',');
  split_cmd->add_option("--seed", split.seed, "Shuffle seed")->capture_default_str();
  split_cmd->add_option("--out", split.outs, "Output file, once per ratio")
      ->required();
  AddTab(split_cmd, split.tab);

  TokenizeFlags tokenize;
  auto *tokenize_cmd =
      app.add_subcommand("tokenize", "Emit aligned WordPiece pieces per chunk");
  tokenize_cmd->add_option("--in", tokenize.in, "CoNLL corpus")
      ->required()->check(CLI::ExistingFile);
  tokenize_cmd->add_option("--vocab", tokenize.vocab, "Vocabulary file")
      ->required()->check(CLI::ExistingFile);
  tokenize_cmd->add_flag("--uncased", tokenize.uncased, "Lowercase and strip accents");
  tokenize_cmd->add_option("--budget", tokenize.budget, "Pieces per chunk")
      ->capture_default_str()->check(CLI::Range(kDelimiterPieces + 1, 1 << 20));
  tokenize_cmd->add_option("--out", tokenize.out, "Output file");
  AddTab(tokenize_cmd, tokenize.tab);

  GazetteerFlags gazetteer;
  auto *gazetteer_cmd = app.add_subcommand(
      "build-gazetteers", "Harvest per-type lexicons from training data");
  gazetteer_cmd->add_option("--in", gazetteer.in, "Tagged CoNLL corpus")
      ->required()->check(CLI::ExistingFile);
  gazetteer_cmd->add_option("--out-dir", gazetteer.out_dir,
                            "Directory for <type>.txt files")
      ->required();
  gazetteer_cmd->add_option("--min-ratio", gazetteer.min_ratio,
                            "Share of a word's occurrences inside the type")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  AddTab(gazetteer_cmd, gazetteer.tab);

  TrainFlags train;
  auto *train_cmd = app.add_subcommand("train-crf", "Train the CRF baseline");
  train_cmd->add_option("--train", train.train, "Tagged CoNLL training corpus")
      ->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", train.dev, "Tagged CoNLL dev corpus")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Model file")->required();
  train_cmd->add_option("--templates", train.templates, "Feature template file")
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--gazetteers", train.gazetteers,
                        "Directory of <type>.txt gazetteers")
      ->check(CLI::ExistingDirectory);
  train_cmd->add_flag("--no-gazetteers", train.no_gazetteers,
                      "Do not harvest gazetteers from the training data");
  train_cmd->add_option("--min-ratio", train.min_ratio,
                        "Harvesting threshold")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--optimizer", train.optimizer, "lbfgs or sgd")
      ->capture_default_str()->check(CLI::IsMember({"lbfgs", "sgd"}));
  train_cmd->add_option("--epochs", train.config.epochs,
                        "L-BFGS iterations or SGD passes")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--l2", train.config.l2, "L2 strength")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--learning-rate", train.config.learning_rate,
                        "Initial SGD step")
      ->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", train.config.batch_size, "SGD batch")
      ->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--patience", train.config.patience,
                        "Epochs without dev gain before stopping (0 = never)")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", train.config.seed, "SGD shuffle seed")
      ->capture_default_str();
  train_cmd->add_option("--lbfgs-memory", train.config.lbfgs_memory,
                        "L-BFGS history")
      ->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--tolerance", train.config.tolerance,
                        "L-BFGS relative objective tolerance")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  train_cmd->add_flag("--all-pairs", train.config.all_feature_label_pairs,
                      "Weights for every feature/label pair");
  train_cmd->add_flag("--unconstrained-dev", train.unconstrained_dev,
                      "Decode the dev set without BIO constraints");
  train_cmd->add_flag("--quiet", train.quiet, "No per-epoch log");
  AddTab(train_cmd, train.tab);

  TagFlags tag;
  auto *tag_cmd = app.add_subcommand("tag", "Tag a corpus with a CRF model");
  tag_cmd->add_option("--model", tag.model, "Model file")
      ->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--in", tag.in, "CoNLL corpus; tags are ignored")
      ->required()->check(CLI::ExistingFile);
  tag_cmd->add_option("--out", tag.out, "Output file");
  tag_cmd->add_flag("--unconstrained", tag.unconstrained,
                    "Allow BIO-invalid transitions");
  AddTab(tag_cmd, tag.tab);

  PredictFlags predict;
  auto *predict_cmd =
      app.add_subcommand("predict", "Decode bridge scores into tags");
  predict_cmd->add_option("--bridge", predict.bridge, "Bridge file")
      ->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--in", predict.in, "CoNLL corpus; tags are ignored")
      ->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--vocab", predict.vocab, "Vocabulary file")
      ->required()->check(CLI::ExistingFile);
  predict_cmd->add_flag("--uncased", predict.uncased, "Uncased vocabulary");
  predict_cmd->add_option("--labels", predict.labels,
                          "Expected label set file")
      ->check(CLI::ExistingFile);
  predict_cmd->add_option("--decode", predict.decode, "argmax or constrained")
      ->capture_default_str()->check(CLI::IsMember({"argmax", "constrained"}));
  predict_cmd->add_option("--out", predict.out, "Output file");
  AddTab(predict_cmd, predict.tab);

  EvalFlags eval;
  auto *eval_cmd = app.add_subcommand("eval", "Span-level precision/recall/F1");
  eval_cmd->add_option("--gold", eval.gold, "Gold CoNLL")
      ->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", eval.pred, "Predicted CoNLL")
      ->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--mode", eval.mode, "exact, partial or both")
      ->capture_default_str()->check(CLI::IsMember({"exact", "partial", "both"}));
  eval_cmd->add_option("--repair", eval.repair,
                       "Stray I- tags: begin, merge, or raw (not entities)")
      ->capture_default_str()->check(CLI::IsMember({"raw", "begin", "merge"}));
  eval_cmd->add_option("--format", eval.format, "table or kv")
      ->capture_default_str()->check(CLI::IsMember({"table", "kv"}));
  eval_cmd->add_option("--errors", eval.errors, "Write an error report TSV");
  eval_cmd->add_option("--out", eval.out, "Output file");
  AddTab(eval_cmd, eval.tab);

  KappaFlags kappa;
  auto *kappa_cmd =
      app.add_subcommand("kappa", "Cohen's kappa between two annotations");
  kappa_cmd->add_option("--a", kappa.a, "First annotator CoNLL")
      ->required()->check(CLI::ExistingFile);
  kappa_cmd->add_option("--b", kappa.b, "Second annotator CoNLL")
      ->required()->check(CLI::ExistingFile);
  kappa_cmd->add_option("--out", kappa.out, "Output file");
  AddTab(kappa_cmd, kappa.tab);

  FragFlags frag;
  auto *frag_cmd =
      app.add_subcommand("frag-report", "Subword fragmentation diagnostics");
  frag_cmd->add_option("--in", frag.in, "CoNLL corpus")
      ->required()->check(CLI::ExistingFile);
  frag_cmd->add_option("--vocab", frag.vocab, "Vocabulary file")
      ->required()->check(CLI::ExistingFile);
  frag_cmd->add_flag("--uncased", frag.uncased, "Uncased vocabulary");
  frag_cmd->add_option("--top", frag.top, "Rows to list")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  frag_cmd->add_option("--out", frag.out, "Output file");
  AddTab(frag_cmd, frag.tab);

  // CLI11 reads run files only at the top level, so "<cmd> --config f" is
  // parsed as "--config f <cmd>".
  std::vector<std::string> args(argv + 1, argv + argc);
  for (size_t i = 1; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      std::string value = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      args.insert(args.begin(), {"--config", value});
      break;
    }
  }
  std::reverse(args.begin(), args.end());

  try {
    app.parse(args);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Outputs outputs(out);
  try {
    if (*convert_cmd) Convert(convert, outputs, err);
    if (*split_cmd) SplitCommand(split, outputs, err);
    if (*tokenize_cmd) Tokenize(tokenize, outputs);
    if (*gazetteer_cmd) BuildGazetteersCommand(gazetteer, outputs, err);
    if (*train_cmd) TrainCommand(train, outputs, err);
    if (*tag_cmd) TagCommand(tag, outputs);
    if (*predict_cmd) PredictCommand(predict, outputs);
    if (*eval_cmd) EvalCommand(eval, outputs, err);
    if (*kappa_cmd) KappaCommand(kappa, outputs);
    if (*frag_cmd) FragCommand(frag, outputs);
    outputs.Commit();
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    for (CLI::App *sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace labner

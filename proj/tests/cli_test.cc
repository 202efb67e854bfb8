#include "labner/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "labner/bridge.h"
#include "labner/conll.h"
#include "test_util.h"

namespace labner {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(::testing::TempDir()) /
           (std::string("labner_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string &name) const {
    return (dir_ / name).string();
  }

  Result Cli(std::vector<std::string> args) const {
    args.insert(args.begin(), "labner");
    std::vector<const char *> argv;
    for (const std::string &arg : args) argv.push_back(arg.c_str());
    std::ostringstream out, err;
    Result result;
    result.code =
        labner::Run(static_cast<int>(argv.size()), argv.data(), out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
  }

  std::string WriteCorpus(const std::string &name, const Corpus &corpus) const {
    std::ofstream out(Path(name));
    WriteConll(corpus, out);
    return Path(name);
  }

  std::string WriteText(const std::string &name, const std::string &text) const {
    std::ofstream out(Path(name));
    out << text;
    return Path(name);
  }

  static std::string Slurp(const std::string &path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }

  static Corpus ReadCorpus(const std::string &path) {
    std::ifstream in(path);
    return ParseConll(in);
  }

  std::string VocabPath() const { return LABNER_TEST_DATA "/table4_vocab.txt"; }

  fs::path dir_;
};

Corpus Documents(int n) {
  SplitMix64 rng(5);
  return testing::RandomCorpus(rng, n, 2, 6);
}

TEST_F(CliTest, HelpAndUsage) {
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"bogus"}).code, kExitUsage);
  Result missing = Cli({"eval", "--gold", Path("none.conll")});
  EXPECT_EQ(missing.code, kExitUsage);
  EXPECT_FALSE(missing.err.empty());
}

TEST_F(CliTest, EvalIdenticalFiles) {
  std::string gold = WriteCorpus("gold.conll", Documents(3));
  Result result = Cli({"eval", "--gold", gold, "--pred", gold});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("exact match"), std::string::npos);
  EXPECT_NE(result.out.find("1.000  1.000  1.000   |"), std::string::npos);

  Result kv = Cli({"eval", "--gold", gold, "--pred", gold, "--format", "kv",
                   "--mode", "partial"});
  ASSERT_EQ(kv.code, kExitOk);
  EXPECT_NE(kv.out.find("partial.micro.f1=1.000000"), std::string::npos);
  EXPECT_EQ(kv.out.find("exact."), std::string::npos);
}

TEST_F(CliTest, EvalErrorReportAndRepair) {
  Corpus gold;
  gold.label_set = LabelSet({"Reagent", "Device"});
  gold.documents.push_back(testing::MakeDocument(
      "d", {MakeSentence({"T4", "DNA", "Ligase", "buffer"},
                         {"B-Reagent", "I-Reagent", "I-Reagent", "I-Reagent"})}));
  Corpus pred = gold;
  pred.documents[0].sentences[0].tags =
      testing::Tags({"B-Reagent", "B-Device", "B-Reagent", "I-Reagent"});
  std::string g = WriteCorpus("gold.conll", gold);
  std::string p = WriteCorpus("pred.conll", pred);
  Result result = Cli({"eval", "--gold", g, "--pred", p, "--errors",
                       Path("errors.tsv"), "--format", "kv"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("exact.micro.f1=0.000000"), std::string::npos);
  EXPECT_NE(result.out.find("partial.micro.f1=0.500000"), std::string::npos);
  const std::string tsv = Slurp(Path("errors.tsv"));
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')),
            "category\tdocument\tsentence\tgold\tpred\toverlaps_other_type");
  EXPECT_NE(tsv.find("fragmentation\td\t0\t"), std::string::npos);
  EXPECT_NE(tsv.find("spurious\td\t0\t-\t"), std::string::npos);

  // A stray I- in the prediction: an entity under begin, nothing under raw.
  std::string stray = WriteText("stray.conll", "a O\nb I-Reagent\n\n");
  std::string clean = WriteText("clean.conll", "a O\nb B-Reagent\n\n");
  Result begin = Cli({"eval", "--gold", clean, "--pred", stray, "--format",
                      "kv", "--mode", "exact"});
  EXPECT_NE(begin.out.find("exact.micro.tp=1"), std::string::npos);
  Result raw = Cli({"eval", "--gold", clean, "--pred", stray, "--format", "kv",
                    "--mode", "exact", "--repair", "raw"});
  EXPECT_NE(raw.out.find("exact.micro.tp=0"), std::string::npos);
  Result warned = Cli({"eval", "--gold", stray, "--pred", clean});
  EXPECT_NE(warned.err.find("warning"), std::string::npos);
}

TEST_F(CliTest, SplitSevenThree) {
  std::string in = WriteCorpus("all.conll", Documents(10));
  Result result = Cli({"split", "--in", in, "--ratios", "0.7,0.3", "--seed",
                       "7", "--out", Path("train.conll"), "--out",
                       Path("test.conll")});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_EQ(ReadCorpus(Path("train.conll")).documents.size(), 7u);
  EXPECT_EQ(ReadCorpus(Path("test.conll")).documents.size(), 3u);
}

TEST_F(CliTest, UsageErrorsWriteNothing) {
  std::string in = WriteCorpus("all.conll", Documents(10));
  Result result = Cli({"split", "--in", in, "--ratios", "0.7,0.3", "--out",
                       Path("only.conll")});
  EXPECT_EQ(result.code, kExitUsage);
  EXPECT_FALSE(fs::exists(Path("only.conll")));

  Result flags = Cli({"eval", "--gold", in, "--pred", in, "--mode", "fuzzy",
                      "--out", Path("eval.txt")});
  EXPECT_EQ(flags.code, kExitUsage);
  EXPECT_FALSE(fs::exists(Path("eval.txt")));

  Result brat = Cli({"convert", "--in", in, "--to", "brat"});
  EXPECT_EQ(brat.code, kExitUsage);
}

TEST_F(CliTest, DataErrors) {
  std::string bad = WriteText("bad.conll", "a O\nb B-Reagent extra\n\n");
  std::string good = WriteCorpus("good.conll", Documents(2));
  Result parse = Cli({"eval", "--gold", bad, "--pred", good, "--out",
                      Path("eval.txt")});
  EXPECT_EQ(parse.code, kExitData);
  EXPECT_NE(parse.err.find("line 2"), std::string::npos);
  EXPECT_FALSE(fs::exists(Path("eval.txt")));

  std::string other = WriteCorpus("other.conll", Documents(3));
  EXPECT_EQ(Cli({"eval", "--gold", good, "--pred", other}).code, kExitData);

  std::string bad_ratio = WriteCorpus("all.conll", Documents(4));
  EXPECT_EQ(Cli({"split", "--in", bad_ratio, "--ratios", "0.5,0.2", "--out",
                 Path("a"), "--out", Path("b")})
                .code,
            kExitData);

  std::string model = WriteText("model.txt", "labner-crf-model\nversion 9\n");
  EXPECT_EQ(Cli({"tag", "--model", model, "--in", good}).code, kExitData);
}

TEST_F(CliTest, TrainTagEvalPipelineIsDeterministic) {
  SplitMix64 rng(3);
  std::string train = WriteCorpus("train.conll",
                                  testing::SeparableCorpus(rng, 120));
  std::string dev = WriteCorpus("dev.conll", testing::SeparableCorpus(rng, 30));
  for (const char *name : {"a.model", "b.model"}) {
    Result result = Cli({"train-crf", "--train", train, "--dev", dev, "--out",
                         Path(name), "--epochs", "60"});
    ASSERT_EQ(result.code, kExitOk) << result.err;
    EXPECT_NE(result.err.find("epoch 1 objective"), std::string::npos);
    EXPECT_NE(result.err.find("dev_f1"), std::string::npos);
  }
  EXPECT_EQ(Slurp(Path("a.model")), Slurp(Path("b.model")));

  ASSERT_EQ(Cli({"tag", "--model", Path("a.model"), "--in", dev, "--out",
                 Path("tagged.conll")})
                .code,
            kExitOk);
  Result eval = Cli({"eval", "--gold", dev, "--pred", Path("tagged.conll"),
                     "--format", "kv", "--mode", "exact"});
  ASSERT_EQ(eval.code, kExitOk);
  const size_t at = eval.out.find("exact.micro.f1=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_GE(std::stod(eval.out.substr(at + 15)), 0.95);
}

TEST_F(CliTest, RunFileSetsTrainingOptions) {
  SplitMix64 rng(4);
  std::string train = WriteCorpus("train.conll",
                                  testing::SeparableCorpus(rng, 30));
  std::string config = WriteText("run.ini",
                                 "[train-crf]\noptimizer = sgd\nepochs = 2\n");
  Result result = Cli({"train-crf", "--config", config, "--train", train,
                       "--out", Path("m")});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.err.find("epoch 2 objective"), std::string::npos);
  EXPECT_EQ(result.err.find("epoch 3 objective"), std::string::npos);

  // Command-line flags win over the run file.
  Result overridden = Cli({"train-crf", "--config", config, "--train", train,
                           "--out", Path("m"), "--epochs", "3"});
  ASSERT_EQ(overridden.code, kExitOk) << overridden.err;
  EXPECT_NE(overridden.err.find("epoch 3 objective"), std::string::npos);
}

TEST_F(CliTest, TokenizeThenPredictOneHot) {
  SplitMix64 rng(6);
  Corpus gold = testing::RandomCorpus(rng, 2, 3, 10);
  std::string corpus = WriteCorpus("gold.conll", gold);

  Result tokenized = Cli({"tokenize", "--in", corpus, "--vocab", VocabPath(),
                          "--budget", "5"});
  ASSERT_EQ(tokenized.code, kExitOk) << tokenized.err;
  EXPECT_EQ(tokenized.out.substr(0, 11), "#version 1\n");
  EXPECT_NE(tokenized.out.find("\t0.1\t0\t"), std::string::npos);

  // Types come back in first-occurrence order, so score against the file.
  BridgeFile file =
      OneHotBridge(ReadCorpus(corpus), testing::TableFourVocab(), 5);
  {
    std::ofstream out(Path("scores.bridge"));
    WriteBridge(file, out);
  }
  // Record columns other than the scores match the tokenize output.
  std::istringstream written(Slurp(Path("scores.bridge")));
  std::istringstream expected(tokenized.out);
  std::string a, b;
  while (std::getline(expected, a)) {
    ASSERT_TRUE(std::getline(written, b));
    if (a[0] == '#') {
      EXPECT_EQ(a, b);
    } else {
      EXPECT_EQ(b.substr(0, b.rfind('\t')), a);
    }
  }

  for (const char *mode : {"argmax", "constrained"}) {
    Result predicted = Cli({"predict", "--bridge", Path("scores.bridge"), "--in",
                            corpus, "--vocab", VocabPath(), "--decode", mode,
                            "--out", Path("pred.conll")});
    ASSERT_EQ(predicted.code, kExitOk) << predicted.err;
    Result eval = Cli({"eval", "--gold", corpus, "--pred", Path("pred.conll"),
                       "--format", "kv", "--mode", "exact"});
    EXPECT_NE(eval.out.find("exact.micro.f1=1.000000"), std::string::npos);
  }

  Result uncased = Cli({"predict", "--bridge", Path("scores.bridge"), "--in",
                        corpus, "--vocab", VocabPath(), "--uncased"});
  EXPECT_EQ(uncased.code, kExitData);
  EXPECT_NE(uncased.err.find("vocab"), std::string::npos);
}

TEST_F(CliTest, ConvertRoundTripAndGazetteers) {
  Corpus corpus;
  corpus.label_set = LabelSet({"Reagent", "Method"});
  corpus.documents.push_back(testing::MakeDocument(
      "p1", {MakeSentence({"Add", "5gm", "SDS"}, {"B-Method", "O", "B-Reagent"}),
             MakeSentence({"Spin", "PBS", "buffer"},
                          {"B-Method", "B-Reagent", "I-Reagent"})}));
  std::string in = WriteCorpus("in.conll", corpus);
  ASSERT_EQ(Cli({"convert", "--in", in, "--to", "brat", "--out", Path("brat")})
                .code,
            kExitOk);
  EXPECT_TRUE(fs::exists(Path("brat/p1.ann")));
  Result back = Cli({"convert", "--from", "brat", "--in", Path("brat"),
                     "--to", "conll"});
  ASSERT_EQ(back.code, kExitOk) << back.err;
  EXPECT_EQ(back.out, Slurp(in));

  ASSERT_EQ(Cli({"build-gazetteers", "--in", in, "--out-dir", Path("gaz")})
                .code,
            kExitOk);
  EXPECT_EQ(Slurp(Path("gaz/Reagent.txt")), "buffer\npbs\nsds\n");
  EXPECT_EQ(Slurp(Path("gaz/Method.txt")), "add\nspin\n");
}

TEST_F(CliTest, KappaAndFragReport) {
  std::string a = WriteCorpus("a.conll", Documents(3));
  Result kappa = Cli({"kappa", "--a", a, "--b", a});
  ASSERT_EQ(kappa.code, kExitOk) << kappa.err;
  EXPECT_NE(kappa.out.find("kappa=1.000000\n"), std::string::npos);

  Result frag = Cli({"frag-report", "--in", a, "--vocab", VocabPath(),
                     "--top", "3"});
  ASSERT_EQ(frag.code, kExitOk) << frag.err;
  EXPECT_FALSE(frag.out.empty());
}

}  // namespace
}  // namespace labner

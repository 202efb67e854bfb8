#include "labner/subword.h"

#include <gtest/gtest.h>

#include <sstream>

#include "labner/error.h"
#include "labner/fragmentation.h"
#include "test_util.h"

namespace labner {
namespace {

using testing::TableFourVocab;
using testing::Tags;

Vocabulary Vocab(const std::vector<std::string> &pieces) {
  return Vocabulary(pieces);
}

std::vector<std::string> Surfaces(const std::vector<std::string> &pieces) {
  std::vector<std::string> out;
  for (const std::string &p : pieces) out.emplace_back(PieceSurface(p));
  return out;
}

TEST(LoadVocabTest, SizesAndErrors) {
  std::istringstream five("[UNK]\n[CLS]\n[SEP]\nprotocol\n##s\n");
  EXPECT_EQ(LoadVocab(five).size(), 5);
  std::istringstream toy("[UNK]\nun\n##aff\n##able\n");
  EXPECT_EQ(LoadVocab(toy).size(), 4);
  std::istringstream twice("[UNK]\nun\nun\n");
  try {
    LoadVocab(twice);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3);
  }
  std::istringstream no_unk("un\n");
  EXPECT_THROW(LoadVocab(no_unk), DataError);
  std::istringstream blank("[UNK]\n\nun\n");
  EXPECT_THROW(LoadVocab(blank), ParseError);
}

TEST(VocabularyTest, IdentifierDependsOnPiecesAndCase) {
  Vocabulary a = Vocab({"[UNK]", "un"});
  Vocabulary b = Vocab({"[UNK]", "un", "##aff"});
  EXPECT_NE(a.Identifier(), b.Identifier());
  EXPECT_EQ(a.Identifier(), Vocab({"[UNK]", "un"}).Identifier());
  EXPECT_EQ(a.Identifier().rfind("cased:", 0), 0u);
  VocabOptions uncased;
  uncased.case_mode = CaseMode::kUncased;
  EXPECT_NE(Vocabulary({"[UNK]", "un"}, uncased).Identifier(), a.Identifier());
}

TEST(WordpieceTest, Examples) {
  Vocabulary toy = Vocab({"[UNK]", "un", "##aff", "##able", "protocol"});
  EXPECT_EQ(WordpieceTokenize("protocol", toy),
            (std::vector<std::string>{"protocol"}));
  EXPECT_EQ(WordpieceTokenize("unaffable", toy),
            (std::vector<std::string>{"un", "##aff", "##able"}));
  EXPECT_EQ(WordpieceTokenize("unknown", toy),
            (std::vector<std::string>{"[UNK]"}));
}

TEST(WordpieceTest, TableFourRows) {
  Vocabulary vocab = TableFourVocab();
  std::vector<std::string> ddh2o = WordpieceTokenize("ddH2O", vocab);
  EXPECT_EQ(ddh2o, (std::vector<std::string>{"d", "##d", "##H", "##2", "##O"}));
  EXPECT_EQ(Surfaces(ddh2o),
            (std::vector<std::string>{"d", "d", "H", "2", "O"}));
  EXPECT_EQ(Surfaces(WordpieceTokenize("Hematoxylin", vocab)),
            (std::vector<std::string>{"He", "mat", "ox", "yl", "in"}));
}

TEST(WordpieceTest, UnknownCases) {
  Vocabulary vocab = Vocab({"[UNK]", "a", "##a"});
  EXPECT_EQ(WordpieceTokenize("\x01", vocab), (std::vector<std::string>{"[UNK]"}));
  EXPECT_EQ(WordpieceTokenize(std::string(101, 'a'), vocab),
            (std::vector<std::string>{"[UNK]"}));
  EXPECT_EQ(WordpieceTokenize(std::string(100, 'a'), vocab).size(), 100u);
  EXPECT_EQ(WordpieceTokenize("ab", vocab), (std::vector<std::string>{"[UNK]"}));
}

TEST(WordpieceTest, MatchesOverCodePoints) {
  Vocabulary vocab = Vocab({"[UNK]", "µ", "##l"});
  EXPECT_EQ(WordpieceTokenize("µl", vocab),
            (std::vector<std::string>{"µ", "##l"}));
}

TEST(WordpieceTest, UncasedStripsAccents) {
  Vocabulary vocab = TableFourVocab(CaseMode::kUncased);
  EXPECT_EQ(vocab.Normalize("Café"), "cafe");
  EXPECT_EQ(WordpieceTokenize("CAFÉ", vocab),
            (std::vector<std::string>{"caf", "##e"}));
}

TEST(WordpieceTest, StripsFormatCharacters) {
  Vocabulary vocab = TableFourVocab();
  // Zero-width space is a format character.
  EXPECT_EQ(WordpieceTokenize("PBS​", vocab),
            (std::vector<std::string>{"PBS"}));
}

TEST(TokenizeSentenceTest, Alignment) {
  Vocabulary toy = Vocab({"[UNK]", "un", "##aff", "##able", "protocol", "a",
                          "b", "c"});
  AlignedSentence simple = TokenizeSentence(MakeSentence({"a", "b", "c"}), toy);
  EXPECT_EQ(simple.word_index, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(simple.first_piece_index, (std::vector<int>{0, 1, 2}));

  AlignedSentence fan =
      TokenizeSentence(MakeSentence({"unaffable", "protocol"}), toy);
  EXPECT_EQ(fan.word_index, (std::vector<int>{0, 0, 0, 1}));
  EXPECT_EQ(fan.first_piece_index, (std::vector<int>{0, 3}));
  EXPECT_EQ(fan.PieceCount(0), 3);

  AlignedSentence control =
      TokenizeSentence(MakeSentence({"a", "\x02", "b"}), toy);
  EXPECT_EQ(control.pieces, (std::vector<std::string>{"a", "[UNK]", "b"}));
  EXPECT_EQ(control.word_index, (std::vector<int>{0, 1, 2}));
}

TEST(ProjectionTest, Examples) {
  Vocabulary toy = Vocab({"[UNK]", "un", "##aff", "##able", "protocol"});
  AlignedSentence one = TokenizeSentence(MakeSentence({"protocol"}), toy);
  auto pieces = ProjectLabelsToPieces(one, Tags({"B-Method"}));
  ASSERT_EQ(pieces.size(), 1u);
  EXPECT_EQ(pieces[0].label, BioTag::Begin("Method"));

  AlignedSentence fan = TokenizeSentence(MakeSentence({"unaffable"}), toy);
  pieces = ProjectLabelsToPieces(fan, Tags({"B-Reagent"}));
  ASSERT_EQ(pieces.size(), 3u);
  EXPECT_EQ(pieces[0].label, BioTag::Begin("Reagent"));
  EXPECT_TRUE(pieces[1].ignored());
  EXPECT_TRUE(pieces[2].ignored());
  EXPECT_EQ(ProjectPieceLabelsToWords(fan, pieces), Tags({"B-Reagent"}));
}

TEST(ProjectionTest, FirstPieceLabelsToWords) {
  Vocabulary toy = Vocab({"[UNK]", "un", "##aff", "protocol"});
  AlignedSentence fan = TokenizeSentence(MakeSentence({"unaff", "protocol"}), toy);
  ASSERT_EQ(fan.num_pieces(), 3);
  EXPECT_EQ(ProjectPieceLabelsToWords(fan, Tags({"B-X", "I-X", "O"})),
            Tags({"B-X", "O"}));
  EXPECT_EQ(ProjectPieceLabelsToWords(fan, Tags({"O", "O", "O"})),
            Tags({"O", "O"}));
  EXPECT_THROW(ProjectPieceLabelsToWords(fan, Tags({"O", "O"})), DataError);
}

TEST(ProjectionTest, SinglePieceSentenceKeepsTags) {
  Vocabulary vocab = TableFourVocab();
  AlignedSentence aligned = TokenizeSentence(
      MakeSentence({"PBS", "sequencing", "protocol"}), vocab);
  auto tags = Tags({"B-Reagent", "B-Method", "I-Method"});
  auto pieces = ProjectLabelsToPieces(aligned, tags);
  for (size_t i = 0; i < tags.size(); ++i) EXPECT_EQ(*pieces[i].label, tags[i]);
}

// Random corpora: alignment is monotone and contiguous, pieces detokenize to
// the normalized word, and projection round trips.
TEST(SubwordPropertyTest, RandomCorpora) {
  Vocabulary vocab = TableFourVocab();
  SplitMix64 rng(17);
  Corpus corpus = testing::RandomCorpus(rng, 5, 40, 15);
  for (const Document &doc : corpus.documents) {
    for (const Sentence &sentence : doc.sentences) {
      AlignedSentence aligned = TokenizeSentence(sentence, vocab);
      ASSERT_EQ(aligned.num_words(), sentence.size());
      for (int p = 1; p < aligned.num_pieces(); ++p) {
        int step = aligned.word_index[p] - aligned.word_index[p - 1];
        ASSERT_TRUE(step == 0 || step == 1);
      }
      for (int w = 0; w < aligned.num_words(); ++w) {
        const int first = aligned.first_piece_index[w];
        ASSERT_EQ(aligned.word_index[first], w);
        std::string joined;
        bool unknown = false;
        for (int p = first; p < first + aligned.PieceCount(w); ++p) {
          ASSERT_EQ(aligned.word_index[p], w);
          unknown |= aligned.pieces[p] == vocab.unknown_token();
          joined += PieceSurface(aligned.pieces[p]);
        }
        if (!unknown) {
          ASSERT_EQ(joined, vocab.Normalize(aligned.words[w]));
        }
      }
      auto pieces = ProjectLabelsToPieces(aligned, *sentence.tags);
      ASSERT_EQ(ProjectPieceLabelsToWords(aligned, pieces), *sentence.tags);
    }
  }
}

AlignedSentence RepeatedWords(const std::vector<int> &piece_counts) {
  Vocabulary vocab = Vocab({"[UNK]", "a", "##a"});
  Sentence sentence;
  for (int count : piece_counts) {
    sentence.tokens.push_back({std::string(count, 'a'), {}});
  }
  return TokenizeSentence(sentence, vocab);
}

TEST(ChunkSentenceTest, Examples) {
  ChunkPlan fits = ChunkSentence(RepeatedWords(std::vector<int>(100, 1)));
  ASSERT_EQ(fits.chunks.size(), 1u);
  EXPECT_EQ(fits.chunks[0], (WordRange{0, 100}));

  ChunkPlan split = ChunkSentence(RepeatedWords(std::vector<int>(600, 1)), 512);
  ASSERT_EQ(split.chunks.size(), 2u);
  EXPECT_EQ(split.chunks[0], (WordRange{0, 510}));
  EXPECT_EQ(split.chunks[1], (WordRange{510, 600}));

  ChunkPlan boundary =
      ChunkSentence(RepeatedWords(std::vector<int>(510, 1)), 512);
  EXPECT_EQ(boundary.chunks.size(), 1u);

  EXPECT_THROW(ChunkSentence(RepeatedWords({3, 9, 1}), 10), DataError);
}

// Fewest chunks over all left-to-right splits, by exhaustive search over cut
// sets.
int BruteMinChunks(const std::vector<int> &counts, int budget) {
  const int n = static_cast<int>(counts.size());
  int best = n + 1;
  for (uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    int chunks = 1, load = counts[0];
    bool ok = load + kDelimiterPieces <= budget;
    for (int i = 1; i < n && ok; ++i) {
      if (cuts & (1u << (i - 1))) {
        ++chunks;
        load = 0;
      }
      load += counts[i];
      ok = load + kDelimiterPieces <= budget;
    }
    if (ok) best = std::min(best, chunks);
  }
  return best;
}

TEST(ChunkSentencePropertyTest, GreedyIsOptimalAndCovering) {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + static_cast<int>(rng.Below(12));
    const int budget = 6 + static_cast<int>(rng.Below(8));
    std::vector<int> counts;
    for (int i = 0; i < n; ++i) {
      counts.push_back(1 + static_cast<int>(rng.Below(budget - kDelimiterPieces)));
    }
    AlignedSentence aligned = RepeatedWords(counts);
    ChunkPlan plan = ChunkSentence(aligned, budget);
    int expected_begin = 0;
    for (const WordRange &range : plan.chunks) {
      ASSERT_EQ(range.begin, expected_begin);
      ASSERT_LT(range.begin, range.end);
      ASSERT_LE(PieceCount(aligned, range) + kDelimiterPieces, budget);
      expected_begin = range.end;
    }
    ASSERT_EQ(expected_begin, n);
    ASSERT_EQ(static_cast<int>(plan.chunks.size()), BruteMinChunks(counts, budget));
  }
}

TEST(FragmentationTest, InVocabularyCorpus) {
  Vocabulary vocab = TableFourVocab();
  Corpus corpus;
  corpus.documents.push_back(testing::MakeDocument(
      "d", {MakeSentence({"Add", "PBS", "to", "the", "tube"})}));
  FragmentationReport report = BuildFragmentationReport(corpus, vocab);
  EXPECT_DOUBLE_EQ(report.MeanPiecesPerWord(), 1.0);
  EXPECT_DOUBLE_EQ(report.FragmentedFraction(), 0.0);
}

TEST(FragmentationTest, TableFourAndToyFraction) {
  Vocabulary vocab = TableFourVocab();
  Corpus corpus;
  corpus.documents.push_back(testing::MakeDocument(
      "d", {MakeSentence({"Hematoxylin", "ddH2O", "PBS", "PBS"})}));
  FragmentationReport report = BuildFragmentationReport(corpus, vocab);
  auto top = report.MostFragmented(1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].word, "Hematoxylin");
  EXPECT_EQ(Surfaces(top[0].pieces),
            (std::vector<std::string>{"He", "mat", "ox", "yl", "in"}));
  EXPECT_EQ(report.num_words, 4);
  EXPECT_EQ(report.num_pieces, 12);
  EXPECT_DOUBLE_EQ(report.FragmentedFraction(), 0.5);

  Vocabulary toy = Vocab({"[UNK]", "un", "##aff", "##able"});
  Corpus pair;
  pair.documents.push_back(
      testing::MakeDocument("d", {MakeSentence({"unaffable", "un"})}));
  EXPECT_DOUBLE_EQ(BuildFragmentationReport(pair, toy).FragmentedFraction(), 0.5);
}

TEST(FragmentationTest, TsvLayout) {
  Vocabulary vocab = TableFourVocab();
  Corpus corpus;
  corpus.documents.push_back(
      testing::MakeDocument("d", {MakeSentence({"Hematoxylin", "zzz"})}));
  std::ostringstream out;
  WriteFragmentationTsv(BuildFragmentationReport(corpus, vocab), 10, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("word\tcount\tpieces\tunknown\tsurfaces"), std::string::npos);
  EXPECT_NE(text.find("Hematoxylin\t1\t5\t"), std::string::npos);
}

}  // namespace
}  // namespace labner

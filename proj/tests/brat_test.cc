#include "labner/brat.h"

#include <gtest/gtest.h>

#include <sstream>

#include "labner/bio.h"
#include "labner/error.h"
#include "test_util.h"

namespace labner {
namespace {

using testing::Tags;

BratDocument Parse(std::string_view text, const std::string &annotations) {
  std::istringstream in(annotations);
  return ParseBrat(text, in, "p1");
}

std::vector<EntitySpan> Spans(const Document &doc, int sentence) {
  return BioDecode(*doc.sentences[sentence].tags);
}

TEST(ParseBratTest, AlignedAnnotation) {
  BratDocument doc = Parse("Add 5gm SDS", "T1\tReagent 8 11\tSDS\n");
  EXPECT_TRUE(doc.warnings.empty());
  EXPECT_EQ(Spans(doc.document, 0),
            (std::vector<EntitySpan>{{2, 2, "Reagent"}}));
  const Token &sds = doc.document.sentences[0].tokens[2];
  EXPECT_EQ(sds.text, "SDS");
  EXPECT_EQ(sds.offsets, (CharSpan{8, 11}));
}

TEST(ParseBratTest, EmptyAnnotationsGiveAllO) {
  BratDocument doc = Parse("Add 5gm SDS\nMix well", "");
  ASSERT_EQ(doc.document.sentences.size(), 2u);
  EXPECT_EQ(*doc.document.sentences[0].tags, Tags({"O", "O", "O"}));
  EXPECT_EQ(*doc.document.sentences[1].tags, Tags({"O", "O"}));
}

TEST(ParseBratTest, MidTokenStartIsExtendedWithWarning) {
  BratDocument doc = Parse("Add 5gm SDS", "T1\tReagent 9 11\tDS\n");
  EXPECT_EQ(doc.warnings.size(), 1u);
  EXPECT_EQ(Spans(doc.document, 0),
            (std::vector<EntitySpan>{{2, 2, "Reagent"}}));
}

TEST(ParseBratTest, NonTLinesIgnored) {
  BratDocument doc = Parse(
      "Add 5gm SDS",
      "T1\tAmount 4 7\t5gm\nR1\tMeasure Arg1:T1 Arg2:T1\n#1\tNote T1\tx\n");
  EXPECT_EQ(Spans(doc.document, 0),
            (std::vector<EntitySpan>{{1, 1, "Amount"}}));
}

TEST(ParseBratTest, OffsetsAreCodePoints) {
  // "µl" is two code points but three bytes.
  BratDocument doc = Parse("Add 5 µl PBS", "T1\tReagent 9 12\tPBS\n");
  EXPECT_TRUE(doc.warnings.empty());
  EXPECT_EQ(Spans(doc.document, 0),
            (std::vector<EntitySpan>{{3, 3, "Reagent"}}));
}

TEST(ParseBratTest, OverlapKeepsLongerAndWarns) {
  BratDocument doc = Parse("T4 DNA Ligase buffer",
                           "T1\tReagent 0 13\tT4 DNA Ligase\n"
                           "T2\tDevice 3 6\tDNA\n");
  EXPECT_EQ(doc.warnings.size(), 1u);
  EXPECT_EQ(Spans(doc.document, 0),
            (std::vector<EntitySpan>{{0, 2, "Reagent"}}));
}

TEST(ParseBratTest, Errors) {
  EXPECT_THROW(Parse("Add SDS", "T1\tReagent 4 40\tSDS\n"), DataError);
  EXPECT_THROW(Parse("Add SDS", "T1\tReagent 4\tSDS\n"), ParseError);
  EXPECT_THROW(Parse("Add SDS", "T1\tReagent 5 5\t\n"), ParseError);
}

TEST(WriteBratTest, RoundTripWithSourceText) {
  const std::string text = "Add 5gm SDS\nSpin at 4000 rpm\n";
  BratDocument doc =
      Parse(text, "T1\tReagent 8 11\tSDS\nT2\tMethod 12 16\tSpin\n");
  BratFiles files = WriteBrat(doc.document);
  EXPECT_EQ(files.text, text);
  BratDocument again = Parse(files.text, files.annotations);
  ASSERT_EQ(again.document.sentences.size(), 2u);
  for (size_t s = 0; s < 2; ++s) {
    EXPECT_EQ(*again.document.sentences[s].tags,
              *doc.document.sentences[s].tags);
  }
}

TEST(WriteBratTest, WithoutSourceTextJoinsTokens) {
  Document doc = testing::MakeDocument(
      "d", {MakeSentence({"Add", "SDS"}, {"O", "B-Reagent"})});
  BratFiles files = WriteBrat(doc);
  EXPECT_EQ(files.text, "Add SDS\n");
  EXPECT_EQ(files.annotations, "T1\tReagent 4 7\tSDS\n");
}

// Random texts with random annotations: aligned ones come back exactly,
// every misaligned one produces one warning.
TEST(BratPropertyTest, AlignedSpansRecoveredWarningsCounted) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(10));
    std::string text;
    std::vector<int> starts, ends;
    for (int i = 0; i < n; ++i) {
      if (i) text += ' ';
      std::string word = testing::WordPool()[rng.Below(5)] + "xy";
      starts.push_back(static_cast<int>(text.size()));
      text += word;
      ends.push_back(static_cast<int>(text.size()));
    }
    std::string annotations;
    std::vector<EntitySpan> aligned;
    int misaligned = 0;
    int id = 1;
    for (int i = 0; i < n;) {
      const int length = 1 + static_cast<int>(rng.Below(2));
      const int last = std::min(n - 1, i + length - 1);
      if (rng.Uniform() < 0.5) {
        int begin = starts[i];
        std::string type = rng.Below(2) ? "Reagent" : "Method";
        if (rng.Uniform() < 0.3) {
          ++begin;  // starts inside the first token
          ++misaligned;
        } else {
          aligned.push_back({i, last, type});
        }
        annotations += "T" + std::to_string(id++) + "\t" + type + " " +
                       std::to_string(begin) + " " +
                       std::to_string(ends[last]) + "\tx\n";
      }
      i = last + 1;
    }
    BratDocument doc = Parse(text, annotations);
    ASSERT_EQ(static_cast<int>(doc.warnings.size()), misaligned);
    std::vector<EntitySpan> decoded = Spans(doc.document, 0);
    std::vector<EntitySpan> exact;
    for (const EntitySpan &span : decoded) {
      if (std::find(aligned.begin(), aligned.end(), span) != aligned.end()) {
        exact.push_back(span);
      }
    }
    ASSERT_EQ(exact, aligned);
    ASSERT_EQ(decoded.size(), aligned.size() + misaligned);
  }
}

TEST(CollectLabelSetTest, FirstOccurrenceOrder) {
  std::vector<Document> docs = {
      testing::MakeDocument("a", {MakeSentence({"x", "y"}, {"B-M", "B-R"})}),
      testing::MakeDocument("b", {MakeSentence({"z"}, {"B-R"})}),
  };
  EXPECT_EQ(CollectLabelSet(docs).types(), (std::vector<std::string>{"M", "R"}));
}

}  // namespace
}  // namespace labner

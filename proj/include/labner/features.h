#ifndef LABNER_FEATURES_H_
#define LABNER_FEATURES_H_

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "labner/corpus.h"

namespace labner {

enum class TemplateKind {
  kBias,
  kWordLower,
  kWordShape,
  kPrefix,
  kSuffix,
  kIsDigit,
  kIsPunct,
  kIsUpper,
  kContainsDigit,
  kGazetteer,
  kSentencePosition,
};

inline constexpr int kMaxWindow = 2;
inline constexpr int kMaxAffix = 4;

struct FeatureTemplate {
  TemplateKind kind = TemplateKind::kBias;
  int affix_length = 0;  // prefix/suffix only, 1..4
  int offset = 0;        // -2..+2

  // Config spelling, e.g. "suffix:3" or "word-lower".
  std::string KindName() const;

  friend bool operator==(const FeatureTemplate &,
                         const FeatureTemplate &) = default;
};

// Lowercase (full Unicode) form used for word and gazetteer features.
std::string FoldCase(std::string_view text);

// "Xxxd"-style shape: X upper, x lower, d digit, other characters kept.
std::string WordShape(std::string_view text);

// Lexicon of one entity type. Entries are stored case-folded and matched
// exactly against case-folded token text.
class Gazetteer {
 public:
  Gazetteer(std::string name, const std::vector<std::string> &entries);

  const std::string &name() const { return name_; }
  int size() const { return static_cast<int>(entries_.size()); }
  bool Contains(std::string_view token) const;
  // Sorted entries.
  std::vector<std::string> Entries() const;

 private:
  std::string name_;
  std::unordered_set<std::string> entries_;
};

// One entry per line; blank lines ignored. Throws DataError if empty.
Gazetteer ReadGazetteer(std::string name, std::istream &in);

// Harvests one gazetteer per entity type from the words inside entity
// spans. A word joins the type's gazetteer if at least `min_ratio` of its
// corpus occurrences (case-folded) fall inside spans of that type.
std::vector<Gazetteer> BuildGazetteers(const Corpus &corpus,
                                       double min_ratio = 0.5);

// The full inventory: bias, lowercased word at -2..+2, shape at -1..+1,
// prefixes and suffixes of 1..4 characters, digit/punctuation/uppercase
// flags, gazetteer membership at -1..+1 and first/last position.
std::vector<FeatureTemplate> DefaultTemplates();

// Declarative template list: one "<kind>[:<k>] <offset>..." line per kind,
// '#' comments. Kinds: bias, word-lower, word-shape, prefix:k, suffix:k,
// is-digit, is-punct, is-upper, contains-digit, gazetteer, sentence-position.
std::vector<FeatureTemplate> ReadTemplates(std::istream &in);
void WriteTemplates(const std::vector<FeatureTemplate> &templates,
                    std::ostream &out);

class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  FeatureExtractor(std::vector<FeatureTemplate> templates,
                   std::vector<Gazetteer> gazetteers);

  const std::vector<FeatureTemplate> &templates() const { return templates_; }
  const std::vector<Gazetteer> &gazetteers() const { return gazetteers_; }

  // Sorted, duplicate-free feature strings at one position. A template whose
  // offset falls outside the sentence contributes a single "BOS[-k]" or
  // "EOS[+k]" boundary feature instead.
  std::vector<std::string> Extract(const std::vector<std::string> &words,
                                   int position) const;

  // Extract() for every position of a sentence.
  std::vector<std::vector<std::string>> ExtractAll(
      const std::vector<std::string> &words) const;

 private:
  std::vector<FeatureTemplate> templates_;
  std::vector<Gazetteer> gazetteers_;
};

}  // namespace labner

#endif  // LABNER_FEATURES_H_

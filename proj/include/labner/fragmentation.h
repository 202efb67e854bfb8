#ifndef LABNER_FRAGMENTATION_H_
#define LABNER_FRAGMENTATION_H_

#include <ostream>
#include <string>
#include <vector>

#include "labner/corpus.h"
#include "labner/subword.h"

namespace labner {

// How badly a vocabulary cuts up the words of a corpus.
struct FragmentationReport {
  struct WordType {
    std::string word;
    int occurrences = 0;
    std::vector<std::string> pieces;
    bool unknown = false;
  };

  // One entry per distinct word, in first-occurrence order.
  std::vector<WordType> types;

  // Token-level aggregates.
  int num_words = 0;
  int num_pieces = 0;
  int num_fragmented = 0;  // words split into two or more pieces
  int num_unknown = 0;     // words mapped to the unknown token

  double MeanPiecesPerWord() const {
    return num_words == 0 ? 0.0 : static_cast<double>(num_pieces) / num_words;
  }
  double FragmentedFraction() const {
    return num_words == 0 ? 0.0
                          : static_cast<double>(num_fragmented) / num_words;
  }

  // Up to k types ordered by piece count, then occurrences, then spelling.
  std::vector<WordType> MostFragmented(int k) const;
};

FragmentationReport BuildFragmentationReport(const Corpus &corpus,
                                             const Vocabulary &vocab);

// Tab-separated: a "#"-prefixed summary block, then one row per word type
// of the top-k list ("word", "count", "pieces", "unknown", "surfaces").
void WriteFragmentationTsv(const FragmentationReport &report, int top_k,
                           std::ostream &out);

}  // namespace labner

#endif  // LABNER_FRAGMENTATION_H_

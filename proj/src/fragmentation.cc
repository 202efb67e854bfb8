#include "labner/fragmentation.h"

#include <algorithm>
#include <iomanip>
#include <unordered_map>

namespace labner {

std::vector<FragmentationReport::WordType> FragmentationReport::MostFragmented(
    int k) const {
  std::vector<WordType> sorted = types;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const WordType &a, const WordType &b) {
                     if (a.pieces.size() != b.pieces.size()) {
                       return a.pieces.size() > b.pieces.size();
                     }
                     if (a.occurrences != b.occurrences) {
                       return a.occurrences > b.occurrences;
                     }
                     return a.word < b.word;
                   });
  if (k >= 0 && static_cast<int>(sorted.size()) > k) sorted.resize(k);
  return sorted;
}

FragmentationReport BuildFragmentationReport(const Corpus &corpus,
                                             const Vocabulary &vocab) {
  FragmentationReport report;
  std::unordered_map<std::string, int> index;
  for (const Document &doc : corpus.documents) {
    for (const Sentence &sentence : doc.sentences) {
      for (const Token &token : sentence.tokens) {
        auto [it, inserted] =
            index.emplace(token.text, static_cast<int>(report.types.size()));
        if (inserted) {
          FragmentationReport::WordType type;
          type.word = token.text;
          type.pieces = WordpieceTokenize(token.text, vocab);
          type.unknown = type.pieces.size() == 1 &&
                         type.pieces[0] == vocab.unknown_token();
          report.types.push_back(std::move(type));
        }
        FragmentationReport::WordType &type = report.types[it->second];
        ++type.occurrences;
        ++report.num_words;
        report.num_pieces += type.pieces.size();
        if (type.pieces.size() >= 2) ++report.num_fragmented;
        if (type.unknown) ++report.num_unknown;
      }
    }
  }
  return report;
}

void WriteFragmentationTsv(const FragmentationReport &report, int top_k,
                           std::ostream &out) {
  out << std::fixed << std::setprecision(4);
  out << "#words\t" << report.num_words << '\n';
  out << "#word_types\t" << report.types.size() << '\n';
  out << "#pieces\t" << report.num_pieces << '\n';
  out << "#mean_pieces_per_word\t" << report.MeanPiecesPerWord() << '\n';
  out << "#fragmented_fraction\t" << report.FragmentedFraction() << '\n';
  out << "#unknown_words\t" << report.num_unknown << '\n';
  out << "word\tcount\tpieces\tunknown\tsurfaces\n";
  for (const auto &type : report.MostFragmented(top_k)) {
    out << type.word << '\t' << type.occurrences << '\t' << type.pieces.size()
        << '\t' << (type.unknown ? 1 : 0) << '\t';
    for (size_t i = 0; i < type.pieces.size(); ++i) {
      if (i > 0) out << ' ';
      out << type.pieces[i];
    }
    out << '\n';
  }
}

}  // namespace labner

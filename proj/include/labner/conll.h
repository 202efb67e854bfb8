#ifndef LABNER_CONLL_H_
#define LABNER_CONLL_H_

#include <istream>
#include <ostream>

#include "labner/corpus.h"

namespace labner {

enum class ColumnSep {
  kWhitespace,  // any run of spaces or tabs
  kTab,         // exactly one tab
};

struct ConllOptions {
  ColumnSep column_sep = ColumnSep::kWhitespace;
  // Accept one-column (token only) sentences, which come out untagged.
  bool allow_untagged = false;
};

// Reads "token<sep>tag" lines. A blank line ends a sentence; "#doc <id>" or
// "-DOCSTART-" starts a new document. Sentences before the first marker go
// to an implicit document. Documents without an explicit id are named
// "doc<k>" by position. The label set lists types in first-occurrence order.
// Sentences whose tags fail BIO validation are kept and flagged unvalidated.
Corpus ParseConll(std::istream &in, const ConllOptions &options = {});

// Writes "#doc <id>" before each document and one tab-separated
// "token\ttag" line per word. Throws DataError on an untagged sentence.
void WriteConll(const Corpus &corpus, std::ostream &out);

// Label-set config: one entity type per line; blank lines and lines starting
// with '#' are ignored.
LabelSet ReadLabelSet(std::istream &in);
void WriteLabelSet(const LabelSet &labels, std::ostream &out);

}  // namespace labner

#endif  // LABNER_CONLL_H_

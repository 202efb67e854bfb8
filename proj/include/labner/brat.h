#ifndef LABNER_BRAT_H_
#define LABNER_BRAT_H_

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "labner/corpus.h"

namespace labner {

struct BratDocument {
  Document document;
  // One entry per annotation that was extended, clipped or skipped.
  std::vector<std::string> warnings;
};

// Builds a tagged document from BRAT standoff annotations. Each non-empty
// line of `text` is a sentence and whitespace runs separate tokens; token
// offsets are code point offsets into `text`. Only "T" lines are consumed.
// An annotation whose range does not fall on token boundaries is extended to
// the covering tokens and reported in `warnings`.
BratDocument ParseBrat(std::string_view text, std::istream &annotations,
                       std::string id);

struct BratFiles {
  std::string text;
  std::string annotations;
};

// Renders a tagged document as standoff. Uses the document's source text and
// offsets when present, otherwise joins tokens with spaces and sentences
// with newlines.
BratFiles WriteBrat(const Document &document);

// Entity types in first-occurrence order over all tagged sentences.
LabelSet CollectLabelSet(const std::vector<Document> &documents);

}  // namespace labner

#endif  // LABNER_BRAT_H_

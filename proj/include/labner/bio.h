#ifndef LABNER_BIO_H_
#define LABNER_BIO_H_

#include <string>
#include <vector>

#include "labner/corpus.h"

namespace labner {

struct BioViolation {
  int position = 0;
  std::string message;
};

enum class RepairMode {
  kBegin,  // a stray I-X starts a new entity: I-X -> B-X
  kMerge,  // a stray I-X continues the running entity of another type
  kDrop,   // a stray I-X is not part of any entity: I-X -> O
};

// Tags a sentence of length n from non-overlapping spans. Adjacent spans of
// the same type are separated by a B- tag on the first word of the second.
// Throws SchemaError on overlapping or out-of-range spans.
std::vector<BioTag> BioEncode(const std::vector<EntitySpan> &spans, int n);

// Inverse of BioEncode on schema-valid input; spans come out sorted by start.
// Throws SchemaError naming the first offending position otherwise.
std::vector<EntitySpan> BioDecode(const std::vector<BioTag> &tags);

// Every position holding an I-X that does not continue an X entity.
std::vector<BioViolation> ValidateBio(const std::vector<BioTag> &tags);

inline bool IsValidBio(const std::vector<BioTag> &tags) {
  return ValidateBio(tags).empty();
}

// Rewrites violations so the result always validates. Valid input is
// returned unchanged.
std::vector<BioTag> RepairBio(const std::vector<BioTag> &tags, RepairMode mode);

// Applies RepairBio to every tagged sentence, clearing the unvalidated flag.
void RepairCorpus(Corpus &corpus, RepairMode mode);

}  // namespace labner

#endif  // LABNER_BIO_H_

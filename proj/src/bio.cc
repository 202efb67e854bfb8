#include "labner/bio.h"

#include <algorithm>
#include <sstream>

#include "labner/error.h"

namespace labner {
namespace {

// An I-X tag is legal only right after B-X or I-X.
bool ContinuesEntity(const BioTag *previous, const BioTag &tag) {
  return previous != nullptr && !previous->outside() &&
         previous->type() == tag.type();
}

}  // namespace

std::vector<BioTag> BioEncode(const std::vector<EntitySpan> &spans, int n) {
  std::vector<const EntitySpan *> sorted;
  for (const EntitySpan &span : spans) {
    if (span.start < 0 || span.end >= n || span.start > span.end) {
      std::ostringstream os;
      os << "span " << span << " outside sentence of length " << n;
      throw SchemaError(os.str());
    }
    CheckTypeName(span.type);
    sorted.push_back(&span);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan *a, const EntitySpan *b) { return *a < *b; });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->start <= sorted[i - 1]->end) {
      std::ostringstream os;
      os << "overlapping spans " << *sorted[i - 1] << " and " << *sorted[i];
      throw SchemaError(os.str());
    }
  }

  std::vector<BioTag> tags(n);
  for (const EntitySpan *span : sorted) {
    tags[span->start] = BioTag::Begin(span->type);
    for (int i = span->start + 1; i <= span->end; ++i) {
      tags[i] = BioTag::Inside(span->type);
    }
  }
  return tags;
}

std::vector<EntitySpan> BioDecode(const std::vector<BioTag> &tags) {
  std::vector<EntitySpan> spans;
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    const BioTag &tag = tags[i];
    if (tag.begin()) {
      spans.push_back({i, i, tag.type()});
    } else if (tag.inside()) {
      const BioTag *previous = i > 0 ? &tags[i - 1] : nullptr;
      if (!ContinuesEntity(previous, tag)) {
        throw SchemaError("invalid BIO sequence at position " +
                          std::to_string(i) + ": " + tag.ToString() +
                          (previous ? " after " + previous->ToString()
                                    : " at sentence start"));
      }
      spans.back().end = i;
    }
  }
  return spans;
}

std::vector<BioViolation> ValidateBio(const std::vector<BioTag> &tags) {
  std::vector<BioViolation> violations;
  for (int i = 0; i < static_cast<int>(tags.size()); ++i) {
    if (!tags[i].inside()) continue;
    const BioTag *previous = i > 0 ? &tags[i - 1] : nullptr;
    if (ContinuesEntity(previous, tags[i])) continue;
    violations.push_back(
        {i, tags[i].ToString() + (previous ? " after " + previous->ToString()
                                           : " at sentence start")});
  }
  return violations;
}

std::vector<BioTag> RepairBio(const std::vector<BioTag> &tags,
                              RepairMode mode) {
  std::vector<BioTag> repaired = tags;
  for (size_t i = 0; i < repaired.size(); ++i) {
    BioTag &tag = repaired[i];
    if (!tag.inside()) continue;
    // Checked against the already repaired prefix.
    const BioTag *previous = i > 0 ? &repaired[i - 1] : nullptr;
    if (ContinuesEntity(previous, tag)) continue;
    if (mode == RepairMode::kDrop) {
      tag = BioTag::Outside();
    } else if (mode == RepairMode::kMerge && previous &&
               !previous->outside()) {
      tag = BioTag::Inside(previous->type());
    } else {
      tag = BioTag::Begin(tag.type());
    }
  }
  return repaired;
}

void RepairCorpus(Corpus &corpus, RepairMode mode) {
  for (Document &doc : corpus.documents) {
    for (Sentence &sentence : doc.sentences) {
      if (!sentence.tags) continue;
      *sentence.tags = RepairBio(*sentence.tags, mode);
      sentence.unvalidated = false;
    }
  }
}

}  // namespace labner

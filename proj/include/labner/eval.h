#ifndef LABNER_EVAL_H_
#define LABNER_EVAL_H_

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "labner/corpus.h"

namespace labner {

enum class MatchMode {
  kExact,    // identical boundaries and type
  kPartial,  // same type, at least one shared word
};

const char *MatchModeName(MatchMode mode);

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;

  // 0/0 is defined as 0 throughout.
  double Precision() const;
  double Recall() const;
  double F1() const;

  MatchCounts &operator+=(const MatchCounts &other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts &, const MatchCounts &) = default;
};

struct EvalReport {
  MatchMode mode = MatchMode::kExact;
  // Every type of the gold label set, then any others alphabetically.
  std::vector<std::pair<std::string, MatchCounts>> per_type;
  MatchCounts micro;

  // Zero counts for a type that never occurs.
  MatchCounts ForType(const std::string &type) const;
};

// For every predicted span the index of the gold span it matched, or -1.
// Predictions are visited left to right and each takes the leftmost eligible
// gold span that is still free.
std::vector<int> MatchSpans(const std::vector<EntitySpan> &gold,
                            const std::vector<EntitySpan> &pred,
                            MatchMode mode);

// Throws DataError naming the first sentence where the two corpora differ in
// document count, sentence count or token count, or that is untagged.
void CheckAligned(const Corpus &gold, const Corpus &pred);

// Entity-level scoring. Both corpora must be tagged with schema-valid
// sequences (repair predictions first otherwise).
EvalReport Evaluate(const Corpus &gold, const Corpus &pred, MatchMode mode);

enum class ErrorCategory {
  kTypeError,      // identical extent, different type
  kBoundaryError,  // one same-type overlap with a different extent
  kFragmentation,  // one gold span covered by two or more same-type preds
  kSpurious,       // prediction with no same-type overlap left to explain it
  kMissed,         // gold span with no prediction left to explain it
};

const char *ErrorCategoryName(ErrorCategory category);

struct SpanError {
  ErrorCategory category = ErrorCategory::kSpurious;
  std::string document;
  int sentence = 0;
  std::vector<EntitySpan> gold;
  std::vector<EntitySpan> pred;
  // Spurious predictions that still overlap a gold span of another type.
  bool overlaps_other_type = false;
};

// Explains every span that is not an exact-match true positive. Categories
// are assigned in the order type error, boundary error, fragmentation,
// spurious/missed, and each false positive or false negative lands in exactly
// one entry.
std::vector<SpanError> BuildErrorReport(const Corpus &gold, const Corpus &pred);

struct AgreementReport {
  double kappa = 0.0;
  double observed = 0.0;
  double expected = 0.0;
  int units = 0;
};

// Cohen's kappa over (category by A, category by B) pairs. Perfect observed
// agreement gives kappa 1 even when expected agreement is also 1.
AgreementReport KappaFromPairs(
    const std::vector<std::pair<std::string, std::string>> &units);

inline constexpr std::string_view kNoEntity = "NONE";

// Span-level agreement. Units are the maximal groups of overlapping spans
// proposed by either annotator within a sentence. Each annotator labels a
// unit with the type of its span overlapping the unit the most (leftmost on
// ties), or NONE. Throws DataError on misaligned corpora or when neither
// annotator marked any span.
AgreementReport CohenKappa(const Corpus &a, const Corpus &b);

// Human-readable side-by-side table of the two regimes.
void WriteEvalTable(const EvalReport &exact, const EvalReport &partial,
                    std::ostream &out);
void WriteEvalTable(const EvalReport &report, std::ostream &out);

// "<mode>.<type|micro>.<field>=<value>" lines.
void WriteEvalKeyValues(const EvalReport &report, std::ostream &out);

}  // namespace labner

#endif  // LABNER_EVAL_H_

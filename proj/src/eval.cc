#include "labner/eval.h"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>

#include "labner/bio.h"
#include "labner/error.h"

namespace labner {
namespace {

double Ratio(int numerator, int denominator) {
  return denominator == 0 ? 0.0
                          : static_cast<double>(numerator) / denominator;
}

const std::vector<BioTag> &TagsOf(const Document &doc, size_t s) {
  return *doc.sentences[s].tags;
}

std::string Where(const Document &doc, size_t s) {
  return "document '" + doc.id + "' sentence " + std::to_string(s);
}

std::vector<EntitySpan> DecodeSentence(const Document &doc, size_t s,
                                       const char *side) {
  try {
    return BioDecode(TagsOf(doc, s));
  } catch (const SchemaError &e) {
    throw SchemaError(std::string(side) + " " + Where(doc, s) + ": " +
                      e.what());
  }
}

std::vector<std::string> OrderedTypes(
    const LabelSet &labels, const std::map<std::string, MatchCounts> &counts) {
  std::vector<std::string> order = labels.types();
  for (const auto &[type, unused] : counts) {
    if (!labels.Contains(type)) order.push_back(type);
  }
  return order;
}

}  // namespace

const char *MatchModeName(MatchMode mode) {
  return mode == MatchMode::kExact ? "exact" : "partial";
}

double MatchCounts::Precision() const { return Ratio(tp, tp + fp); }
double MatchCounts::Recall() const { return Ratio(tp, tp + fn); }
double MatchCounts::F1() const {
  double p = Precision();
  double r = Recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

MatchCounts EvalReport::ForType(const std::string &type) const {
  for (const auto &[name, counts] : per_type) {
    if (name == type) return counts;
  }
  return {};
}

std::vector<int> MatchSpans(const std::vector<EntitySpan> &gold,
                            const std::vector<EntitySpan> &pred,
                            MatchMode mode) {
  std::vector<int> matched(pred.size(), -1);
  std::vector<bool> taken(gold.size(), false);
  for (size_t p = 0; p < pred.size(); ++p) {
    for (size_t g = 0; g < gold.size(); ++g) {
      if (taken[g] || gold[g].type != pred[p].type) continue;
      bool eligible = mode == MatchMode::kExact ? gold[g] == pred[p]
                                                : gold[g].Overlaps(pred[p]);
      if (eligible) {
        matched[p] = static_cast<int>(g);
        taken[g] = true;
        break;
      }
    }
  }
  return matched;
}

void CheckAligned(const Corpus &gold, const Corpus &pred) {
  if (gold.documents.size() != pred.documents.size()) {
    throw DataError("gold has " + std::to_string(gold.documents.size()) +
                    " documents, prediction has " +
                    std::to_string(pred.documents.size()));
  }
  for (size_t d = 0; d < gold.documents.size(); ++d) {
    const Document &g = gold.documents[d];
    const Document &p = pred.documents[d];
    for (size_t s = 0; s < std::max(g.sentences.size(), p.sentences.size());
         ++s) {
      if (s >= g.sentences.size() || s >= p.sentences.size()) {
        throw DataError("sentence counts diverge at " + Where(g, s) +
                        " (gold " + std::to_string(g.sentences.size()) +
                        ", prediction " + std::to_string(p.sentences.size()) +
                        ")");
      }
      if (g.sentences[s].size() != p.sentences[s].size()) {
        throw DataError("token counts diverge at " + Where(g, s) + " (gold " +
                        std::to_string(g.sentences[s].size()) +
                        ", prediction " +
                        std::to_string(p.sentences[s].size()) + ")");
      }
      if (!g.sentences[s].tags || !p.sentences[s].tags) {
        throw DataError("untagged sentence at " + Where(g, s));
      }
    }
  }
}

EvalReport Evaluate(const Corpus &gold, const Corpus &pred, MatchMode mode) {
  CheckAligned(gold, pred);
  std::map<std::string, MatchCounts> counts;
  for (size_t d = 0; d < gold.documents.size(); ++d) {
    const Document &gold_doc = gold.documents[d];
    for (size_t s = 0; s < gold_doc.sentences.size(); ++s) {
      auto gold_spans = DecodeSentence(gold_doc, s, "gold");
      auto pred_spans = DecodeSentence(pred.documents[d], s, "prediction");
      std::vector<int> matched = MatchSpans(gold_spans, pred_spans, mode);
      std::vector<bool> gold_hit(gold_spans.size(), false);
      for (size_t p = 0; p < pred_spans.size(); ++p) {
        if (matched[p] >= 0) {
          ++counts[pred_spans[p].type].tp;
          gold_hit[matched[p]] = true;
        } else {
          ++counts[pred_spans[p].type].fp;
        }
      }
      for (size_t g = 0; g < gold_spans.size(); ++g) {
        if (!gold_hit[g]) ++counts[gold_spans[g].type].fn;
      }
    }
  }
  EvalReport report;
  report.mode = mode;
  for (const std::string &type : OrderedTypes(gold.label_set, counts)) {
    report.per_type.emplace_back(type, counts[type]);
    report.micro += counts[type];
  }
  return report;
}

const char *ErrorCategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kTypeError:
      return "type-error";
    case ErrorCategory::kBoundaryError:
      return "boundary-error";
    case ErrorCategory::kFragmentation:
      return "fragmentation";
    case ErrorCategory::kSpurious:
      return "spurious";
    case ErrorCategory::kMissed:
      return "missed";
  }
  return "unknown";
}

std::vector<SpanError> BuildErrorReport(const Corpus &gold,
                                        const Corpus &pred) {
  CheckAligned(gold, pred);
  std::vector<SpanError> errors;
  for (size_t d = 0; d < gold.documents.size(); ++d) {
    const Document &gold_doc = gold.documents[d];
    for (size_t s = 0; s < gold_doc.sentences.size(); ++s) {
      auto gold_spans = DecodeSentence(gold_doc, s, "gold");
      auto pred_spans = DecodeSentence(pred.documents[d], s, "prediction");
      std::vector<bool> gold_used(gold_spans.size(), false);
      std::vector<bool> pred_used(pred_spans.size(), false);
      auto emit = [&](ErrorCategory category, std::vector<size_t> golds,
                      std::vector<size_t> preds) {
        SpanError error;
        error.category = category;
        error.document = gold_doc.id;
        error.sentence = static_cast<int>(s);
        for (size_t g : golds) {
          gold_used[g] = true;
          error.gold.push_back(gold_spans[g]);
        }
        for (size_t p : preds) {
          pred_used[p] = true;
          error.pred.push_back(pred_spans[p]);
        }
        errors.push_back(std::move(error));
        return &errors.back();
      };

      std::vector<int> exact =
          MatchSpans(gold_spans, pred_spans, MatchMode::kExact);
      for (size_t p = 0; p < pred_spans.size(); ++p) {
        if (exact[p] >= 0) {
          pred_used[p] = true;
          gold_used[exact[p]] = true;
        }
      }

      for (size_t g = 0; g < gold_spans.size(); ++g) {
        if (gold_used[g]) continue;
        for (size_t p = 0; p < pred_spans.size(); ++p) {
          if (pred_used[p]) continue;
          if (pred_spans[p].start == gold_spans[g].start &&
              pred_spans[p].end == gold_spans[g].end) {
            emit(ErrorCategory::kTypeError, {g}, {p});
            break;
          }
        }
      }

      for (size_t g = 0; g < gold_spans.size(); ++g) {
        if (gold_used[g]) continue;
        std::vector<size_t> overlapping;
        for (size_t p = 0; p < pred_spans.size(); ++p) {
          if (!pred_used[p] && pred_spans[p].type == gold_spans[g].type &&
              pred_spans[p].Overlaps(gold_spans[g])) {
            overlapping.push_back(p);
          }
        }
        if (overlapping.size() == 1) {
          emit(ErrorCategory::kBoundaryError, {g}, overlapping);
        } else if (overlapping.size() >= 2) {
          emit(ErrorCategory::kFragmentation, {g}, overlapping);
        }
      }

      for (size_t p = 0; p < pred_spans.size(); ++p) {
        if (pred_used[p]) continue;
        SpanError *error = emit(ErrorCategory::kSpurious, {}, {p});
        for (const EntitySpan &g : gold_spans) {
          if (g.Overlaps(pred_spans[p])) error->overlaps_other_type = true;
        }
      }
      for (size_t g = 0; g < gold_spans.size(); ++g) {
        if (!gold_used[g]) emit(ErrorCategory::kMissed, {g}, {});
      }
    }
  }
  return errors;
}

AgreementReport KappaFromPairs(
    const std::vector<std::pair<std::string, std::string>> &units) {
  if (units.empty()) throw DataError("no annotation units to compare");
  std::map<std::string, int> count_a;
  std::map<std::string, int> count_b;
  int agree = 0;
  for (const auto &[a, b] : units) {
    ++count_a[a];
    ++count_b[b];
    if (a == b) ++agree;
  }
  const double n = static_cast<double>(units.size());
  AgreementReport report;
  report.units = static_cast<int>(units.size());
  report.observed = agree / n;
  for (const auto &[category, count] : count_a) {
    auto it = count_b.find(category);
    if (it != count_b.end()) report.expected += (count / n) * (it->second / n);
  }
  if (agree == report.units) {
    report.kappa = 1.0;
  } else {
    report.kappa = (report.observed - report.expected) / (1.0 - report.expected);
  }
  return report;
}

AgreementReport CohenKappa(const Corpus &a, const Corpus &b) {
  CheckAligned(a, b);
  std::vector<std::pair<std::string, std::string>> units;
  for (size_t d = 0; d < a.documents.size(); ++d) {
    const Document &doc_a = a.documents[d];
    for (size_t s = 0; s < doc_a.sentences.size(); ++s) {
      auto spans_a = DecodeSentence(doc_a, s, "annotator A");
      auto spans_b = DecodeSentence(b.documents[d], s, "annotator B");
      std::vector<EntitySpan> all = spans_a;
      all.insert(all.end(), spans_b.begin(), spans_b.end());
      std::sort(all.begin(), all.end());

      std::vector<EntitySpan> merged;
      for (const EntitySpan &span : all) {
        if (!merged.empty() && span.start <= merged.back().end) {
          merged.back().end = std::max(merged.back().end, span.end);
        } else {
          merged.push_back({span.start, span.end, ""});
        }
      }
      auto category = [](const std::vector<EntitySpan> &spans,
                         const EntitySpan &unit) {
        const EntitySpan *best = nullptr;
        int best_overlap = 0;
        for (const EntitySpan &span : spans) {
          int overlap = std::min(span.end, unit.end) -
                        std::max(span.start, unit.start) + 1;
          if (overlap > best_overlap) {
            best = &span;
            best_overlap = overlap;
          }
        }
        return best ? best->type : std::string(kNoEntity);
      };
      for (const EntitySpan &unit : merged) {
        units.emplace_back(category(spans_a, unit), category(spans_b, unit));
      }
    }
  }
  return KappaFromPairs(units);
}

namespace {

void WriteRow(std::ostream &out, const std::string &name,
              const MatchCounts &exact, const MatchCounts *partial) {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer), "%-24s %5d %5d %5d  %.3f  %.3f  %.3f",
                name.c_str(), exact.tp, exact.fp, exact.fn, exact.Precision(),
                exact.Recall(), exact.F1());
  out << buffer;
  if (partial) {
    std::snprintf(buffer, sizeof(buffer),
                  "   | %5d %5d %5d  %.3f  %.3f  %.3f", partial->tp,
                  partial->fp, partial->fn, partial->Precision(),
                  partial->Recall(), partial->F1());
    out << buffer;
  }
  out << '\n';
}

}  // namespace

void WriteEvalTable(const EvalReport &exact, const EvalReport &partial,
                    std::ostream &out) {
  const std::string columns =
      "type                        tp    fp    fn  P      R      F1      ";
  out << std::string(28, ' ') << std::left
      << std::setw(columns.size() - 28) << "exact match" << "|    partial match\n";
  out << columns << "|    tp    fp    fn  P      R      F1\n";
  for (const auto &[type, counts] : exact.per_type) {
    MatchCounts other = partial.ForType(type);
    WriteRow(out, type, counts, &other);
  }
  WriteRow(out, "micro", exact.micro, &partial.micro);
}

void WriteEvalTable(const EvalReport &report, std::ostream &out) {
  out << MatchModeName(report.mode) << " match\n";
  out << "type                        tp    fp    fn  P      R      F1\n";
  for (const auto &[type, counts] : report.per_type) {
    WriteRow(out, type, counts, nullptr);
  }
  WriteRow(out, "micro", report.micro, nullptr);
}

void WriteEvalKeyValues(const EvalReport &report, std::ostream &out) {
  auto write = [&](const std::string &name, const MatchCounts &counts) {
    const std::string prefix =
        std::string(MatchModeName(report.mode)) + "." + name + ".";
    char buffer[64];
    out << prefix << "tp=" << counts.tp << '\n';
    out << prefix << "fp=" << counts.fp << '\n';
    out << prefix << "fn=" << counts.fn << '\n';
    std::snprintf(buffer, sizeof(buffer), "%.6f", counts.Precision());
    out << prefix << "precision=" << buffer << '\n';
    std::snprintf(buffer, sizeof(buffer), "%.6f", counts.Recall());
    out << prefix << "recall=" << buffer << '\n';
    std::snprintf(buffer, sizeof(buffer), "%.6f", counts.F1());
    out << prefix << "f1=" << buffer << '\n';
  };
  for (const auto &[type, counts] : report.per_type) write(type, counts);
  write("micro", report.micro);
}

}  // namespace labner

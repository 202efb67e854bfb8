#include "labner/features.h"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "labner/bio.h"
#include "labner/error.h"
#include "labner/text.h"

namespace labner {
namespace {

struct KindInfo {
  TemplateKind kind;
  const char *name;
};

constexpr KindInfo kKinds[] = {
    {TemplateKind::kBias, "bias"},
    {TemplateKind::kWordLower, "word-lower"},
    {TemplateKind::kWordShape, "word-shape"},
    {TemplateKind::kPrefix, "prefix"},
    {TemplateKind::kSuffix, "suffix"},
    {TemplateKind::kIsDigit, "is-digit"},
    {TemplateKind::kIsPunct, "is-punct"},
    {TemplateKind::kIsUpper, "is-upper"},
    {TemplateKind::kContainsDigit, "contains-digit"},
    {TemplateKind::kGazetteer, "gazetteer"},
    {TemplateKind::kSentencePosition, "sentence-position"},
};

std::vector<UChar32> CodePoints(std::string_view text) {
  std::vector<UChar32> result;
  const auto *bytes = reinterpret_cast<const uint8_t *>(text.data());
  int32_t length = static_cast<int32_t>(text.size());
  for (int32_t i = 0; i < length;) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    result.push_back(c);
  }
  return result;
}

std::string FromCodePoints(const std::vector<UChar32> &cps, size_t begin,
                           size_t end) {
  icu::UnicodeString text;
  for (size_t i = begin; i < end; ++i) text.append(cps[i]);
  std::string result;
  text.toUTF8String(result);
  return result;
}

// Per-word attributes shared by all templates looking at that word.
struct WordInfo {
  std::string lower;
  std::string shape;
  std::vector<UChar32> cps;
  bool all_digit = true;
  bool all_punct = true;
  bool has_digit = false;
  bool has_letter = false;
  bool all_upper = true;
};

WordInfo Analyze(std::string_view word) {
  WordInfo info;
  info.lower = FoldCase(word);
  info.shape = WordShape(word);
  info.cps = CodePoints(word);
  for (UChar32 c : info.cps) {
    bool digit = u_isdigit(c);
    info.all_digit &= digit;
    info.has_digit |= digit;
    info.all_punct &= static_cast<bool>(u_ispunct(c));
    if (u_isalpha(c)) {
      info.has_letter = true;
      info.all_upper &= static_cast<bool>(u_isupper(c));
    }
  }
  if (info.cps.empty()) info.all_digit = info.all_punct = false;
  return info;
}

std::string OffsetTag(int offset) {
  if (offset > 0) return "[+" + std::to_string(offset) + "]";
  return "[" + std::to_string(offset) + "]";
}

void Emit(const FeatureTemplate &tmpl, const WordInfo &info, int position,
          int n, const std::vector<Gazetteer> &gazetteers,
          std::vector<std::string> &out) {
  const std::string at = OffsetTag(tmpl.offset);
  switch (tmpl.kind) {
    case TemplateKind::kBias:
      out.push_back("bias" + at);
      break;
    case TemplateKind::kWordLower:
      out.push_back("w" + at + "=" + info.lower);
      break;
    case TemplateKind::kWordShape:
      out.push_back("shape" + at + "=" + info.shape);
      break;
    case TemplateKind::kPrefix:
      if (static_cast<int>(info.cps.size()) >= tmpl.affix_length) {
        out.push_back("pre" + std::to_string(tmpl.affix_length) + at + "=" +
                      FromCodePoints(info.cps, 0, tmpl.affix_length));
      }
      break;
    case TemplateKind::kSuffix:
      if (static_cast<int>(info.cps.size()) >= tmpl.affix_length) {
        out.push_back("suf" + std::to_string(tmpl.affix_length) + at + "=" +
                      FromCodePoints(info.cps,
                                     info.cps.size() - tmpl.affix_length,
                                     info.cps.size()));
      }
      break;
    case TemplateKind::kIsDigit:
      if (info.all_digit) out.push_back("digit" + at);
      break;
    case TemplateKind::kIsPunct:
      if (info.all_punct) out.push_back("punct" + at);
      break;
    case TemplateKind::kIsUpper:
      if (info.has_letter && info.all_upper) out.push_back("upper" + at);
      break;
    case TemplateKind::kContainsDigit:
      if (info.has_digit) out.push_back("hasdigit" + at);
      break;
    case TemplateKind::kGazetteer:
      for (const Gazetteer &gazetteer : gazetteers) {
        if (gazetteer.Contains(info.lower)) {
          out.push_back("gaz" + at + "=" + gazetteer.name());
        }
      }
      break;
    case TemplateKind::kSentencePosition:
      if (position == 0) out.push_back("first" + at);
      if (position == n - 1) out.push_back("last" + at);
      break;
  }
}

}  // namespace

std::string FeatureTemplate::KindName() const {
  for (const KindInfo &info : kKinds) {
    if (info.kind != kind) continue;
    if (kind == TemplateKind::kPrefix || kind == TemplateKind::kSuffix) {
      return std::string(info.name) + ":" + std::to_string(affix_length);
    }
    return info.name;
  }
  return "unknown";
}

std::string FoldCase(std::string_view text) {
  icu::UnicodeString unicode = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  unicode.toLower();
  std::string result;
  unicode.toUTF8String(result);
  return result;
}

std::string WordShape(std::string_view text) {
  std::string shape;
  for (UChar32 c : CodePoints(text)) {
    if (u_isupper(c)) {
      shape += 'X';
    } else if (u_islower(c)) {
      shape += 'x';
    } else if (u_isdigit(c)) {
      shape += 'd';
    } else {
      icu::UnicodeString single(c);
      single.toUTF8String(shape);
    }
  }
  return shape;
}

Gazetteer::Gazetteer(std::string name, const std::vector<std::string> &entries)
    : name_(std::move(name)) {
  if (name_.empty() || name_.find_first_of(" \t\n") != std::string::npos) {
    throw DataError("bad gazetteer name '" + name_ + "'");
  }
  for (const std::string &entry : entries) {
    std::string_view trimmed = Trim(entry);
    if (!trimmed.empty()) entries_.insert(FoldCase(trimmed));
  }
  if (entries_.empty()) throw DataError("gazetteer '" + name_ + "' is empty");
}

bool Gazetteer::Contains(std::string_view token) const {
  return entries_.count(FoldCase(token)) > 0;
}

std::vector<std::string> Gazetteer::Entries() const {
  std::vector<std::string> sorted(entries_.begin(), entries_.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted;
}

Gazetteer ReadGazetteer(std::string name, std::istream &in) {
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) entries.push_back(line);
  return Gazetteer(std::move(name), entries);
}

std::vector<Gazetteer> BuildGazetteers(const Corpus &corpus,
                                       double min_ratio) {
  std::unordered_map<std::string, int> occurrences;
  std::map<std::string, std::map<std::string, int>> inside;  // type -> word
  for (const Document &doc : corpus.documents) {
    for (const Sentence &sentence : doc.sentences) {
      if (!sentence.tags) continue;
      std::vector<std::string> lower;
      for (const Token &token : sentence.tokens) {
        lower.push_back(FoldCase(token.text));
        ++occurrences[lower.back()];
      }
      for (const EntitySpan &span : BioDecode(*sentence.tags)) {
        for (int i = span.start; i <= span.end; ++i) {
          ++inside[span.type][lower[i]];
        }
      }
    }
  }
  std::vector<Gazetteer> gazetteers;
  for (const std::string &type : corpus.label_set.types()) {
    std::vector<std::string> entries;
    for (const auto &[word, count] : inside[type]) {
      if (count >= min_ratio * occurrences[word]) entries.push_back(word);
    }
    if (!entries.empty()) gazetteers.emplace_back(type, entries);
  }
  return gazetteers;
}

std::vector<FeatureTemplate> DefaultTemplates() {
  std::vector<FeatureTemplate> templates;
  templates.push_back({TemplateKind::kBias, 0, 0});
  for (int offset = -2; offset <= 2; ++offset) {
    templates.push_back({TemplateKind::kWordLower, 0, offset});
  }
  for (int offset = -1; offset <= 1; ++offset) {
    templates.push_back({TemplateKind::kWordShape, 0, offset});
  }
  for (int k = 1; k <= kMaxAffix; ++k) {
    templates.push_back({TemplateKind::kPrefix, k, 0});
    templates.push_back({TemplateKind::kSuffix, k, 0});
  }
  templates.push_back({TemplateKind::kIsDigit, 0, 0});
  templates.push_back({TemplateKind::kIsPunct, 0, 0});
  templates.push_back({TemplateKind::kIsUpper, 0, 0});
  templates.push_back({TemplateKind::kContainsDigit, 0, 0});
  for (int offset = -1; offset <= 1; ++offset) {
    templates.push_back({TemplateKind::kGazetteer, 0, offset});
  }
  templates.push_back({TemplateKind::kSentencePosition, 0, 0});
  return templates;
}

std::vector<FeatureTemplate> ReadTemplates(std::istream &in) {
  std::vector<FeatureTemplate> templates;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = Trim(line);
    if (view.empty() || view[0] == '#') continue;
    auto fields = SplitWhitespace(view);
    std::string_view spelling = fields[0];
    int affix = 0;
    size_t colon = spelling.find(':');
    std::string_view kind_name = spelling.substr(0, colon);
    if (colon != std::string_view::npos) {
      std::string_view k = spelling.substr(colon + 1);
      if (k.size() != 1 || k[0] < '1' || k[0] > '0' + kMaxAffix) {
        throw ParseError(line_number, "affix length must be 1.." +
                                          std::to_string(kMaxAffix));
      }
      affix = k[0] - '0';
    }
    std::optional<TemplateKind> kind;
    for (const KindInfo &info : kKinds) {
      if (kind_name == info.name) kind = info.kind;
    }
    if (!kind) {
      throw ParseError(line_number,
                       "unknown template kind '" + std::string(kind_name) + "'");
    }
    bool affix_kind =
        *kind == TemplateKind::kPrefix || *kind == TemplateKind::kSuffix;
    if (affix_kind != (affix > 0)) {
      throw ParseError(line_number, affix_kind
                                        ? "prefix/suffix need ':<length>'"
                                        : "only prefix/suffix take a length");
    }
    if (fields.size() < 2) {
      throw ParseError(line_number, "template lists no offsets");
    }
    for (size_t i = 1; i < fields.size(); ++i) {
      int offset = 0;
      try {
        size_t used = 0;
        offset = std::stoi(std::string(fields[i]), &used);
        if (used != fields[i].size()) throw std::invalid_argument("");
      } catch (const std::exception &) {
        throw ParseError(line_number,
                         "bad offset '" + std::string(fields[i]) + "'");
      }
      if (offset < -kMaxWindow || offset > kMaxWindow) {
        throw ParseError(line_number, "offset outside -2..+2");
      }
      templates.push_back({*kind, affix, offset});
    }
  }
  return templates;
}

void WriteTemplates(const std::vector<FeatureTemplate> &templates,
                    std::ostream &out) {
  // Consecutive templates of one kind share a line.
  for (size_t i = 0; i < templates.size();) {
    std::string name = templates[i].KindName();
    out << name;
    while (i < templates.size() && templates[i].KindName() == name) {
      out << ' ' << templates[i].offset;
      ++i;
    }
    out << '\n';
  }
}

FeatureExtractor::FeatureExtractor(std::vector<FeatureTemplate> templates,
                                   std::vector<Gazetteer> gazetteers)
    : templates_(std::move(templates)), gazetteers_(std::move(gazetteers)) {
  for (const FeatureTemplate &tmpl : templates_) {
    if (tmpl.offset < -kMaxWindow || tmpl.offset > kMaxWindow) {
      throw DataError("template offset outside -2..+2");
    }
  }
}

std::vector<std::string> FeatureExtractor::Extract(
    const std::vector<std::string> &words, int position) const {
  const int n = static_cast<int>(words.size());
  std::vector<std::string> features;
  std::vector<std::optional<WordInfo>> window(2 * kMaxWindow + 1);
  for (const FeatureTemplate &tmpl : templates_) {
    int target = position + tmpl.offset;
    if (target < 0) {
      features.push_back("BOS" + OffsetTag(tmpl.offset));
      continue;
    }
    if (target >= n) {
      features.push_back("EOS" + OffsetTag(tmpl.offset));
      continue;
    }
    auto &info = window[tmpl.offset + kMaxWindow];
    if (!info) info = Analyze(words[target]);
    Emit(tmpl, *info, target, n, gazetteers_, features);
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()),
                 features.end());
  return features;
}

std::vector<std::vector<std::string>> FeatureExtractor::ExtractAll(
    const std::vector<std::string> &words) const {
  std::vector<std::vector<std::string>> all;
  all.reserve(words.size());
  for (int i = 0; i < static_cast<int>(words.size()); ++i) {
    all.push_back(Extract(words, i));
  }
  return all;
}

}  // namespace labner

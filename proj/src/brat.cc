#include "labner/brat.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "labner/bio.h"
#include "labner/error.h"
#include "labner/text.h"

namespace labner {
namespace {

struct TextAnnotation {
  std::string id;
  std::string type;
  int start = 0;  // code points, half-open
  int end = 0;
  bool discontinuous = false;
};

int ParseOffset(std::string_view field, int line_number) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    throw ParseError(line_number,
                     "bad character offset '" + std::string(field) + "'");
  }
  return value;
}

TextAnnotation ParseTextBound(std::string_view line, int line_number) {
  auto fields = Split(line, '\t');
  if (fields.size() < 2) {
    throw ParseError(line_number, "text-bound annotation needs 3 fields");
  }
  TextAnnotation annotation;
  annotation.id = fields[0];
  auto type_and_ranges = SplitWhitespace(fields[1]);
  // Discontinuous ranges look like "Type 0 5;8 12".
  std::string ranges;
  for (size_t i = 1; i < type_and_ranges.size(); ++i) {
    if (i > 1) ranges += ' ';
    ranges += type_and_ranges[i];
  }
  if (type_and_ranges.size() < 3) {
    throw ParseError(line_number, "expected '<Type> <start> <end>'");
  }
  annotation.type = std::string(type_and_ranges[0]);
  bool first = true;
  for (const std::string &fragment : Split(ranges, ';')) {
    auto offsets = SplitWhitespace(fragment);
    if (offsets.size() != 2) {
      throw ParseError(line_number, "bad range '" + fragment + "'");
    }
    int start = ParseOffset(offsets[0], line_number);
    int end = ParseOffset(offsets[1], line_number);
    if (end <= start) throw ParseError(line_number, "empty character range");
    if (first) {
      annotation.start = start;
      annotation.end = end;
      first = false;
    } else {
      annotation.discontinuous = true;
      annotation.start = std::min(annotation.start, start);
      annotation.end = std::max(annotation.end, end);
    }
  }
  try {
    CheckTypeName(annotation.type);
  } catch (const SchemaError &e) {
    throw ParseError(line_number, e.what());
  }
  return annotation;
}

}  // namespace

BratDocument ParseBrat(std::string_view text, std::istream &annotations,
                       std::string id) {
  BratDocument result;
  Document &doc = result.document;
  doc.id = std::move(id);
  doc.source_text = std::string(text);

  std::vector<int> offsets = CodePointOffsets(text);
  const int num_code_points = static_cast<int>(offsets.size()) - 1;
  auto to_code_point = [&](size_t byte) {
    return static_cast<int>(
        std::lower_bound(offsets.begin(), offsets.end(), static_cast<int>(byte)) -
        offsets.begin());
  };

  size_t line_begin = 0;
  while (line_begin <= text.size()) {
    size_t line_end = text.find('\n', line_begin);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::string_view line = text.substr(line_begin, line_end - line_begin);
    Sentence sentence;
    for (std::string_view word : SplitWhitespace(line)) {
      size_t byte = line_begin + (word.data() - line.data());
      CharSpan span{to_code_point(byte), to_code_point(byte + word.size())};
      sentence.tokens.push_back({std::string(word), span});
    }
    if (!sentence.tokens.empty()) doc.sentences.push_back(std::move(sentence));
    line_begin = line_end + 1;
  }

  std::vector<std::vector<EntitySpan>> spans(doc.sentences.size());
  std::string line;
  int line_number = 0;
  while (std::getline(annotations, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] != 'T') continue;
    TextAnnotation annotation = ParseTextBound(line, line_number);
    if (annotation.end > num_code_points) {
      throw DataError("annotation " + annotation.id + " range [" +
                      std::to_string(annotation.start) + "," +
                      std::to_string(annotation.end) +
                      ") exceeds text length " +
                      std::to_string(num_code_points));
    }
    if (annotation.discontinuous) {
      result.warnings.push_back(annotation.id +
                                ": discontinuous range merged into one span");
    }

    int sentence_index = -1;
    int first = -1;
    int last = -1;
    bool crosses = false;
    for (int s = 0; s < static_cast<int>(doc.sentences.size()); ++s) {
      const auto &tokens = doc.sentences[s].tokens;
      for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
        const CharSpan &range = *tokens[t].offsets;
        if (range.end <= annotation.start || range.start >= annotation.end) {
          continue;
        }
        if (sentence_index == -1) {
          sentence_index = s;
          first = t;
        }
        if (s == sentence_index) {
          last = t;
        } else {
          crosses = true;
        }
      }
    }
    if (sentence_index == -1) {
      result.warnings.push_back(annotation.id +
                                ": range covers no token, skipped");
      continue;
    }
    const auto &tokens = doc.sentences[sentence_index].tokens;
    if (crosses) {
      result.warnings.push_back(annotation.id +
                                ": range crosses a line break, clipped to "
                                "its first line");
    } else if (tokens[first].offsets->start != annotation.start ||
               tokens[last].offsets->end != annotation.end) {
      result.warnings.push_back(
          annotation.id + ": range [" + std::to_string(annotation.start) +
          "," + std::to_string(annotation.end) +
          ") not on token boundaries, extended to [" +
          std::to_string(tokens[first].offsets->start) + "," +
          std::to_string(tokens[last].offsets->end) + ")");
    }
    spans[sentence_index].push_back({first, last, annotation.type});
  }

  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    auto &candidates = spans[s];
    // Longer spans win among those starting at the same word.
    std::sort(candidates.begin(), candidates.end(),
              [](const EntitySpan &a, const EntitySpan &b) {
                if (a.start != b.start) return a.start < b.start;
                return a.end > b.end;
              });
    std::vector<EntitySpan> kept;
    for (const EntitySpan &span : candidates) {
      if (!kept.empty() && span.start <= kept.back().end) {
        if (span == kept.back()) continue;
        std::ostringstream os;
        os << "sentence " << s << ": span " << span << " overlaps "
           << kept.back() << ", skipped";
        result.warnings.push_back(os.str());
        continue;
      }
      kept.push_back(span);
    }
    doc.sentences[s].tags = BioEncode(kept, doc.sentences[s].size());
  }
  return result;
}

BratFiles WriteBrat(const Document &document) {
  BratFiles files;
  std::vector<std::vector<CharSpan>> offsets;
  bool has_offsets = document.source_text.has_value();
  for (const Sentence &sentence : document.sentences) {
    for (const Token &token : sentence.tokens) {
      if (!token.offsets) has_offsets = false;
    }
  }
  if (has_offsets) {
    files.text = *document.source_text;
    for (const Sentence &sentence : document.sentences) {
      auto &row = offsets.emplace_back();
      for (const Token &token : sentence.tokens) row.push_back(*token.offsets);
    }
  } else {
    int position = 0;
    for (size_t s = 0; s < document.sentences.size(); ++s) {
      if (s > 0) {
        files.text += '\n';
        ++position;
      }
      auto &row = offsets.emplace_back();
      const auto &tokens = document.sentences[s].tokens;
      for (size_t t = 0; t < tokens.size(); ++t) {
        if (t > 0) {
          files.text += ' ';
          ++position;
        }
        int length = static_cast<int>(CodePointOffsets(tokens[t].text).size()) - 1;
        row.push_back({position, position + length});
        files.text += tokens[t].text;
        position += length;
      }
    }
    files.text += '\n';
  }

  std::vector<int> cp = CodePointOffsets(files.text);
  std::ostringstream ann;
  int next_id = 1;
  for (size_t s = 0; s < document.sentences.size(); ++s) {
    const Sentence &sentence = document.sentences[s];
    if (!sentence.tags) {
      throw DataError("document '" + document.id + "' sentence " +
                      std::to_string(s) + " is untagged");
    }
    for (const EntitySpan &span : BioDecode(*sentence.tags)) {
      int start = offsets[s][span.start].start;
      int end = offsets[s][span.end].end;
      std::string surface = files.text.substr(cp[start], cp[end] - cp[start]);
      std::replace(surface.begin(), surface.end(), '\n', ' ');
      ann << 'T' << next_id++ << '\t' << span.type << ' ' << start << ' '
          << end << '\t' << surface << '\n';
    }
  }
  files.annotations = ann.str();
  return files;
}

LabelSet CollectLabelSet(const std::vector<Document> &documents) {
  LabelSet labels;
  for (const Document &doc : documents) {
    for (const Sentence &sentence : doc.sentences) {
      if (!sentence.tags) continue;
      for (const BioTag &tag : *sentence.tags) {
        if (!tag.outside()) labels.Add(tag.type());
      }
    }
  }
  return labels;
}

}  // namespace labner

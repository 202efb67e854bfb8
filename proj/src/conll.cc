#include "labner/conll.h"

#include <string>
#include <unordered_set>
#include <vector>

#include "labner/bio.h"
#include "labner/error.h"
#include "labner/text.h"

namespace labner {
namespace {

std::vector<std::string_view> SplitColumns(std::string_view line,
                                           ColumnSep sep) {
  if (sep == ColumnSep::kWhitespace) return SplitWhitespace(line);
  std::vector<std::string_view> columns;
  size_t begin = 0;
  while (true) {
    size_t tab = line.find('\t', begin);
    columns.push_back(line.substr(begin, tab - begin));
    if (tab == std::string_view::npos) break;
    begin = tab + 1;
  }
  return columns;
}

class ConllReader {
 public:
  explicit ConllReader(const ConllOptions &options) : options_(options) {}

  Corpus Read(std::istream &in) {
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string_view view = Trim(line);
      if (view.empty()) {
        FlushSentence(line_number);
        continue;
      }
      if (view.rfind("#doc", 0) == 0 &&
          (view.size() == 4 || view[4] == ' ' || view[4] == '\t')) {
        StartDocument(std::string(Trim(view.substr(4))), line_number);
        continue;
      }
      if (view.rfind("-DOCSTART-", 0) == 0) {
        StartDocument("", line_number);
        continue;
      }
      AddLine(view, line_number);
    }
    FlushSentence(line_number + 1);
    return std::move(corpus_);
  }

 private:
  void StartDocument(std::string id, int line_number) {
    FlushSentence(line_number);
    AddDocument(std::move(id), line_number);
  }

  void AddDocument(std::string id, int line_number) {
    if (id.empty()) {
      id = "doc" + std::to_string(corpus_.documents.size());
    }
    if (!ids_.insert(id).second) {
      throw ParseError(line_number, "duplicate document id '" + id + "'");
    }
    corpus_.documents.push_back({id, {}, {}});
  }

  void AddLine(std::string_view line, int line_number) {
    auto columns = SplitColumns(line, options_.column_sep);
    bool tagged = columns.size() == 2;
    if (!tagged && !(options_.allow_untagged && columns.size() == 1)) {
      throw ParseError(line_number,
                       "expected 2 columns, found " +
                           std::to_string(columns.size()));
    }
    if (columns[0].empty()) throw ParseError(line_number, "empty token");
    if (current_.tokens.empty()) {
      sentence_tagged_ = tagged;
    } else if (sentence_tagged_ != tagged) {
      throw ParseError(line_number, "sentence mixes tagged and untagged lines");
    }
    current_.tokens.push_back({std::string(columns[0]), {}});
    if (!tagged) return;
    auto tag = BioTag::Parse(columns[1]);
    if (!tag) {
      throw ParseError(line_number, "tag '" + std::string(columns[1]) +
                                        "' does not match O|[BI]-.+");
    }
    if (!tag->outside()) {
      try {
        corpus_.label_set.Add(tag->type());
      } catch (const SchemaError &e) {
        throw ParseError(line_number, e.what());
      }
    }
    if (!current_.tags) current_.tags.emplace();
    current_.tags->push_back(std::move(*tag));
  }

  void FlushSentence(int line_number) {
    if (current_.tokens.empty()) return;
    if (corpus_.documents.empty()) AddDocument("", line_number);
    if (current_.tags) current_.unvalidated = !IsValidBio(*current_.tags);
    corpus_.documents.back().sentences.push_back(std::move(current_));
    current_ = Sentence();
  }

  ConllOptions options_;
  Corpus corpus_;
  Sentence current_;
  bool sentence_tagged_ = false;
  std::unordered_set<std::string> ids_;
};

}  // namespace

Corpus ParseConll(std::istream &in, const ConllOptions &options) {
  return ConllReader(options).Read(in);
}

void WriteConll(const Corpus &corpus, std::ostream &out) {
  for (const Document &doc : corpus.documents) {
    out << "#doc " << doc.id << "\n";
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      const Sentence &sentence = doc.sentences[s];
      if (!sentence.tags) {
        throw DataError("document '" + doc.id + "' sentence " +
                        std::to_string(s) + " is untagged");
      }
      for (int i = 0; i < sentence.size(); ++i) {
        out << sentence.tokens[i].text << '\t' << (*sentence.tags)[i] << '\n';
      }
      out << '\n';
    }
  }
}

LabelSet ReadLabelSet(std::istream &in) {
  LabelSet labels;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = Trim(line);
    if (view.empty() || view[0] == '#') continue;
    try {
      if (!labels.Add(std::string(view))) {
        throw ParseError(line_number,
                         "duplicate entity type '" + std::string(view) + "'");
      }
    } catch (const SchemaError &e) {
      throw ParseError(line_number, e.what());
    }
  }
  return labels;
}

void WriteLabelSet(const LabelSet &labels, std::ostream &out) {
  for (const std::string &type : labels.types()) out << type << '\n';
}

}  // namespace labner

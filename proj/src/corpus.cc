#include "labner/corpus.h"

#include <algorithm>

#include "labner/error.h"

namespace labner {

std::optional<BioTag> BioTag::Parse(std::string_view text) {
  if (text == "O") return BioTag::Outside();
  if (text.size() < 3 || text[1] != '-') return std::nullopt;
  std::string type(text.substr(2));
  if (text[0] == 'B') return BioTag::Begin(std::move(type));
  if (text[0] == 'I') return BioTag::Inside(std::move(type));
  return std::nullopt;
}

std::string BioTag::ToString() const {
  switch (scheme_) {
    case Scheme::kBegin:
      return "B-" + type_;
    case Scheme::kInside:
      return "I-" + type_;
    case Scheme::kOutside:
      break;
  }
  return "O";
}

std::ostream &operator<<(std::ostream &os, const BioTag &tag) {
  return os << tag.ToString();
}

std::vector<BioTag> ParseTags(const std::vector<std::string> &names) {
  std::vector<BioTag> tags;
  tags.reserve(names.size());
  for (const std::string &name : names) {
    auto tag = BioTag::Parse(name);
    if (!tag) throw SchemaError("malformed tag '" + name + "'");
    tags.push_back(std::move(*tag));
  }
  return tags;
}

std::ostream &operator<<(std::ostream &os, const EntitySpan &span) {
  return os << "(" << span.start << "," << span.end << "," << span.type
            << ")";
}

void CheckTypeName(std::string_view type) {
  if (type.empty()) throw SchemaError("empty entity type name");
  if (type == "O") throw SchemaError("entity type may not be named 'O'");
  for (char c : type) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw SchemaError("entity type '" + std::string(type) +
                        "' contains whitespace");
    }
  }
}

LabelSet::LabelSet(const std::vector<std::string> &types) {
  for (const std::string &type : types) {
    if (!Add(type)) throw SchemaError("duplicate entity type '" + type + "'");
  }
}

bool LabelSet::Add(const std::string &type) {
  CheckTypeName(type);
  if (index_.count(type)) return false;
  index_.emplace(type, static_cast<int>(types_.size()));
  types_.push_back(type);
  return true;
}

bool LabelSet::Contains(std::string_view type) const {
  return index_.count(std::string(type)) > 0;
}

std::vector<BioTag> LabelSet::TagAlphabet() const {
  std::vector<BioTag> alphabet;
  alphabet.reserve(num_tags());
  alphabet.push_back(BioTag::Outside());
  for (const std::string &type : types_) {
    alphabet.push_back(BioTag::Begin(type));
    alphabet.push_back(BioTag::Inside(type));
  }
  return alphabet;
}

std::vector<std::string> LabelSet::TagNames() const {
  std::vector<std::string> names;
  for (const BioTag &tag : TagAlphabet()) names.push_back(tag.ToString());
  return names;
}

int LabelSet::TagIndex(const BioTag &tag) const {
  if (tag.outside()) return 0;
  auto it = index_.find(tag.type());
  if (it == index_.end()) return -1;
  return 1 + 2 * it->second + (tag.inside() ? 1 : 0);
}

BioTag LabelSet::TagAt(int index) const {
  if (index < 0 || index >= num_tags()) {
    throw DataError("tag index " + std::to_string(index) + " out of range");
  }
  if (index == 0) return BioTag::Outside();
  const std::string &type = types_[(index - 1) / 2];
  return (index - 1) % 2 == 0 ? BioTag::Begin(type) : BioTag::Inside(type);
}

std::vector<std::string> Sentence::Words() const {
  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const Token &token : tokens) words.push_back(token.text);
  return words;
}

int Corpus::num_sentences() const {
  int count = 0;
  for (const Document &doc : documents) count += doc.sentences.size();
  return count;
}

int Corpus::num_tokens() const {
  int count = 0;
  for (const Document &doc : documents) {
    for (const Sentence &sentence : doc.sentences) count += sentence.size();
  }
  return count;
}

Corpus Corpus::WithoutTags() const {
  Corpus result = *this;
  for (Document &doc : result.documents) {
    for (Sentence &sentence : doc.sentences) {
      sentence.tags.reset();
      sentence.unvalidated = false;
    }
  }
  return result;
}

Sentence MakeSentence(const std::vector<std::string> &words,
                      const std::vector<std::string> &tags) {
  Sentence sentence;
  for (const std::string &word : words) sentence.tokens.push_back({word, {}});
  if (!tags.empty()) {
    if (tags.size() != words.size()) {
      throw DataError("MakeSentence: tag count differs from word count");
    }
    sentence.tags = ParseTags(tags);
  }
  return sentence;
}

}  // namespace labner

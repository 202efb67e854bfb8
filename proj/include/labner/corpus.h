#ifndef LABNER_CORPUS_H_
#define LABNER_CORPUS_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace labner {

// A word-level BIO tag: either O, or B-<type> / I-<type>.
class BioTag {
 public:
  enum class Scheme : uint8_t { kOutside, kBegin, kInside };

  BioTag() = default;

  static BioTag Outside() { return BioTag(); }
  static BioTag Begin(std::string type) {
    return BioTag(Scheme::kBegin, std::move(type));
  }
  static BioTag Inside(std::string type) {
    return BioTag(Scheme::kInside, std::move(type));
  }

  // Parses "O", "B-<type>" or "I-<type>". The scheme prefix is split off at
  // the first '-', so types may themselves contain '-'.
  static std::optional<BioTag> Parse(std::string_view text);

  Scheme scheme() const { return scheme_; }
  const std::string &type() const { return type_; }
  bool outside() const { return scheme_ == Scheme::kOutside; }
  bool begin() const { return scheme_ == Scheme::kBegin; }
  bool inside() const { return scheme_ == Scheme::kInside; }

  std::string ToString() const;

  friend bool operator==(const BioTag &a, const BioTag &b) = default;

 private:
  BioTag(Scheme scheme, std::string type)
      : scheme_(scheme), type_(std::move(type)) {}

  Scheme scheme_ = Scheme::kOutside;
  std::string type_;
};

std::ostream &operator<<(std::ostream &os, const BioTag &tag);

// Parses a whitespace-free list of tags such as {"B-X", "I-X", "O"}. Throws
// SchemaError on a malformed tag.
std::vector<BioTag> ParseTags(const std::vector<std::string> &names);

// Inclusive word range [start, end] carrying one entity type.
struct EntitySpan {
  int start = 0;
  int end = 0;
  std::string type;

  int length() const { return end - start + 1; }
  bool Overlaps(const EntitySpan &other) const {
    return start <= other.end && other.start <= end;
  }

  friend auto operator<=>(const EntitySpan &, const EntitySpan &) = default;
};

std::ostream &operator<<(std::ostream &os, const EntitySpan &span);

// Ordered inventory of entity types. The tag alphabet is O followed by the
// B-t/I-t pair of every type in order, so O has index 0 and the alphabet has
// 2 * types + 1 entries.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(const std::vector<std::string> &types);

  // Appends a type if absent. Returns true if it was added.
  bool Add(const std::string &type);

  const std::vector<std::string> &types() const { return types_; }
  bool Contains(std::string_view type) const;
  bool empty() const { return types_.empty(); }

  int num_tags() const { return 2 * static_cast<int>(types_.size()) + 1; }
  std::vector<BioTag> TagAlphabet() const;
  std::vector<std::string> TagNames() const;

  // Index of a tag in the alphabet, or -1 if its type is unknown.
  int TagIndex(const BioTag &tag) const;
  BioTag TagAt(int index) const;

  friend bool operator==(const LabelSet &a, const LabelSet &b) {
    return a.types_ == b.types_;
  }

 private:
  std::vector<std::string> types_;
  std::unordered_map<std::string, int> index_;
};

// Throws SchemaError if `type` cannot be an entity type name.
void CheckTypeName(std::string_view type);

// Half-open range of code point offsets into a document's source text.
struct CharSpan {
  int start = 0;
  int end = 0;

  friend bool operator==(const CharSpan &, const CharSpan &) = default;
};

struct Token {
  std::string text;
  std::optional<CharSpan> offsets;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<std::vector<BioTag>> tags;
  // Set when the tags came from an external source without schema
  // validation succeeding (for example raw token-level predictions).
  bool unvalidated = false;

  int size() const { return static_cast<int>(tokens.size()); }
  bool tagged() const { return tags.has_value(); }
  std::vector<std::string> Words() const;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::optional<std::string> source_text;
};

struct Corpus {
  std::vector<Document> documents;
  LabelSet label_set;

  int num_sentences() const;
  int num_tokens() const;

  // Same documents and tokens with every tag removed.
  Corpus WithoutTags() const;
};

// Builds a sentence from whitespace-free words, optionally tagged.
Sentence MakeSentence(const std::vector<std::string> &words,
                      const std::vector<std::string> &tags = {});

}  // namespace labner

#endif  // LABNER_CORPUS_H_

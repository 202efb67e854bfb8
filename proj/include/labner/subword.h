#ifndef LABNER_SUBWORD_H_
#define LABNER_SUBWORD_H_

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "labner/corpus.h"
#include "labner/error.h"

namespace labner {

enum class CaseMode { kCased, kUncased };

struct VocabOptions {
  CaseMode case_mode = CaseMode::kCased;
  std::string unknown_token = "[UNK]";
  std::string sequence_start = "[CLS]";
  std::string sequence_end = "[SEP]";
  int max_word_chars = 100;
};

// WordPiece vocabulary. Continuation pieces carry the "##" prefix.
class Vocabulary {
 public:
  static constexpr std::string_view kContinuationPrefix = "##";

  // Throws DataError on duplicate pieces or a missing unknown token.
  Vocabulary(std::vector<std::string> pieces, VocabOptions options = {});

  int size() const { return static_cast<int>(pieces_.size()); }
  const std::vector<std::string> &pieces() const { return pieces_; }
  bool Contains(const std::string &piece) const {
    return ids_.count(piece) > 0;
  }

  const VocabOptions &options() const { return options_; }
  CaseMode case_mode() const { return options_.case_mode; }
  const std::string &unknown_token() const { return options_.unknown_token; }

  // "<cased|uncased>:<fnv1a64 hex>", where the hash runs over every piece
  // followed by '\n'. Bridge files name the vocabulary they were made with
  // by this identifier.
  std::string Identifier() const;

  // Removes control and format characters; in uncased mode also lowercases
  // and strips combining accents (NFD, then drop Mn).
  std::string Normalize(std::string_view word) const;

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> ids_;
  VocabOptions options_;
};

// One piece per line. Throws ParseError with the line number of a duplicate
// or empty piece, DataError if the unknown token is missing.
Vocabulary LoadVocab(std::istream &in, VocabOptions options = {});

// Greedy longest-match-first WordPiece over code points. Returns
// {unknown_token} when the normalized word is empty, longer than
// max_word_chars, or cannot be covered by vocabulary pieces.
std::vector<std::string> WordpieceTokenize(std::string_view word,
                                           const Vocabulary &vocab);

// Strips the continuation prefix from a piece.
std::string_view PieceSurface(std::string_view piece);

// Word to subword alignment of one sentence.
struct AlignedSentence {
  std::vector<std::string> words;
  std::vector<std::string> pieces;
  std::vector<int> word_index;         // per piece
  std::vector<int> first_piece_index;  // per word

  int num_words() const { return static_cast<int>(words.size()); }
  int num_pieces() const { return static_cast<int>(pieces.size()); }
  int PieceCount(int word) const {
    int next = word + 1 < num_words() ? first_piece_index[word + 1]
                                      : num_pieces();
    return next - first_piece_index[word];
  }
};

AlignedSentence TokenizeSentence(const Sentence &sentence,
                                 const Vocabulary &vocab);

// A piece with its training label. Continuation pieces have no label
// (IGNORE) and are excluded from loss and scoring.
struct LabeledPiece {
  std::string piece;
  std::optional<BioTag> label;

  bool ignored() const { return !label.has_value(); }
};

inline constexpr std::string_view kIgnoreLabel = "IGNORE";

std::vector<LabeledPiece> ProjectLabelsToPieces(
    const AlignedSentence &aligned, const std::vector<BioTag> &tags);

// Picks, for every word, the value attached to its first piece.
template <typename T>
std::vector<T> SelectFirstPieces(const AlignedSentence &aligned,
                                 std::span<const T> per_piece) {
  if (static_cast<int>(per_piece.size()) != aligned.num_pieces()) {
    throw DataError("expected " + std::to_string(aligned.num_pieces()) +
                    " piece values, got " + std::to_string(per_piece.size()));
  }
  std::vector<T> per_word;
  per_word.reserve(aligned.num_words());
  for (int first : aligned.first_piece_index) {
    per_word.push_back(per_piece[first]);
  }
  return per_word;
}

std::vector<BioTag> ProjectPieceLabelsToWords(
    const AlignedSentence &aligned, const std::vector<BioTag> &piece_labels);

// Same, reading the labels of ProjectLabelsToPieces back.
std::vector<BioTag> ProjectPieceLabelsToWords(
    const AlignedSentence &aligned, const std::vector<LabeledPiece> &pieces);

// Half-open word range [begin, end).
struct WordRange {
  int begin = 0;
  int end = 0;

  friend bool operator==(const WordRange &, const WordRange &) = default;
};

inline constexpr int kDefaultChunkBudget = 512;
// [CLS] and [SEP] occupy two encoder positions in every chunk.
inline constexpr int kDelimiterPieces = 2;

struct ChunkPlan {
  int budget = kDefaultChunkBudget;
  std::vector<WordRange> chunks;
};

// Greedy fill at word boundaries: a chunk grows while its pieces plus the
// two delimiters fit in `budget`. Throws DataError if one word alone does
// not fit.
ChunkPlan ChunkSentence(const AlignedSentence &aligned,
                        int budget = kDefaultChunkBudget);

// Number of pieces covered by a word range.
int PieceCount(const AlignedSentence &aligned, const WordRange &range);

}  // namespace labner

#endif  // LABNER_SUBWORD_H_

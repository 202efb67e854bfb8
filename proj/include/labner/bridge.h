#ifndef LABNER_BRIDGE_H_
#define LABNER_BRIDGE_H_

#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "labner/corpus.h"
#include "labner/lattice.h"
#include "labner/subword.h"

namespace labner {

inline constexpr int kBridgeFormatVersion = 1;

struct BridgeHeader {
  int version = kBridgeFormatVersion;
  std::vector<std::string> alphabet;  // tag names, score column order
  std::string vocab;                  // Vocabulary::Identifier()
  int budget = kDefaultChunkBudget;
};

// Piece scores of one sentence, chunks already re-joined.
//
// On the wire a sentence that was split into chunks appears as consecutive
// groups with sentence field "<s>.<c>"; piece and word indices restart at 0
// in every chunk. An unsplit sentence uses the bare "<s>".
struct BridgeSentence {
  std::string document;
  int sentence = 0;
  std::vector<std::string> pieces;
  std::vector<int> word_index;    // sentence-level
  Matrix scores;                  // pieces x alphabet size
  std::vector<int> chunk_pieces;  // pieces per chunk; one entry if unsplit

  int num_pieces() const { return static_cast<int>(pieces.size()); }
};

struct BridgeFile {
  BridgeHeader header;
  std::vector<BridgeSentence> sentences;

  // nullptr if absent.
  const BridgeSentence *Find(const std::string &document, int sentence) const;
};

// Rebuilds a label set from a header alphabet. Throws DataError unless the
// alphabet is O followed by B-t, I-t pairs.
LabelSet AlphabetLabels(const std::vector<std::string> &alphabet);

// Parses and validates a bridge file. With `expected`, the header alphabet
// must equal its tag alphabet, order included. Throws ParseError or
// DataError naming the offending line.
BridgeFile ReadBridge(std::istream &in, const LabelSet *expected = nullptr);

// Scores are written in shortest round-trip decimal form.
void WriteBridge(const BridgeFile &file, std::ostream &out);

enum class DecodeMode { kArgmax, kConstrained };

// Word-level tags from per-piece scores using each word's first piece.
// kArgmax takes the best label per word (lowest index on ties) and repairs
// stray I- tags to B-; kConstrained runs Viterbi with zero-cost legal BIO
// moves and forbidden illegal ones, so no repair is needed.
std::vector<BioTag> DecodeScores(const Matrix &piece_scores,
                                 const AlignedSentence &aligned,
                                 const LabelSet &labels, DecodeMode mode);

// Tags every sentence of `corpus` (existing tags are ignored) from the
// bridge file. The vocabulary identifier, chunk layout, piece surfaces and
// word indices must agree with what `vocab` produces; missing sentences are
// reported together.
Corpus PredictCorpus(const BridgeFile &file, const Corpus &corpus,
                     const Vocabulary &vocab, DecodeMode mode);

// Produces the m scores of piece `piece` of a sentence.
using PieceScorer = std::function<std::vector<double>(
    const Document &, int sentence, const AlignedSentence &, int piece)>;

// Builds a bridge file over `corpus` with the chunk layout `budget` implies.
BridgeFile SynthesizeBridge(const Corpus &corpus, const Vocabulary &vocab,
                            const LabelSet &labels, int budget,
                            const PieceScorer &scorer);

// Scores 1 for each piece's word tag and 0 elsewhere.
BridgeFile OneHotBridge(const Corpus &gold, const Vocabulary &vocab,
                        int budget = kDefaultChunkBudget);

}  // namespace labner

#endif  // LABNER_BRIDGE_H_

#include "labner/subword.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "labner/text.h"

namespace labner {

Vocabulary::Vocabulary(std::vector<std::string> pieces, VocabOptions options)
    : pieces_(std::move(pieces)), options_(std::move(options)) {
  if (options_.max_word_chars < 1) {
    throw DataError("max_word_chars must be at least 1");
  }
  for (int i = 0; i < size(); ++i) {
    if (!ids_.emplace(pieces_[i], i).second) {
      throw DataError("duplicate vocabulary piece '" + pieces_[i] + "'");
    }
  }
  if (!Contains(options_.unknown_token)) {
    throw DataError("vocabulary lacks unknown token '" +
                    options_.unknown_token + "'");
  }
}

std::string Vocabulary::Identifier() const {
  uint64_t hash = Fnv1a64("");
  for (const std::string &piece : pieces_) {
    hash = Fnv1a64(piece, hash);
    hash = Fnv1a64("\n", hash);
  }
  return std::string(case_mode() == CaseMode::kCased ? "cased" : "uncased") +
         ":" + Hex64(hash);
}

std::string Vocabulary::Normalize(std::string_view word) const {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(word.data(), static_cast<int32_t>(word.size())));
  if (case_mode() == CaseMode::kUncased) {
    text.toLower();
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2 *nfd = icu::Normalizer2::getNFDInstance(status);
    if (U_SUCCESS(status)) {
      icu::UnicodeString decomposed = nfd->normalize(text, status);
      if (U_SUCCESS(status)) text = decomposed;
    }
  }
  icu::UnicodeString cleaned;
  for (int32_t i = 0; i < text.length();) {
    UChar32 c = text.char32At(i);
    i += U16_LENGTH(c);
    int8_t category = u_charType(c);
    if (c == 0 || c == 0xfffd || category == U_CONTROL_CHAR ||
        category == U_FORMAT_CHAR) {
      continue;
    }
    if (case_mode() == CaseMode::kUncased && category == U_NON_SPACING_MARK) {
      continue;
    }
    cleaned.append(c);
  }
  std::string result;
  cleaned.toUTF8String(result);
  return result;
}

Vocabulary LoadVocab(std::istream &in, VocabOptions options) {
  std::vector<std::string> pieces;
  std::unordered_map<std::string, int> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError(line_number, "empty vocabulary piece");
    auto [it, inserted] = seen.emplace(line, line_number);
    if (!inserted) {
      throw ParseError(line_number, "duplicate piece '" + line +
                                        "' (first on line " +
                                        std::to_string(it->second) + ")");
    }
    pieces.push_back(line);
  }
  return Vocabulary(std::move(pieces), std::move(options));
}

std::vector<std::string> WordpieceTokenize(std::string_view word,
                                           const Vocabulary &vocab) {
  const std::string normalized = vocab.Normalize(word);
  const std::vector<int> cp = CodePointOffsets(normalized);
  const int length = static_cast<int>(cp.size()) - 1;
  if (length == 0 || length > vocab.options().max_word_chars) {
    return {vocab.unknown_token()};
  }

  std::vector<std::string> pieces;
  std::string candidate;
  int start = 0;
  while (start < length) {
    int end = length;
    bool found = false;
    for (; end > start; --end) {
      candidate.clear();
      if (start > 0) candidate = Vocabulary::kContinuationPrefix;
      candidate.append(normalized, cp[start], cp[end] - cp[start]);
      if (vocab.Contains(candidate)) {
        found = true;
        break;
      }
    }
    if (!found) return {vocab.unknown_token()};
    pieces.push_back(candidate);
    start = end;
  }
  return pieces;
}

std::string_view PieceSurface(std::string_view piece) {
  if (piece.substr(0, Vocabulary::kContinuationPrefix.size()) ==
      Vocabulary::kContinuationPrefix) {
    piece.remove_prefix(Vocabulary::kContinuationPrefix.size());
  }
  return piece;
}

AlignedSentence TokenizeSentence(const Sentence &sentence,
                                 const Vocabulary &vocab) {
  AlignedSentence aligned;
  aligned.words = sentence.Words();
  for (int w = 0; w < aligned.num_words(); ++w) {
    aligned.first_piece_index.push_back(aligned.num_pieces());
    for (std::string &piece : WordpieceTokenize(aligned.words[w], vocab)) {
      aligned.pieces.push_back(std::move(piece));
      aligned.word_index.push_back(w);
    }
  }
  return aligned;
}

std::vector<LabeledPiece> ProjectLabelsToPieces(
    const AlignedSentence &aligned, const std::vector<BioTag> &tags) {
  if (static_cast<int>(tags.size()) != aligned.num_words()) {
    throw DataError("expected " + std::to_string(aligned.num_words()) +
                    " word tags, got " + std::to_string(tags.size()));
  }
  std::vector<LabeledPiece> labeled;
  labeled.reserve(aligned.num_pieces());
  for (int p = 0; p < aligned.num_pieces(); ++p) {
    int w = aligned.word_index[p];
    LabeledPiece piece{aligned.pieces[p], std::nullopt};
    if (aligned.first_piece_index[w] == p) piece.label = tags[w];
    labeled.push_back(std::move(piece));
  }
  return labeled;
}

std::vector<BioTag> ProjectPieceLabelsToWords(
    const AlignedSentence &aligned, const std::vector<BioTag> &piece_labels) {
  return SelectFirstPieces<BioTag>(aligned, piece_labels);
}

std::vector<BioTag> ProjectPieceLabelsToWords(
    const AlignedSentence &aligned, const std::vector<LabeledPiece> &pieces) {
  std::vector<LabeledPiece> first =
      SelectFirstPieces<LabeledPiece>(aligned, pieces);
  std::vector<BioTag> tags;
  tags.reserve(first.size());
  for (size_t w = 0; w < first.size(); ++w) {
    if (first[w].ignored()) {
      throw DataError("first piece of word " + std::to_string(w) +
                      " carries the IGNORE label");
    }
    tags.push_back(*first[w].label);
  }
  return tags;
}

int PieceCount(const AlignedSentence &aligned, const WordRange &range) {
  if (range.begin >= range.end) return 0;
  int end_piece = range.end < aligned.num_words()
                      ? aligned.first_piece_index[range.end]
                      : aligned.num_pieces();
  return end_piece - aligned.first_piece_index[range.begin];
}

ChunkPlan ChunkSentence(const AlignedSentence &aligned, int budget) {
  ChunkPlan plan;
  plan.budget = budget;
  WordRange current{0, 0};
  int pieces = 0;
  for (int w = 0; w < aligned.num_words(); ++w) {
    int count = aligned.PieceCount(w);
    if (count + kDelimiterPieces > budget) {
      throw DataError("word " + std::to_string(w) + " ('" + aligned.words[w] +
                      "') has " + std::to_string(count) +
                      " pieces and cannot fit in a chunk budget of " +
                      std::to_string(budget));
    }
    if (pieces + count + kDelimiterPieces > budget) {
      plan.chunks.push_back(current);
      current = {w, w};
      pieces = 0;
    }
    current.end = w + 1;
    pieces += count;
  }
  if (current.end > current.begin) plan.chunks.push_back(current);
  return plan;
}

}  // namespace labner

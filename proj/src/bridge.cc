#include "labner/bridge.h"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "labner/bio.h"
#include "labner/error.h"
#include "labner/text.h"

namespace labner {
namespace {

bool ParseInt(std::string_view text, int &value) {
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && p == text.data() + text.size();
}

std::string Location(const std::string &document, int sentence) {
  return "'" + document + "' sentence " + std::to_string(sentence);
}

std::string JoinInts(const std::vector<int> &values) {
  std::vector<std::string> parts;
  for (int v : values) parts.push_back(std::to_string(v));
  return "[" + Join(parts, ",") + "]";
}

std::string FormatScore(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

struct HeaderState {
  BridgeHeader header;
  bool version = false, alphabet = false, vocab = false, budget = false;

  bool complete() const { return version && alphabet && vocab && budget; }
};

void ParseHeaderLine(std::string_view line, int number, HeaderState &state) {
  const size_t space = line.find_first_of(" \t");
  std::string_view key = line.substr(0, space);
  std::string_view value =
      space == std::string_view::npos ? "" : line.substr(space + 1);
  if (key == "#version") {
    int version = 0;
    if (!ParseInt(Trim(value), version)) {
      throw ParseError(number, "bad version '" + std::string(value) + "'");
    }
    if (version != kBridgeFormatVersion) {
      throw DataError("unsupported bridge format version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kBridgeFormatVersion) + ")");
    }
    state.version = true;
  } else if (key == "#alphabet") {
    state.header.alphabet = Split(value, '\t');
    state.alphabet = true;
  } else if (key == "#vocab") {
    state.header.vocab = std::string(Trim(value));
    state.vocab = true;
  } else if (key == "#budget") {
    if (!ParseInt(Trim(value), state.header.budget) ||
        state.header.budget <= kDelimiterPieces) {
      throw ParseError(number, "bad budget '" + std::string(value) + "'");
    }
    state.budget = true;
  } else {
    throw ParseError(number, "unknown header line '" + std::string(key) + "'");
  }
}

struct ChunkKey {
  std::string document;
  int sentence = 0;
  int chunk = -1;  // -1 for an unsplit sentence
};

ChunkKey ParseKey(std::string_view document, std::string_view field,
                  int number) {
  ChunkKey key;
  key.document = std::string(document);
  const size_t dot = field.find('.');
  bool ok = ParseInt(field.substr(0, dot), key.sentence) && key.sentence >= 0;
  if (ok && dot != std::string_view::npos) {
    ok = ParseInt(field.substr(dot + 1), key.chunk) && key.chunk >= 0;
  }
  if (!ok) {
    throw ParseError(number, "bad sentence field '" + std::string(field) +
                                 "' (expected <s> or <s>.<chunk>)");
  }
  return key;
}

}  // namespace

const BridgeSentence *BridgeFile::Find(const std::string &document,
                                       int sentence) const {
  for (const BridgeSentence &s : sentences) {
    if (s.document == document && s.sentence == sentence) return &s;
  }
  return nullptr;
}

LabelSet AlphabetLabels(const std::vector<std::string> &alphabet) {
  std::vector<std::string> types;
  bool ok = !alphabet.empty() && alphabet.size() % 2 == 1 && alphabet[0] == "O";
  for (size_t i = 1; ok && i < alphabet.size(); i += 2) {
    auto begin = BioTag::Parse(alphabet[i]);
    auto inside = BioTag::Parse(alphabet[i + 1]);
    ok = begin && inside && begin->begin() && inside->inside() &&
         begin->type() == inside->type();
    if (ok) types.push_back(begin->type());
  }
  if (!ok) {
    throw DataError("bridge alphabet [" + Join(alphabet, " ") +
                    "] is not O followed by B-/I- pairs");
  }
  return LabelSet(types);
}

BridgeFile ReadBridge(std::istream &in, const LabelSet *expected) {
  HeaderState state;
  BridgeFile file;
  std::set<std::pair<std::string, int>> seen;
  int m = 0;

  ChunkKey current;
  bool in_group = false;
  int next_piece = 0;
  int last_word = -1;
  int word_offset = 0;
  std::vector<double> scores;  // of the sentence being built, row-major

  auto finish_sentence = [&] {
    if (file.sentences.empty() || scores.empty()) return;
    BridgeSentence &s = file.sentences.back();
    s.scores = Matrix(s.num_pieces(), m);
    for (int p = 0; p < s.num_pieces(); ++p) {
      std::copy_n(scores.begin() + p * m, m, s.scores.row(p).begin());
    }
    scores.clear();
  };

  // Returns the alphabet size.
  auto adopt_header = [&] {
    file.header = state.header;
    LabelSet labels = AlphabetLabels(file.header.alphabet);
    if (expected && !(labels == *expected)) {
      throw DataError("bridge alphabet [" + Join(file.header.alphabet, " ") +
                      "] does not match the expected alphabet [" +
                      Join(expected->TagNames(), " ") + "]");
    }
    return labels.num_tags();
  };

  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    if (line[0] == '#') {
      if (in_group) {
        throw ParseError(number, "header line after the first record");
      }
      ParseHeaderLine(line, number, state);
      continue;
    }
    if (!state.complete()) {
      throw ParseError(number, "record before a complete header (#version, "
                               "#alphabet, #vocab and #budget are required)");
    }
    if (!in_group) m = adopt_header();

    std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 6) {
      throw ParseError(number, "expected 6 tab-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    ChunkKey key = ParseKey(fields[0], fields[1], number);
    int piece = 0;
    int word = 0;
    if (!ParseInt(fields[2], piece) || !ParseInt(fields[4], word)) {
      throw ParseError(number, "bad piece or word index");
    }

    const bool same_group = in_group && key.document == current.document &&
                            key.sentence == current.sentence &&
                            key.chunk == current.chunk;
    if (!same_group) {
      const bool continues = in_group && key.chunk > 0 &&
                             key.document == current.document &&
                             key.sentence == current.sentence &&
                             key.chunk == current.chunk + 1;
      if (key.chunk > 0 && !continues) {
        throw ParseError(number, "chunk " + std::to_string(key.chunk) + " of " +
                                     Location(key.document, key.sentence) +
                                     " does not follow chunk " +
                                     std::to_string(key.chunk - 1));
      }
      if (continues) {
        word_offset += last_word + 1;
        file.sentences.back().chunk_pieces.push_back(0);
      } else {
        if (!seen.emplace(key.document, key.sentence).second) {
          throw ParseError(number, "duplicate records for " +
                                       Location(key.document, key.sentence));
        }
        finish_sentence();
        BridgeSentence s;
        s.document = key.document;
        s.sentence = key.sentence;
        s.chunk_pieces.push_back(0);
        file.sentences.push_back(std::move(s));
        word_offset = 0;
      }
      current = key;
      in_group = true;
      next_piece = 0;
      last_word = -1;
    }

    if (piece != next_piece) {
      throw ParseError(number, "gap in piece indices of " +
                                   Location(key.document, key.sentence) +
                                   ": expected piece " +
                                   std::to_string(next_piece) + ", got " +
                                   std::to_string(piece));
    }
    if (word != last_word && word != last_word + 1) {
      throw ParseError(number, "word index " + std::to_string(word) +
                                   " does not follow " +
                                   std::to_string(last_word));
    }
    auto values = SplitWhitespace(fields[5]);
    if (static_cast<int>(values.size()) != m) {
      throw ParseError(number, "expected " + std::to_string(m) +
                                   " scores, got " +
                                   std::to_string(values.size()));
    }
    for (std::string_view value : values) {
      double x = 0.0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
      if (ec != std::errc() || p != value.data() + value.size() ||
          std::isnan(x)) {
        throw ParseError(number, "bad score '" + std::string(value) + "'");
      }
      scores.push_back(x);
    }

    BridgeSentence &s = file.sentences.back();
    s.pieces.push_back(fields[3]);
    s.word_index.push_back(word_offset + word);
    ++s.chunk_pieces.back();
    ++next_piece;
    last_word = word;
  }
  if (!state.complete()) {
    throw DataError("bridge file header is incomplete");
  }
  if (!in_group) adopt_header();
  finish_sentence();
  return file;
}

void WriteBridge(const BridgeFile &file, std::ostream &out) {
  const BridgeHeader &h = file.header;
  out << "#version " << h.version << '\n'
      << "#alphabet " << Join(h.alphabet, "\t") << '\n'
      << "#vocab " << h.vocab << '\n'
      << "#budget " << h.budget << '\n';
  for (const BridgeSentence &s : file.sentences) {
    const bool split = s.chunk_pieces.size() > 1;
    int begin = 0;
    for (size_t c = 0; c < s.chunk_pieces.size(); ++c) {
      const int end = begin + s.chunk_pieces[c];
      const int first_word = begin < end ? s.word_index[begin] : 0;
      std::string sent = std::to_string(s.sentence);
      if (split) sent += "." + std::to_string(c);
      for (int p = begin; p < end; ++p) {
        out << s.document << '\t' << sent << '\t' << p - begin << '\t'
            << s.pieces[p] << '\t' << s.word_index[p] - first_word << '\t';
        auto row = s.scores.row(p);
        for (size_t k = 0; k < row.size(); ++k) {
          if (k) out << ' ';
          out << FormatScore(row[k]);
        }
        out << '\n';
      }
      begin = end;
    }
  }
  if (!out) throw DataError("failed to write bridge file");
}

std::vector<BioTag> DecodeScores(const Matrix &piece_scores,
                                 const AlignedSentence &aligned,
                                 const LabelSet &labels, DecodeMode mode) {
  const int m = labels.num_tags();
  if (piece_scores.cols() != m) {
    throw DataError("score vectors have " + std::to_string(piece_scores.cols()) +
                    " entries, alphabet has " + std::to_string(m));
  }
  std::vector<int> rows(piece_scores.rows());
  for (int p = 0; p < piece_scores.rows(); ++p) rows[p] = p;
  const std::vector<int> firsts =
      SelectFirstPieces<int>(aligned, std::span<const int>(rows));

  Matrix words(static_cast<int>(firsts.size()), m);
  for (size_t w = 0; w < firsts.size(); ++w) {
    auto src = piece_scores.row(firsts[w]);
    std::copy(src.begin(), src.end(), words.row(w).begin());
  }

  std::vector<BioTag> tags;
  if (mode == DecodeMode::kArgmax) {
    for (int w = 0; w < words.rows(); ++w) {
      int best = 0;
      for (int y = 1; y < m; ++y) {
        if (words(w, y) > words(w, best)) best = y;
      }
      tags.push_back(labels.TagAt(best));
    }
    return RepairBio(tags, RepairMode::kBegin);
  }
  if (words.rows() == 0) return tags;
  TransitionScores constraints(m);
  ApplyBioConstraints(labels, constraints);
  for (int label : Viterbi(words, constraints).labels) {
    tags.push_back(labels.TagAt(label));
  }
  return tags;
}

Corpus PredictCorpus(const BridgeFile &file, const Corpus &corpus,
                     const Vocabulary &vocab, DecodeMode mode) {
  if (file.header.vocab != vocab.Identifier()) {
    throw DataError("bridge file was made with vocabulary " +
                    file.header.vocab + ", not " + vocab.Identifier());
  }
  const LabelSet labels = AlphabetLabels(file.header.alphabet);

  std::map<std::pair<std::string, int>, const BridgeSentence *> index;
  for (const BridgeSentence &s : file.sentences) {
    index[{s.document, s.sentence}] = &s;
  }

  Corpus result = corpus;
  result.label_set = labels;
  std::vector<std::string> gaps;
  for (Document &doc : result.documents) {
    for (int i = 0; i < static_cast<int>(doc.sentences.size()); ++i) {
      Sentence &sentence = doc.sentences[i];
      sentence.unvalidated = false;
      auto it = index.find({doc.id, i});
      if (sentence.size() == 0) {
        sentence.tags.emplace();
        if (it != index.end()) index.erase(it);
        continue;
      }
      if (it == index.end()) {
        gaps.push_back(doc.id + "/" + std::to_string(i));
        continue;
      }
      const BridgeSentence &scores = *it->second;
      index.erase(it);

      const AlignedSentence aligned = TokenizeSentence(sentence, vocab);
      const std::string where = Location(doc.id, i);
      if (scores.num_pieces() != aligned.num_pieces()) {
        throw DataError(where + ": bridge has " +
                        std::to_string(scores.num_pieces()) +
                        " pieces, tokenization gives " +
                        std::to_string(aligned.num_pieces()));
      }
      for (int p = 0; p < aligned.num_pieces(); ++p) {
        if (scores.pieces[p] != aligned.pieces[p] ||
            scores.word_index[p] != aligned.word_index[p]) {
          throw DataError(where + " piece " + std::to_string(p) +
                          ": bridge has '" + scores.pieces[p] + "' of word " +
                          std::to_string(scores.word_index[p]) +
                          ", tokenization gives '" + aligned.pieces[p] +
                          "' of word " + std::to_string(aligned.word_index[p]));
        }
      }
      const ChunkPlan plan = ChunkSentence(aligned, file.header.budget);
      std::vector<int> planned;
      for (const WordRange &range : plan.chunks) {
        planned.push_back(PieceCount(aligned, range));
      }
      if (planned != scores.chunk_pieces) {
        throw DataError(where + ": chunk layout " +
                        JoinInts(scores.chunk_pieces) + " differs from the " +
                        JoinInts(planned) + " planned under budget " +
                        std::to_string(file.header.budget));
      }
      sentence.tags = DecodeScores(scores.scores, aligned, labels, mode);
    }
  }
  if (!gaps.empty()) {
    const size_t shown = std::min<size_t>(gaps.size(), 20);
    std::string list = Join({gaps.begin(), gaps.begin() + shown}, ", ");
    if (shown < gaps.size()) {
      list += " and " + std::to_string(gaps.size() - shown) + " more";
    }
    throw DataError("bridge file lacks scores for " +
                    std::to_string(gaps.size()) + " sentence(s): " + list);
  }
  if (!index.empty()) {
    const auto &[key, s] = *index.begin();
    throw DataError("bridge file has " + std::to_string(index.size()) +
                    " sentence(s) not in the corpus, first " +
                    Location(key.first, key.second));
  }
  return result;
}

BridgeFile SynthesizeBridge(const Corpus &corpus, const Vocabulary &vocab,
                            const LabelSet &labels, int budget,
                            const PieceScorer &scorer) {
  BridgeFile file;
  file.header.alphabet = labels.TagNames();
  file.header.vocab = vocab.Identifier();
  file.header.budget = budget;
  const int m = labels.num_tags();
  for (const Document &doc : corpus.documents) {
    for (int i = 0; i < static_cast<int>(doc.sentences.size()); ++i) {
      const Sentence &sentence = doc.sentences[i];
      if (sentence.size() == 0) continue;
      const AlignedSentence aligned = TokenizeSentence(sentence, vocab);
      BridgeSentence s;
      s.document = doc.id;
      s.sentence = i;
      s.pieces = aligned.pieces;
      s.word_index = aligned.word_index;
      s.scores = Matrix(aligned.num_pieces(), m);
      for (int p = 0; p < aligned.num_pieces(); ++p) {
        std::vector<double> row = scorer(doc, i, aligned, p);
        if (static_cast<int>(row.size()) != m) {
          throw DataError("scorer returned " + std::to_string(row.size()) +
                          " scores, alphabet has " + std::to_string(m));
        }
        std::copy(row.begin(), row.end(), s.scores.row(p).begin());
      }
      for (const WordRange &range : ChunkSentence(aligned, budget).chunks) {
        s.chunk_pieces.push_back(PieceCount(aligned, range));
      }
      file.sentences.push_back(std::move(s));
    }
  }
  return file;
}

BridgeFile OneHotBridge(const Corpus &gold, const Vocabulary &vocab,
                        int budget) {
  const LabelSet &labels = gold.label_set;
  return SynthesizeBridge(
      gold, vocab, labels, budget,
      [&](const Document &doc, int sentence, const AlignedSentence &aligned,
          int piece) {
        const Sentence &s = doc.sentences[sentence];
        if (!s.tags) {
          throw DataError("document '" + doc.id + "' has an untagged sentence");
        }
        const int label =
            labels.TagIndex((*s.tags)[aligned.word_index[piece]]);
        if (label < 0) throw DataError("tag outside the corpus label set");
        std::vector<double> row(labels.num_tags(), 0.0);
        row[label] = 1.0;
        return row;
      });
}

}  // namespace labner

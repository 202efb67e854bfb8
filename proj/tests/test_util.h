#ifndef LABNER_TESTS_TEST_UTIL_H_
#define LABNER_TESTS_TEST_UTIL_H_

#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "labner/bio.h"
#include "labner/corpus.h"
#include "labner/crf.h"
#include "labner/lattice.h"
#include "labner/split.h"
#include "labner/subword.h"

namespace labner::testing {

// Small vocabulary covering the subword examples used across tests.
inline Vocabulary TableFourVocab(CaseMode mode = CaseMode::kCased) {
  std::ifstream in(LABNER_TEST_DATA "/table4_vocab.txt");
  VocabOptions options;
  options.case_mode = mode;
  return LoadVocab(in, options);
}

inline std::vector<BioTag> Tags(const std::vector<std::string> &names) {
  return ParseTags(names);
}

inline Document MakeDocument(std::string id, std::vector<Sentence> sentences) {
  Document doc;
  doc.id = std::move(id);
  doc.sentences = std::move(sentences);
  return doc;
}

// Random schema-valid tags for n words over `types`.
inline std::vector<BioTag> RandomTags(SplitMix64 &rng, int n,
                                      const std::vector<std::string> &types) {
  std::vector<EntitySpan> spans;
  int i = 0;
  while (i < n) {
    if (rng.Uniform() < 0.4) {
      int length = 1 + static_cast<int>(rng.Below(3));
      int end = std::min(n - 1, i + length - 1);
      spans.push_back({i, end, types[rng.Below(types.size())]});
      i = end + 1;
    } else {
      ++i;
    }
  }
  return BioEncode(spans, n);
}

// Random tags with no BIO guarantee.
inline std::vector<BioTag> NoisyTags(SplitMix64 &rng, int n,
                                     const LabelSet &labels) {
  std::vector<BioTag> tags;
  for (int i = 0; i < n; ++i) {
    tags.push_back(labels.TagAt(static_cast<int>(rng.Below(labels.num_tags()))));
  }
  return tags;
}

inline const std::vector<std::string> &WordPool() {
  static const std::vector<std::string> pool = {
      "Add",    "5",       "ml",    "of",   "PBS",     "to",     "the",
      "tube",   "and",     "mix",   "SDS",  "ethanol", "spin",   "at",
      "4000",   "rpm",     "for",   "10",   "min",     "Tris-HCl", "pH",
      "buffer", "protocol", "(",    ")",    ",",       ".",      "µl"};
  return pool;
}

// Random tagged corpus with schema-valid tags.
inline Corpus RandomCorpus(SplitMix64 &rng, int docs, int sentences,
                           int max_len,
                           const std::vector<std::string> &types = {"Reagent",
                                                                    "Method"}) {
  Corpus corpus;
  corpus.label_set = LabelSet(types);
  for (int d = 0; d < docs; ++d) {
    Document doc;
    doc.id = "doc" + std::to_string(d);
    for (int s = 0; s < sentences; ++s) {
      int n = 1 + static_cast<int>(rng.Below(max_len));
      Sentence sentence;
      for (int i = 0; i < n; ++i) {
        sentence.tokens.push_back({WordPool()[rng.Below(WordPool().size())], {}});
      }
      sentence.tags = RandomTags(rng, n, types);
      doc.sentences.push_back(std::move(sentence));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

// Same tokens as `gold`, fresh random valid tags.
inline Corpus Repredict(SplitMix64 &rng, const Corpus &gold) {
  Corpus pred = gold;
  for (Document &doc : pred.documents) {
    for (Sentence &sentence : doc.sentences) {
      sentence.tags = RandomTags(rng, sentence.size(), gold.label_set.types());
    }
  }
  return pred;
}

// Every token determines its tag: entity words come from disjoint per-type
// lexicons and continuation words only ever follow their type.
inline Corpus SeparableCorpus(SplitMix64 &rng, int sentences,
                              int sentences_per_doc = 10) {
  struct Type {
    std::string name;
    std::vector<std::string> heads;
    std::vector<std::string> tails;
  };
  static const std::vector<Type> types = {
      {"Reagent", {"PBS", "ethanol", "Tris", "glycerol", "SDS", "EDTA"},
       {"solution", "stock"}},
      {"Method", {"centrifuge", "incubate", "vortex", "wash"},
       {"gently", "overnight"}},
      {"Device", {"tube", "plate", "rotor"}, {}},
  };
  static const std::vector<std::string> outside = {
      "the", "with", "for", "at", "and", "then", "add", "into", "of", "5"};
  Corpus corpus;
  corpus.label_set = LabelSet({"Reagent", "Method", "Device"});
  for (int s = 0; s < sentences; ++s) {
    if (s % sentences_per_doc == 0) {
      Document doc;
      doc.id = "sep" + std::to_string(s / sentences_per_doc);
      corpus.documents.push_back(std::move(doc));
    }
    Sentence sentence;
    std::vector<BioTag> tags;
    const int units = 3 + static_cast<int>(rng.Below(6));
    for (int u = 0; u < units; ++u) {
      if (rng.Uniform() < 0.45) {
        sentence.tokens.push_back({outside[rng.Below(outside.size())], {}});
        tags.push_back(BioTag::Outside());
        continue;
      }
      const Type &type = types[rng.Below(types.size())];
      sentence.tokens.push_back({type.heads[rng.Below(type.heads.size())], {}});
      tags.push_back(BioTag::Begin(type.name));
      if (!type.tails.empty() && rng.Uniform() < 0.4) {
        sentence.tokens.push_back({type.tails[rng.Below(type.tails.size())], {}});
        tags.push_back(BioTag::Inside(type.name));
      }
    }
    sentence.tags = std::move(tags);
    corpus.documents.back().sentences.push_back(std::move(sentence));
  }
  return corpus;
}

// Calls `visit` on every label sequence of length n over m labels.
inline void ForEachSequence(int n, int m,
                            const std::function<void(const std::vector<int> &)> &visit) {
  std::vector<int> labels(n, 0);
  while (true) {
    visit(labels);
    int i = n - 1;
    while (i >= 0 && ++labels[i] == m) labels[i--] = 0;
    if (i < 0) return;
  }
}

inline Matrix RandomMatrix(SplitMix64 &rng, int rows, int cols) {
  Matrix matrix(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (double &x : matrix.row(r)) x = rng.Uniform(-1.0, 1.0);
  }
  return matrix;
}

inline TransitionScores RandomTransitions(SplitMix64 &rng, int m) {
  TransitionScores scores(m);
  scores.transition = RandomMatrix(rng, m, m);
  for (double &x : scores.start) x = rng.Uniform(-1.0, 1.0);
  for (double &x : scores.end) x = rng.Uniform(-1.0, 1.0);
  return scores;
}

// Exhaustive enumeration results for a small lattice.
struct BruteForce {
  double log_partition = 0.0;
  Matrix node;
  std::vector<Matrix> edge;
};

// Independent re-computation of a path score.
inline double PathScore(const Matrix &emissions, const TransitionScores &scores,
                        const std::vector<int> &labels) {
  const int n = static_cast<int>(labels.size());
  double s = scores.start[labels[0]] + scores.end[labels[n - 1]];
  for (int t = 0; t < n; ++t) s += emissions(t, labels[t]);
  for (int t = 0; t + 1 < n; ++t) {
    s += scores.transition(labels[t], labels[t + 1]);
  }
  return s;
}

inline BruteForce Enumerate(const Matrix &emissions,
                            const TransitionScores &scores) {
  const int n = emissions.rows();
  const int m = emissions.cols();
  BruteForce result;
  std::vector<std::pair<std::vector<int>, double>> all;
  double max_score = kNegInf;
  ForEachSequence(n, m, [&](const std::vector<int> &labels) {
    const double s = PathScore(emissions, scores, labels);
    all.emplace_back(labels, s);
    max_score = std::max(max_score, s);
  });
  double total = 0.0;
  for (const auto &[labels, s] : all) total += std::exp(s - max_score);
  result.log_partition = max_score + std::log(total);
  result.node = Matrix(n, m);
  for (int t = 0; t + 1 < n; ++t) result.edge.emplace_back(m, m);
  for (const auto &[labels, s] : all) {
    const double p = std::exp(s - result.log_partition);
    for (int t = 0; t < n; ++t) result.node(t, labels[t]) += p;
    for (int t = 0; t + 1 < n; ++t) result.edge[t](labels[t], labels[t + 1]) += p;
  }
  return result;
}

// First maximizer in enumeration order.
inline std::pair<std::vector<int>, double> BruteArgmax(
    const Matrix &emissions, const TransitionScores &scores) {
  std::vector<int> best;
  double best_score = kNegInf;
  ForEachSequence(emissions.rows(), emissions.cols(),
                  [&](const std::vector<int> &labels) {
                    double s = PathScore(emissions, scores, labels);
                    if (best.empty() || s > best_score) {
                      best = labels;
                      best_score = s;
                    }
                  });
  return {best, best_score};
}

// Model over `types` with features f0..f{F-1}, each carrying weights for a
// random non-empty label subset, weights drawn from U[-1, 1].
inline CrfModel RandomCrf(SplitMix64 &rng, std::vector<std::string> types,
                          int num_features) {
  LabelSet labels(std::move(types));
  const int m = labels.num_tags();
  FeatureDictionary dictionary;
  std::vector<std::vector<int>> feature_labels;
  for (int f = 0; f < num_features; ++f) {
    dictionary.Add("f" + std::to_string(f));
    std::vector<int> subset;
    for (int y = 0; y < m; ++y) {
      if (rng.Uniform() < 0.6) subset.push_back(y);
    }
    if (subset.empty()) subset.push_back(static_cast<int>(rng.Below(m)));
    feature_labels.push_back(subset);
  }
  CrfModel model(labels, FeatureExtractor(), dictionary, feature_labels);
  std::vector<double> weights(model.num_params());
  for (double &w : weights) w = 2.0 * rng.Uniform() - 1.0;
  model.set_weights(std::move(weights));
  return model;
}

// Random features (values in {1, 0.5..2}) and random gold labels.
inline CrfInstance RandomInstance(SplitMix64 &rng, const CrfModel &model,
                                  int n) {
  CrfInstance instance;
  for (int t = 0; t < n; ++t) {
    FeatureVector features;
    for (int f = 0; f < model.num_features(); ++f) {
      if (rng.Uniform() < 0.4) {
        features.push_back({f, rng.Below(2) ? 1.0 : 0.5 + 1.5 * rng.Uniform()});
      }
    }
    instance.features.push_back(std::move(features));
    instance.labels.push_back(static_cast<int>(rng.Below(model.num_labels())));
  }
  return instance;
}

// Emission scores computed straight from the parameter vector.
inline Matrix ReferenceEmissions(const CrfModel &model,
                                 const std::vector<FeatureVector> &features,
                                 std::span<const double> weights) {
  const int m = model.num_labels();
  Matrix emissions(static_cast<int>(features.size()), m);
  for (size_t t = 0; t < features.size(); ++t) {
    for (const auto &[f, value] : features[t]) {
      for (int y = 0; y < m; ++y) {
        const int k = model.EmissionParam(f, y);
        if (k >= 0) emissions(static_cast<int>(t), y) += value * weights[k];
      }
    }
  }
  return emissions;
}

inline TransitionScores ReferenceTransitions(const CrfModel &model,
                                             std::span<const double> weights) {
  const int m = model.num_labels();
  TransitionScores scores(m);
  for (int a = 0; a < m; ++a) {
    scores.start[a] = weights[model.StartParam(a)];
    scores.end[a] = weights[model.EndParam(a)];
    for (int b = 0; b < m; ++b) {
      scores.transition(a, b) = weights[model.TransitionParam(a, b)];
    }
  }
  return scores;
}

// Regularized NLL by enumerating every label sequence.
inline double BruteNll(const CrfModel &model,
                       std::span<const CrfInstance> batch,
                       std::span<const double> weights, double l2) {
  double total = 0.0;
  for (const CrfInstance &instance : batch) {
    Matrix emissions = ReferenceEmissions(model, instance.features, weights);
    TransitionScores scores = ReferenceTransitions(model, weights);
    total += Enumerate(emissions, scores).log_partition -
             PathScore(emissions, scores, instance.labels);
  }
  double norm = 0.0;
  for (double w : weights) norm += w * w;
  return total + 0.5 * l2 * norm;
}

}  // namespace labner::testing

#endif  // LABNER_TESTS_TEST_UTIL_H_

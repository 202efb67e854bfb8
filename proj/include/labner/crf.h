#ifndef LABNER_CRF_H_
#define LABNER_CRF_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "labner/corpus.h"
#include "labner/features.h"
#include "labner/lattice.h"

namespace labner {

// Sparse feature activations of one position: (feature id, value), sorted by
// id, no duplicates.
using FeatureVector = std::vector<std::pair<int, double>>;

class FeatureDictionary {
 public:
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string> &names() const { return names_; }

  // Id of a feature string, or -1.
  int Lookup(const std::string &name) const;
  int Add(const std::string &name);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

// One sentence prepared for training: features per position and the gold
// label indices.
struct CrfInstance {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
};

// Linear-chain CRF over a tag alphabet of m labels. Emission weights exist
// only for the (feature, label) pairs the model was created with and are
// stored feature-major. The parameter vector is laid out as
//
//   [emissions | transitions (m x m, prev-major) | start (m) | end (m)]
class CrfModel {
 public:
  CrfModel() = default;

  // `feature_labels[f]` lists the label indices feature f carries weights
  // for. All weights start at zero.
  CrfModel(LabelSet labels, FeatureExtractor extractor,
           FeatureDictionary dictionary,
           const std::vector<std::vector<int>> &feature_labels);

  const LabelSet &labels() const { return labels_; }
  int num_labels() const { return labels_.num_tags(); }
  const FeatureExtractor &extractor() const { return extractor_; }
  const FeatureDictionary &dictionary() const { return dictionary_; }
  int num_features() const { return dictionary_.size(); }

  int num_emission_params() const {
    return static_cast<int>(emission_labels_.size());
  }
  int num_params() const { return static_cast<int>(weights_.size()); }
  int TransitionParam(int prev, int next) const {
    return num_emission_params() + prev * num_labels() + next;
  }
  int StartParam(int label) const {
    return num_emission_params() + num_labels() * num_labels() + label;
  }
  int EndParam(int label) const { return StartParam(label) + num_labels(); }

  // Emission parameters of feature f occupy [EmissionBegin(f),
  // EmissionBegin(f + 1)); EmissionLabel(k) is the label of parameter k.
  int EmissionBegin(int feature) const { return emission_offsets_[feature]; }
  int EmissionLabel(int param) const { return emission_labels_[param]; }
  // Parameter index of (feature, label), or -1.
  int EmissionParam(int feature, int label) const;

  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }
  void set_weights(std::vector<double> weights);

  // Feature vectors of a sentence; features unknown to the dictionary are
  // dropped.
  std::vector<FeatureVector> Featurize(const Sentence &sentence) const;

  Matrix Emissions(const std::vector<FeatureVector> &features,
                   std::span<const double> weights) const;
  Matrix Emissions(const std::vector<FeatureVector> &features) const {
    return Emissions(features, weights_);
  }
  TransitionScores Transitions(std::span<const double> weights) const;
  TransitionScores Transitions() const { return Transitions(weights_); }

 private:
  LabelSet labels_;
  FeatureExtractor extractor_;
  FeatureDictionary dictionary_;
  std::vector<int> emission_offsets_{0};  // size num_features + 1
  std::vector<int> emission_labels_;
  std::vector<double> weights_;
};

double ScoreSequence(const CrfModel &model,
                     const std::vector<FeatureVector> &features,
                     std::span<const int> labels);
double LogPartition(const CrfModel &model,
                    const std::vector<FeatureVector> &features);
Marginals ComputeMarginals(const CrfModel &model,
                           const std::vector<FeatureVector> &features);

// With `constrained`, transitions that break the BIO scheme are forbidden so
// the output always validates.
ViterbiPath Viterbi(const CrfModel &model,
                    const std::vector<FeatureVector> &features,
                    bool constrained = false);

// Regularized negative log-likelihood of a batch as a function of the
// parameter vector:
//
//   sum_i (log Z(x_i) - score(x_i, y_i)) + (l2 / 2) * |w|^2
//
// with gradient E[counts] - gold counts + l2 * w. Sentences are reduced in
// order, so results do not depend on scheduling.
class CrfObjective {
 public:
  CrfObjective(const CrfModel &model, std::span<const CrfInstance> batch,
               double l2)
      : model_(model), batch_(batch), l2_(l2) {}

  int num_params() const { return model_.num_params(); }

  // Returns the objective; fills `gradient` (num_params entries) if it is
  // not empty.
  double Evaluate(std::span<const double> weights,
                  std::span<double> gradient) const;

 private:
  const CrfModel &model_;
  std::span<const CrfInstance> batch_;
  double l2_;
};

// Objective and gradient at the model's current weights.
std::pair<double, std::vector<double>> NllAndGradient(
    const CrfModel &model, std::span<const CrfInstance> batch, double l2);

enum class Optimizer { kLbfgs, kSgd };

struct EpochLog {
  int epoch = 0;
  double train_objective = 0.0;
  std::optional<double> dev_f1;  // exact-match micro F1
};

struct TrainConfig {
  Optimizer optimizer = Optimizer::kLbfgs;
  // L-BFGS iterations or SGD passes over the data.
  int epochs = 100;
  double l2 = 1.0;
  // SGD step size at the first update; decays as lr / (1 + t / N) with t
  // updates done and N training sentences.
  double learning_rate = 0.1;
  int batch_size = 1;
  // Stop after this many epochs without dev F1 improvement (0 disables) and
  // keep the best weights seen.
  int patience = 5;
  // Seeds SGD shuffling.
  uint64_t seed = 1;
  int lbfgs_memory = 6;
  // Relative objective decrease below which L-BFGS stops.
  double tolerance = 1e-7;
  // Create weights for every (feature, label) pair instead of only the pairs
  // seen in training.
  bool all_feature_label_pairs = false;
  // Hard BIO constraints when decoding the dev set.
  bool constrained_decoding = true;
  std::function<void(const EpochLog &)> on_epoch;
};

struct TrainResult {
  CrfModel model;
  std::vector<EpochLog> log;
  std::vector<std::string> warnings;
};

// Feature dictionary and label set come from `train` only. Throws DataError
// on an empty or untagged training corpus.
TrainResult Train(const Corpus &train, const Corpus &dev,
                  const FeatureExtractor &extractor,
                  const TrainConfig &config);

// Builds training instances against an existing model's dictionary and
// label set. Tags of unknown types throw DataError.
std::vector<CrfInstance> MakeInstances(const CrfModel &model,
                                       const Corpus &corpus);

// Viterbi tags for every sentence; existing tags are replaced.
Corpus Tag(const CrfModel &model, const Corpus &corpus,
           bool constrained = true);

inline constexpr int kModelFormatVersion = 1;

// Versioned text format: labels, templates, gazetteers, feature dictionary
// with its label pairs, and weights as hexadecimal floats (bit-exact),
// closed by an FNV-1a checksum of everything before it.
void SaveModel(const CrfModel &model, std::ostream &out);

// Throws DataError on a version mismatch, truncation or checksum failure.
CrfModel LoadModel(std::istream &in);

}  // namespace labner

#endif  // LABNER_CRF_H_

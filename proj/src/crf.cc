#include "labner/crf.h"

#include <algorithm>

#include "crf_internal.h"
#include "labner/error.h"

namespace labner {

int FeatureDictionary::Lookup(const std::string &name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

int FeatureDictionary::Add(const std::string &name) {
  auto [it, inserted] = ids_.emplace(name, size());
  if (inserted) names_.push_back(name);
  return it->second;
}

CrfModel::CrfModel(LabelSet labels, FeatureExtractor extractor,
                   FeatureDictionary dictionary,
                   const std::vector<std::vector<int>> &feature_labels)
    : labels_(std::move(labels)),
      extractor_(std::move(extractor)),
      dictionary_(std::move(dictionary)) {
  if (static_cast<int>(feature_labels.size()) != dictionary_.size()) {
    throw DataError("feature label lists do not match the dictionary size");
  }
  const int m = num_labels();
  for (const std::vector<int> &pair_labels : feature_labels) {
    for (size_t i = 0; i < pair_labels.size(); ++i) {
      if (pair_labels[i] < 0 || pair_labels[i] >= m ||
          (i > 0 && pair_labels[i] <= pair_labels[i - 1])) {
        throw DataError("feature labels must be sorted, unique and in range");
      }
      emission_labels_.push_back(pair_labels[i]);
    }
    emission_offsets_.push_back(static_cast<int>(emission_labels_.size()));
  }
  weights_.assign(emission_labels_.size() + m * m + 2 * m, 0.0);
}

int CrfModel::EmissionParam(int feature, int label) const {
  auto begin = emission_labels_.begin() + emission_offsets_[feature];
  auto end = emission_labels_.begin() + emission_offsets_[feature + 1];
  auto it = std::lower_bound(begin, end, label);
  if (it == end || *it != label) return -1;
  return static_cast<int>(it - emission_labels_.begin());
}

void CrfModel::set_weights(std::vector<double> weights) {
  if (weights.size() != weights_.size()) {
    throw DataError("expected " + std::to_string(weights_.size()) +
                    " weights, got " + std::to_string(weights.size()));
  }
  weights_ = std::move(weights);
}

std::vector<FeatureVector> CrfModel::Featurize(const Sentence &sentence) const {
  std::vector<FeatureVector> result;
  result.reserve(sentence.size());
  for (const auto &names : extractor_.ExtractAll(sentence.Words())) {
    FeatureVector vector;
    for (const std::string &name : names) {
      int id = dictionary_.Lookup(name);
      if (id >= 0) vector.emplace_back(id, 1.0);
    }
    std::sort(vector.begin(), vector.end());
    result.push_back(std::move(vector));
  }
  return result;
}

Matrix CrfModel::Emissions(const std::vector<FeatureVector> &features,
                           std::span<const double> weights) const {
  const int n = static_cast<int>(features.size());
  Matrix emissions(n, num_labels());
  for (int t = 0; t < n; ++t) {
    for (const auto &[feature, value] : features[t]) {
      const int end = emission_offsets_[feature + 1];
      for (int k = emission_offsets_[feature]; k < end; ++k) {
        emissions(t, emission_labels_[k]) += value * weights[k];
      }
    }
  }
  return emissions;
}

TransitionScores CrfModel::Transitions(std::span<const double> weights) const {
  const int m = num_labels();
  TransitionScores scores(m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      scores.transition(a, b) = weights[TransitionParam(a, b)];
    }
    scores.start[a] = weights[StartParam(a)];
    scores.end[a] = weights[EndParam(a)];
  }
  return scores;
}

double ScoreSequence(const CrfModel &model,
                     const std::vector<FeatureVector> &features,
                     std::span<const int> labels) {
  return ScoreSequence(model.Emissions(features), model.Transitions(), labels);
}

double LogPartition(const CrfModel &model,
                    const std::vector<FeatureVector> &features) {
  return LogPartition(model.Emissions(features), model.Transitions());
}

Marginals ComputeMarginals(const CrfModel &model,
                           const std::vector<FeatureVector> &features) {
  return ComputeMarginals(model.Emissions(features), model.Transitions());
}

ViterbiPath Viterbi(const CrfModel &model,
                    const std::vector<FeatureVector> &features,
                    bool constrained) {
  TransitionScores scores = model.Transitions();
  if (constrained) ApplyBioConstraints(model.labels(), scores);
  return Viterbi(model.Emissions(features), scores);
}

double CrfObjective::Evaluate(std::span<const double> weights,
                              std::span<double> gradient) const {
  const bool want_gradient = !gradient.empty();
  if (want_gradient) std::fill(gradient.begin(), gradient.end(), 0.0);
  const TransitionScores scores = model_.Transitions(weights);
  double total = 0.0;
  for (const CrfInstance &instance : batch_) {
    if (instance.labels.empty()) continue;
    const Matrix emissions = model_.Emissions(instance.features, weights);
    if (want_gradient) {
      total += internal::SentenceLoss(
          model_, instance, emissions, scores,
          [&](int param, double value) { gradient[param] += value; });
    } else {
      total += LogPartition(emissions, scores) -
               ScoreSequence(emissions, scores, instance.labels);
    }
  }
  double norm = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    norm += weights[i] * weights[i];
    if (want_gradient) gradient[i] += l2_ * weights[i];
  }
  return total + 0.5 * l2_ * norm;
}

std::pair<double, std::vector<double>> NllAndGradient(
    const CrfModel &model, std::span<const CrfInstance> batch, double l2) {
  std::vector<double> gradient(model.num_params());
  double value = CrfObjective(model, batch, l2).Evaluate(model.weights(),
                                                         gradient);
  return {value, std::move(gradient)};
}

}  // namespace labner

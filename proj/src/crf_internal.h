#ifndef LABNER_SRC_CRF_INTERNAL_H_
#define LABNER_SRC_CRF_INTERNAL_H_

#include "labner/crf.h"

namespace labner::internal {

// Loss log Z - score(gold) of one sentence given its lattice scores, with
// gradient contributions passed to sink(param, value). No regularization.
template <typename Sink>
double SentenceLoss(const CrfModel &model, const CrfInstance &instance,
                    const Matrix &emissions, const TransitionScores &scores,
                    Sink &&sink) {
  const int n = static_cast<int>(instance.labels.size());
  const int m = model.num_labels();
  Marginals marginals = ComputeMarginals(emissions, scores);
  const double gold = ScoreSequence(emissions, scores, instance.labels);

  for (int t = 0; t < n; ++t) {
    const int gold_label = instance.labels[t];
    for (const auto &[feature, value] : instance.features[t]) {
      const int end = model.EmissionBegin(feature + 1);
      for (int k = model.EmissionBegin(feature); k < end; ++k) {
        const int label = model.EmissionLabel(k);
        double g = marginals.node(t, label);
        if (label == gold_label) g -= 1.0;
        sink(k, value * g);
      }
    }
  }
  for (int t = 0; t + 1 < n; ++t) {
    const Matrix &edge = marginals.edge[t];
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sink(model.TransitionParam(a, b), edge(a, b));
    }
    sink(model.TransitionParam(instance.labels[t], instance.labels[t + 1]),
         -1.0);
  }
  for (int y = 0; y < m; ++y) {
    sink(model.StartParam(y), marginals.node(0, y));
    sink(model.EndParam(y), marginals.node(n - 1, y));
  }
  sink(model.StartParam(instance.labels.front()), -1.0);
  sink(model.EndParam(instance.labels.back()), -1.0);
  return marginals.log_partition - gold;
}

}  // namespace labner::internal

#endif  // LABNER_SRC_CRF_INTERNAL_H_

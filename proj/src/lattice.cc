#include "labner/lattice.h"

#include <algorithm>
#include <cmath>

#include "labner/error.h"

namespace labner {
namespace {

void CheckShapes(const Matrix &emissions, const TransitionScores &scores) {
  if (emissions.rows() < 1) throw DataError("lattice needs at least one position");
  if (emissions.cols() != scores.num_labels()) {
    throw DataError("emission width " + std::to_string(emissions.cols()) +
                    " does not match " + std::to_string(scores.num_labels()) +
                    " labels");
  }
}

// alpha(t, y): log-sum of all prefixes ending in y at t, emission included.
Matrix Forward(const Matrix &emissions, const TransitionScores &scores) {
  const int n = emissions.rows();
  const int m = emissions.cols();
  Matrix alpha(n, m);
  for (int y = 0; y < m; ++y) alpha(0, y) = scores.start[y] + emissions(0, y);
  std::vector<double> terms(m);
  for (int t = 1; t < n; ++t) {
    for (int y = 0; y < m; ++y) {
      for (int x = 0; x < m; ++x) {
        terms[x] = alpha(t - 1, x) + scores.transition(x, y);
      }
      alpha(t, y) = LogSumExp(terms) + emissions(t, y);
    }
  }
  return alpha;
}

// beta(t, y): log-sum of all suffixes after t given y at t, end score included.
Matrix Backward(const Matrix &emissions, const TransitionScores &scores) {
  const int n = emissions.rows();
  const int m = emissions.cols();
  Matrix beta(n, m);
  for (int y = 0; y < m; ++y) beta(n - 1, y) = scores.end[y];
  std::vector<double> terms(m);
  for (int t = n - 2; t >= 0; --t) {
    for (int x = 0; x < m; ++x) {
      for (int y = 0; y < m; ++y) {
        terms[y] = scores.transition(x, y) + emissions(t + 1, y) + beta(t + 1, y);
      }
      beta(t, x) = LogSumExp(terms);
    }
  }
  return beta;
}

double SafeExp(double log_value) {
  return log_value == kNegInf ? 0.0 : std::exp(log_value);
}

}  // namespace

void ApplyBioConstraints(const LabelSet &labels, TransitionScores &scores) {
  const std::vector<BioTag> alphabet = labels.TagAlphabet();
  const int m = static_cast<int>(alphabet.size());
  if (m != scores.num_labels()) {
    throw DataError("label set has " + std::to_string(m) +
                    " tags, transitions have " +
                    std::to_string(scores.num_labels()));
  }
  for (int y = 0; y < m; ++y) {
    if (!alphabet[y].inside()) continue;
    scores.start[y] = kNegInf;
    for (int x = 0; x < m; ++x) {
      if (alphabet[x].outside() || alphabet[x].type() != alphabet[y].type()) {
        scores.transition(x, y) = kNegInf;
      }
    }
  }
}

double LogSumExp(std::span<const double> values) {
  double max = kNegInf;
  for (double v : values) max = std::max(max, v);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double ScoreSequence(const Matrix &emissions, const TransitionScores &scores,
                     std::span<const int> labels) {
  CheckShapes(emissions, scores);
  if (static_cast<int>(labels.size()) != emissions.rows()) {
    throw DataError("label sequence length differs from lattice length");
  }
  double score = scores.start[labels[0]];
  for (size_t t = 0; t < labels.size(); ++t) {
    score += emissions(t, labels[t]);
    if (t > 0) score += scores.transition(labels[t - 1], labels[t]);
  }
  return score + scores.end[labels.back()];
}

double LogPartition(const Matrix &emissions, const TransitionScores &scores) {
  CheckShapes(emissions, scores);
  Matrix alpha = Forward(emissions, scores);
  const int n = emissions.rows();
  std::vector<double> terms(emissions.cols());
  for (int y = 0; y < emissions.cols(); ++y) {
    terms[y] = alpha(n - 1, y) + scores.end[y];
  }
  return LogSumExp(terms);
}

Marginals ComputeMarginals(const Matrix &emissions,
                           const TransitionScores &scores) {
  CheckShapes(emissions, scores);
  const int n = emissions.rows();
  const int m = emissions.cols();
  Matrix alpha = Forward(emissions, scores);
  Matrix beta = Backward(emissions, scores);

  Marginals result;
  std::vector<double> terms(m);
  for (int y = 0; y < m; ++y) terms[y] = alpha(n - 1, y) + scores.end[y];
  const double log_z = LogSumExp(terms);
  result.log_partition = log_z;

  result.node = Matrix(n, m);
  for (int t = 0; t < n; ++t) {
    for (int y = 0; y < m; ++y) {
      result.node(t, y) = SafeExp(alpha(t, y) + beta(t, y) - log_z);
    }
  }
  result.edge.reserve(std::max(0, n - 1));
  for (int t = 0; t + 1 < n; ++t) {
    Matrix edge(m, m);
    for (int x = 0; x < m; ++x) {
      for (int y = 0; y < m; ++y) {
        edge(x, y) = SafeExp(alpha(t, x) + scores.transition(x, y) +
                             emissions(t + 1, y) + beta(t + 1, y) - log_z);
      }
    }
    result.edge.push_back(std::move(edge));
  }
  return result;
}

ViterbiPath Viterbi(const Matrix &emissions, const TransitionScores &scores) {
  CheckShapes(emissions, scores);
  const int n = emissions.rows();
  const int m = emissions.cols();
  Matrix delta(n, m);
  std::vector<int> backpointer(static_cast<size_t>(n) * m, 0);
  for (int y = 0; y < m; ++y) delta(0, y) = scores.start[y] + emissions(0, y);
  for (int t = 1; t < n; ++t) {
    for (int y = 0; y < m; ++y) {
      double best = kNegInf;
      int arg = 0;
      for (int x = 0; x < m; ++x) {
        double candidate = delta(t - 1, x) + scores.transition(x, y);
        if (candidate > best) {
          best = candidate;
          arg = x;
        }
      }
      delta(t, y) = best + emissions(t, y);
      backpointer[t * m + y] = arg;
    }
  }
  ViterbiPath path;
  path.labels.assign(n, 0);
  double best = kNegInf;
  for (int y = 0; y < m; ++y) {
    double candidate = delta(n - 1, y) + scores.end[y];
    if (candidate > best) {
      best = candidate;
      path.labels[n - 1] = y;
    }
  }
  path.score = best;
  for (int t = n - 1; t > 0; --t) {
    path.labels[t - 1] = backpointer[t * m + path.labels[t]];
  }
  return path;
}

}  // namespace labner

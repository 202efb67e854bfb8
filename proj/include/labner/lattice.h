#ifndef LABNER_LATTICE_H_
#define LABNER_LATTICE_H_

#include <limits>
#include <span>
#include <vector>

#include "labner/corpus.h"

namespace labner {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, value) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double &operator()(int r, int c) { return data_[r * cols_ + c]; }
  double operator()(int r, int c) const { return data_[r * cols_ + c]; }

  std::span<double> row(int r) { return {data_.data() + r * cols_, size_t(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + r * cols_, size_t(cols_)};
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Label-pair scores of a linear chain: transition(prev, next) plus scores
// for starting and ending on a label. -inf forbids a move.
struct TransitionScores {
  explicit TransitionScores(int num_labels = 0)
      : transition(num_labels, num_labels),
        start(num_labels, 0.0),
        end(num_labels, 0.0) {}

  int num_labels() const { return static_cast<int>(start.size()); }

  Matrix transition;
  std::vector<double> start;
  std::vector<double> end;
};

// Sets -inf on every move into I-X except from B-X or I-X, and on starting
// with I-X. Labels are indices into `labels`' tag alphabet.
void ApplyBioConstraints(const LabelSet &labels, TransitionScores &scores);

// log(sum(exp(values))), -inf for an empty or all -inf input.
double LogSumExp(std::span<const double> values);

// Unnormalized log-score of one label sequence: emissions(t, y_t) summed over
// positions, plus start(y_0), transitions and end(y_{n-1}).
double ScoreSequence(const Matrix &emissions, const TransitionScores &scores,
                     std::span<const int> labels);

// Log of the sum of exp(ScoreSequence) over every label sequence, by the
// forward recursion in log space.
double LogPartition(const Matrix &emissions, const TransitionScores &scores);

struct Marginals {
  double log_partition = 0.0;
  Matrix node;               // n x m, rows sum to 1
  std::vector<Matrix> edge;  // n-1 matrices of m x m: P(y_t = a, y_t+1 = b)
};

Marginals ComputeMarginals(const Matrix &emissions,
                           const TransitionScores &scores);

struct ViterbiPath {
  std::vector<int> labels;
  double score = 0.0;
};

// Highest scoring sequence. Ties go to the lower label index, deciding from
// the last position backwards.
ViterbiPath Viterbi(const Matrix &emissions, const TransitionScores &scores);

}  // namespace labner

#endif  // LABNER_LATTICE_H_

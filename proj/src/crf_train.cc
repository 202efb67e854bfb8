#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>
#include <ceres/iteration_callback.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "crf_internal.h"
#include "labner/bio.h"
#include "labner/brat.h"
#include "labner/crf.h"
#include "labner/error.h"
#include "labner/eval.h"
#include "labner/split.h"

namespace labner {
namespace {

void CheckTrainable(const Corpus &corpus, const char *name) {
  for (const Document &doc : corpus.documents) {
    for (size_t s = 0; s < doc.sentences.size(); ++s) {
      const Sentence &sentence = doc.sentences[s];
      std::string where = std::string(name) + " document '" + doc.id +
                          "' sentence " + std::to_string(s);
      if (!sentence.tags) throw DataError(where + " is untagged");
      auto violations = ValidateBio(*sentence.tags);
      if (!violations.empty()) {
        throw DataError(where + " has an invalid BIO sequence at position " +
                        std::to_string(violations[0].position));
      }
    }
  }
}

// Exact-match F1 of Viterbi decodes of a fixed dev set under given weights.
class DevScorer {
 public:
  DevScorer(const CrfModel &model, const Corpus &dev, bool constrained)
      : model_(model), dev_(dev), constrained_(constrained) {
    for (const Document &doc : dev.documents) {
      for (const Sentence &sentence : doc.sentences) {
        features_.push_back(model.Featurize(sentence));
      }
    }
  }

  bool empty() const { return features_.empty(); }

  double F1(std::span<const double> weights) const {
    TransitionScores scores = model_.Transitions(weights);
    if (constrained_) ApplyBioConstraints(model_.labels(), scores);
    Corpus pred = dev_;
    size_t next = 0;
    for (Document &doc : pred.documents) {
      for (Sentence &sentence : doc.sentences) {
        const auto &features = features_[next++];
        if (features.empty()) {
          sentence.tags.emplace();
          continue;
        }
        ViterbiPath path =
            Viterbi(model_.Emissions(features, weights), scores);
        std::vector<BioTag> tags;
        for (int label : path.labels) tags.push_back(model_.labels().TagAt(label));
        // Unconstrained decodes may need repair before span extraction.
        sentence.tags = RepairBio(tags, RepairMode::kBegin);
      }
    }
    return Evaluate(dev_, pred, MatchMode::kExact).micro.F1();
  }

 private:
  const CrfModel &model_;
  const Corpus &dev_;
  bool constrained_;
  std::vector<std::vector<FeatureVector>> features_;
};

// Tracks dev F1 across epochs for early stopping.
class EarlyStopping {
 public:
  EarlyStopping(int patience, const DevScorer &scorer)
      : patience_(patience), scorer_(scorer) {}

  // Records an epoch; returns true when training should stop.
  bool Update(EpochLog &log, std::span<const double> weights) {
    if (scorer_.empty()) return false;
    log.dev_f1 = scorer_.F1(weights);
    if (!best_f1_ || *log.dev_f1 > *best_f1_) {
      best_f1_ = log.dev_f1;
      best_weights_.assign(weights.begin(), weights.end());
      stale_ = 0;
      return false;
    }
    ++stale_;
    return patience_ > 0 && stale_ >= patience_;
  }

  // Best weights seen, if early stopping is active.
  const std::vector<double> *best() const {
    return patience_ > 0 && best_f1_ ? &best_weights_ : nullptr;
  }

 private:
  int patience_;
  const DevScorer &scorer_;
  std::optional<double> best_f1_;
  std::vector<double> best_weights_;
  int stale_ = 0;
};

class CeresObjective : public ceres::FirstOrderFunction {
 public:
  explicit CeresObjective(const CrfObjective &objective)
      : objective_(objective) {}

  bool Evaluate(const double *parameters, double *cost,
                double *gradient) const override {
    const size_t n = objective_.num_params();
    *cost = objective_.Evaluate(
        std::span<const double>(parameters, n),
        gradient ? std::span<double>(gradient, n) : std::span<double>());
    return std::isfinite(*cost);
  }

  int NumParameters() const override { return objective_.num_params(); }

 private:
  const CrfObjective &objective_;
};

class EpochCallback : public ceres::IterationCallback {
 public:
  EpochCallback(const std::vector<double> &weights, EarlyStopping &stopping,
                TrainResult &result, const TrainConfig &config)
      : weights_(weights),
        stopping_(stopping),
        result_(result),
        config_(config) {}

  ceres::CallbackReturnType operator()(
      const ceres::IterationSummary &summary) override {
    if (summary.iteration == 0) return ceres::SOLVER_CONTINUE;
    EpochLog log;
    log.epoch = summary.iteration;
    log.train_objective = summary.cost;
    bool stop = stopping_.Update(log, weights_);
    result_.log.push_back(log);
    if (config_.on_epoch) config_.on_epoch(log);
    return stop ? ceres::SOLVER_TERMINATE_SUCCESSFULLY
                : ceres::SOLVER_CONTINUE;
  }

 private:
  const std::vector<double> &weights_;
  EarlyStopping &stopping_;
  TrainResult &result_;
  const TrainConfig &config_;
};

void TrainLbfgs(const CrfObjective &objective, const TrainConfig &config,
                EarlyStopping &stopping, std::vector<double> &weights,
                TrainResult &result) {
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_lbfgs_rank = config.lbfgs_memory;
  options.max_num_iterations = config.epochs;
  options.function_tolerance = config.tolerance;
  options.gradient_tolerance = 1e-10;
  options.parameter_tolerance = 1e-12;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  options.update_state_every_iteration = true;
  EpochCallback callback(weights, stopping, result, config);
  options.callbacks.push_back(&callback);

  ceres::GradientProblem problem(new CeresObjective(objective));
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, weights.data(), &summary);
  if (summary.termination_type == ceres::FAILURE) {
    result.warnings.push_back("L-BFGS failed: " + summary.message);
  }
}

// Minibatch SGD with the weights kept as scale * v so the L2 shrinkage of
// every update costs O(1).
void TrainSgd(const CrfModel &model, std::vector<CrfInstance> instances,
              const TrainConfig &config, EarlyStopping &stopping,
              std::vector<double> &weights, TrainResult &result) {
  const double n = static_cast<double>(instances.size());
  const int batch_size = std::max(1, config.batch_size);
  std::vector<double> v(weights.size(), 0.0);
  double scale = 1.0;
  long updates = 0;
  SplitMix64 rng(config.seed);
  std::vector<double> step(weights.size(), 0.0);
  std::vector<int> touched;

  auto materialize = [&] {
    for (size_t i = 0; i < v.size(); ++i) weights[i] = scale * v[i];
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Shuffle(instances, rng);
    for (size_t begin = 0; begin < instances.size(); begin += batch_size) {
      const size_t end = std::min(instances.size(), begin + batch_size);
      const double eta = config.learning_rate / (1.0 + updates / n);
      ++updates;

      TransitionScores scores = model.Transitions(v);
      for (int a = 0; a < scores.num_labels(); ++a) {
        for (int b = 0; b < scores.num_labels(); ++b) {
          scores.transition(a, b) *= scale;
        }
        scores.start[a] *= scale;
        scores.end[a] *= scale;
      }
      for (size_t i = begin; i < end; ++i) {
        Matrix emissions = model.Emissions(instances[i].features, v);
        for (int t = 0; t < emissions.rows(); ++t) {
          for (double &e : emissions.row(t)) e *= scale;
        }
        internal::SentenceLoss(model, instances[i], emissions, scores,
                               [&](int param, double value) {
                                 if (step[param] == 0.0) touched.push_back(param);
                                 step[param] += value;
                               });
      }
      scale *= 1.0 - eta * config.l2 / n;
      const double factor = eta / static_cast<double>(end - begin) / scale;
      for (int param : touched) {
        v[param] -= factor * step[param];
        step[param] = 0.0;
      }
      touched.clear();
      if (scale < 1e-9) {
        for (double &x : v) x *= scale;
        scale = 1.0;
      }
    }

    materialize();
    EpochLog log;
    log.epoch = epoch;
    log.train_objective =
        CrfObjective(model, instances, config.l2).Evaluate(weights, {});
    bool stop = stopping.Update(log, weights);
    result.log.push_back(log);
    if (config.on_epoch) config.on_epoch(log);
    if (stop) break;
  }
  materialize();
}

}  // namespace

std::vector<CrfInstance> MakeInstances(const CrfModel &model,
                                       const Corpus &corpus) {
  std::vector<CrfInstance> instances;
  for (const Document &doc : corpus.documents) {
    for (const Sentence &sentence : doc.sentences) {
      if (!sentence.tags) {
        throw DataError("document '" + doc.id + "' has an untagged sentence");
      }
      CrfInstance instance;
      instance.features = model.Featurize(sentence);
      for (const BioTag &tag : *sentence.tags) {
        int label = model.labels().TagIndex(tag);
        if (label < 0) {
          throw DataError("tag " + tag.ToString() + " unknown to the model");
        }
        instance.labels.push_back(label);
      }
      instances.push_back(std::move(instance));
    }
  }
  return instances;
}

TrainResult Train(const Corpus &train, const Corpus &dev,
                  const FeatureExtractor &extractor,
                  const TrainConfig &config) {
  if (train.num_sentences() == 0) throw DataError("training corpus is empty");
  if (config.epochs < 0 || config.batch_size < 1 || config.l2 < 0 ||
      config.learning_rate <= 0 || config.lbfgs_memory < 1) {
    throw DataError("invalid training configuration");
  }
  CheckTrainable(train, "training");
  CheckTrainable(dev, "dev");

  TrainResult result;
  LabelSet labels = train.label_set;
  const LabelSet train_types = CollectLabelSet(train.documents);
  for (const std::string &type : train_types.types()) labels.Add(type);
  const LabelSet dev_types = CollectLabelSet(dev.documents);
  for (const std::string &type : dev_types.types()) {
    if (!labels.Contains(type)) {
      result.warnings.push_back("dev label '" + type +
                                "' does not occur in training data and will "
                                "never be predicted");
    }
  }

  // Dictionary and (feature, label) pairs from the training data alone.
  FeatureDictionary dictionary;
  std::vector<std::set<int>> pairs;
  std::vector<CrfInstance> instances;
  for (const Document &doc : train.documents) {
    for (const Sentence &sentence : doc.sentences) {
      if (sentence.size() == 0) continue;
      CrfInstance instance;
      for (const BioTag &tag : *sentence.tags) {
        instance.labels.push_back(labels.TagIndex(tag));
      }
      const auto all = extractor.ExtractAll(sentence.Words());
      for (size_t t = 0; t < all.size(); ++t) {
        FeatureVector vector;
        for (const std::string &name : all[t]) {
          int id = dictionary.Add(name);
          if (id == static_cast<int>(pairs.size())) pairs.emplace_back();
          pairs[id].insert(instance.labels[t]);
          vector.emplace_back(id, 1.0);
        }
        std::sort(vector.begin(), vector.end());
        instance.features.push_back(std::move(vector));
      }
      instances.push_back(std::move(instance));
    }
  }
  std::vector<std::vector<int>> feature_labels;
  feature_labels.reserve(pairs.size());
  for (const std::set<int> &labels_of_feature : pairs) {
    if (config.all_feature_label_pairs) {
      std::vector<int> every(labels.num_tags());
      for (int y = 0; y < labels.num_tags(); ++y) every[y] = y;
      feature_labels.push_back(std::move(every));
    } else {
      feature_labels.emplace_back(labels_of_feature.begin(),
                                  labels_of_feature.end());
    }
  }
  result.model = CrfModel(labels, extractor, std::move(dictionary),
                          feature_labels);
  if (config.epochs == 0) return result;

  DevScorer scorer(result.model, dev, config.constrained_decoding);
  EarlyStopping stopping(config.patience, scorer);
  std::vector<double> weights(result.model.num_params(), 0.0);
  if (config.optimizer == Optimizer::kLbfgs) {
    CrfObjective objective(result.model, instances, config.l2);
    TrainLbfgs(objective, config, stopping, weights, result);
  } else {
    TrainSgd(result.model, std::move(instances), config, stopping, weights,
             result);
  }
  if (const std::vector<double> *best = stopping.best()) weights = *best;
  result.model.set_weights(std::move(weights));
  return result;
}

Corpus Tag(const CrfModel &model, const Corpus &corpus, bool constrained) {
  Corpus tagged = corpus;
  tagged.label_set = model.labels();
  for (Document &doc : tagged.documents) {
    for (Sentence &sentence : doc.sentences) {
      std::vector<BioTag> tags;
      if (sentence.size() > 0) {
        ViterbiPath path = Viterbi(model, model.Featurize(sentence), constrained);
        for (int label : path.labels) tags.push_back(model.labels().TagAt(label));
      }
      sentence.unvalidated = !IsValidBio(tags);
      sentence.tags = std::move(tags);
    }
  }
  return tagged;
}

}  // namespace labner

#include "stepgrid/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "stepgrid/baseline.hpp"
#include "stepgrid/rng.hpp"

namespace stepgrid {

std::vector<std::vector<std::string>> make_folds(const std::vector<LabeledId>& labels,
                                                 const CvPlan& plan, int repeat_index) {
  require(plan.folds >= 2, Errc::bad_config, "make_folds: need at least 2 folds");
  require(!labels.empty(), Errc::bad_config, "make_folds: empty label list");

  std::map<std::string, std::vector<std::string>> by_class;  // sorted classes
  for (const auto& item : labels) by_class[item.cls].push_back(item.id);
  for (const auto& [cls, ids] : by_class)
    require(int(ids.size()) >= plan.folds, Errc::class_too_small,
            "make_folds: class '" + cls + "' has " + std::to_string(ids.size()) +
                " members but " + std::to_string(plan.folds) + " folds were requested");

  std::vector<std::vector<std::string>> folds(size_t(plan.folds));
  int class_index = 0;
  for (auto& [cls, ids] : by_class) {
    // per-(seed, repeat, class) stream so repeats genuinely differ
    Rng rng(derive_seed(plan.seed, "fold", repeat_index, cls));
    shuffle(ids, rng);
    // rotate the starting fold per class to balance the remainders
    const int start = class_index % plan.folds;
    for (size_t k = 0; k < ids.size(); ++k)
      folds[size_t((start + int(k)) % plan.folds)].push_back(ids[k]);
    ++class_index;
  }
  return folds;
}

EvalReport run_experiment(const std::vector<LabeledId>& items, const CvPlan& plan,
                          const std::vector<StrategyRunner>& strategies) {
  require(!strategies.empty(), Errc::bad_config, "run_experiment: no strategies");
  std::unordered_map<std::string, std::string> truth;
  for (const auto& item : items) {
    const bool inserted = truth.emplace(item.id, item.cls).second;
    require(inserted, Errc::bad_config, "run_experiment: duplicate id '" + item.id + "'");
  }

  EvalReport report;
  for (const auto& strategy : strategies) {
    for (int repeat = 0; repeat < plan.repeats; ++repeat) {
      const auto folds = make_folds(items, plan, repeat);
      for (int fold = 0; fold < plan.folds; ++fold) {
        const auto& eval_ids = folds[size_t(fold)];
        std::vector<std::string> train_ids;
        for (int other = 0; other < plan.folds; ++other)
          if (other != fold)
            train_ids.insert(train_ids.end(), folds[size_t(other)].begin(),
                             folds[size_t(other)].end());

        // no test-set leakage, ever
        std::unordered_set<std::string> train_set(train_ids.begin(), train_ids.end());
        for (const auto& id : eval_ids)
          if (train_set.count(id))
            throw std::logic_error("run_experiment: id '" + id +
                                   "' appears in both train and eval sets");
        if (train_ids.size() + eval_ids.size() != items.size())
          throw std::logic_error("run_experiment: folds do not cover the dataset");

        const FoldJob job{repeat, fold,
                          derive_seed(plan.seed, "job", strategy.name, repeat, fold)};
        const auto predictions = strategy.run(train_ids, eval_ids, job);
        require(predictions.size() == eval_ids.size(), Errc::bad_config,
                "run_experiment: runner returned wrong prediction count");
        int correct = 0;
        for (size_t i = 0; i < eval_ids.size(); ++i)
          if (predictions[i] == truth.at(eval_ids[i])) ++correct;
        report.rows.push_back(
            {repeat, fold, strategy.name, double(correct) / double(eval_ids.size())});
      }
    }
  }
  return report;
}

std::vector<StrategySummary> compare_strategies(const EvalReport& report) {
  std::vector<StrategySummary> out;
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& row : report.rows) {
    acc[row.strategy].first += row.accuracy;
    acc[row.strategy].second += 1;
  }
  for (const auto& [name, sums] : acc)
    out.push_back({name, sums.first / sums.second, sums.second});
  std::sort(out.begin(), out.end(), [](const StrategySummary& a, const StrategySummary& b) {
    if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
    return a.strategy < b.strategy;
  });
  return out;
}

// --------------------------------------------------------------------------
// pipeline
// --------------------------------------------------------------------------

HeadKind default_head(Strategy s) {
  return s == Strategy::FullSequence ? HeadKind::Gru : HeadKind::Softmax;
}

namespace {

struct EmbeddedDataset {
  std::vector<std::string> subjects;                       // sorted class labels
  std::unordered_map<std::string, int> class_of;           // label -> index
  std::unordered_map<std::string, size_t> index_of;        // step_id -> row
  std::vector<EmbeddedStep> steps;
};

EmbeddedDataset embed_dataset(const StepDataset& ds, Strategy strategy,
                              const PipelineConfig& cfg) {
  EmbeddedDataset out;
  const auto embedder = load_embedder(cfg.embedder);
  std::set<std::string> subject_set;
  for (const auto& step : ds.steps) subject_set.insert(step.subject_id);
  out.subjects.assign(subject_set.begin(), subject_set.end());
  for (int i = 0; i < int(out.subjects.size()); ++i) out.class_of[out.subjects[size_t(i)]] = i;

  out.steps.reserve(ds.steps.size());
  for (const auto& step : ds.steps) {
    TransformOutput t = transform_step(step, strategy, cfg.render);
    out.steps.push_back(embed_step(*embedder, t));
    const bool inserted = out.index_of.emplace(step.step_id, out.steps.size() - 1).second;
    require(inserted, Errc::bad_config, "pipeline: duplicate step_id '" + step.step_id + "'");
  }
  return out;
}

std::string model_filename(const std::string& strategy, int repeat, int fold) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_r%02d_f%02d.hed1", repeat, fold);
  return strategy + buf;
}

}  // namespace

EvalReport run_pipeline(const StepDataset& dataset, const PipelineConfig& cfg) {
  require(!dataset.steps.empty(), Errc::bad_config, "pipeline: empty dataset");
  require(dataset.source_sequence.empty() ||
              dataset.source_sequence.size() == dataset.steps.size(),
          Errc::bad_config, "pipeline: source_sequence size mismatch");
  require(cfg.cv.grouping == Grouping::ByStep || !dataset.source_sequence.empty(),
          Errc::bad_config, "pipeline: BySequence grouping needs source sequence ids");
  if (cfg.models_out) std::filesystem::create_directories(*cfg.models_out);

  EvalReport report;

  for (Strategy strategy : cfg.strategies) {
    const std::string name = strategy_name(strategy);
    HeadKind head = default_head(strategy);
    if (auto it = cfg.head_override.find(name); it != cfg.head_override.end()) {
      require(cfg.force_head || it->second == head, Errc::bad_config,
              "pipeline: head override for '" + name +
                  "' breaks the strategy/head pairing (use force to allow)");
      head = it->second;
    }

    const EmbeddedDataset embedded = embed_dataset(dataset, strategy, cfg);

    // CV units: steps, or whole source sequences when grouping by sequence
    std::vector<LabeledId> units;
    std::unordered_map<std::string, std::vector<std::string>> steps_of_unit;
    if (cfg.cv.grouping == Grouping::ByStep) {
      for (const auto& step : dataset.steps) {
        units.push_back({step.step_id, step.subject_id});
        steps_of_unit[step.step_id] = {step.step_id};
      }
    } else {
      std::map<std::string, std::string> unit_class;
      for (size_t i = 0; i < dataset.steps.size(); ++i) {
        const auto& unit = dataset.source_sequence[i];
        unit_class[unit] = dataset.steps[i].subject_id;
        steps_of_unit[unit].push_back(dataset.steps[i].step_id);
      }
      for (const auto& [unit, cls] : unit_class) units.push_back({unit, cls});
    }

    auto expand = [&](const std::vector<std::string>& unit_ids) {
      std::vector<std::string> step_ids;
      for (const auto& unit : unit_ids) {
        const auto& steps = steps_of_unit.at(unit);
        step_ids.insert(step_ids.end(), steps.begin(), steps.end());
      }
      return step_ids;
    };

    StrategyRunner runner;
    runner.name = name;
    runner.run = [&, head, name](const std::vector<std::string>& train_units,
                                 const std::vector<std::string>& eval_units,
                                 const FoldJob& job) -> std::vector<std::string> {
      const auto train_ids = expand(train_units);
      const auto eval_ids = expand(eval_units);
      TrainConfig train_cfg = cfg.train;
      train_cfg.seed = job.seed;

      std::vector<std::string> predictions;
      predictions.reserve(eval_ids.size());
      const int num_classes = int(embedded.subjects.size());

      if (head == HeadKind::Softmax) {
        std::vector<LabeledDescriptor> train_data;
        train_data.reserve(train_ids.size());
        for (const auto& id : train_ids) {
          const auto& es = embedded.steps[embedded.index_of.at(id)];
          train_data.push_back({es.descriptors.front(), embedded.class_of.at(es.label)});
        }
        TrainedSoftmax trained = train_softmax_head(train_data, num_classes, train_cfg);
        for (const auto& id : eval_ids) {
          const auto& es = embedded.steps[embedded.index_of.at(id)];
          predictions.push_back(embedded.subjects[size_t(predict(trained.model,
                                                                 es.descriptors.front()))]);
        }
        if (cfg.models_out)
          save_checkpoint(trained.model, embedded.subjects, train_cfg,
                          *cfg.models_out / model_filename(name, job.repeat, job.fold));
      } else {
        std::vector<LabeledSequence> train_data;
        train_data.reserve(train_ids.size());
        for (const auto& id : train_ids) {
          const auto& es = embedded.steps[embedded.index_of.at(id)];
          train_data.push_back({es.descriptors, embedded.class_of.at(es.label)});
        }
        TrainedGru trained = train_gru_head(train_data, num_classes, train_cfg);
        for (const auto& id : eval_ids) {
          const auto& es = embedded.steps[embedded.index_of.at(id)];
          predictions.push_back(embedded.subjects[size_t(predict(trained.model,
                                                                 es.descriptors))]);
        }
        if (cfg.models_out)
          save_checkpoint(trained.model, embedded.subjects, train_cfg,
                          *cfg.models_out / model_filename(name, job.repeat, job.fold));
      }
      return predictions;
    };

    EvalReport strategy_report = run_experiment(units, cfg.cv, {runner});
    report.rows.insert(report.rows.end(), strategy_report.rows.begin(),
                       strategy_report.rows.end());
  }
  return report;
}

EvalReport run_baseline(const StepDataset& dataset, const CvPlan& plan,
                        const BaselineOptions& opts) {
  require(!dataset.steps.empty(), Errc::bad_config, "baseline: empty dataset");

  std::unordered_map<std::string, WaveletDescriptor> descriptors;
  std::vector<LabeledId> items;
  for (const auto& step : dataset.steps) {
    WaveletDescriptor d = wavelet_descriptor(step);
    items.push_back({step.step_id, step.subject_id});
    const bool inserted = descriptors.emplace(step.step_id, std::move(d)).second;
    require(inserted, Errc::bad_config, "baseline: duplicate step_id");
  }

  StrategyRunner runner;
  runner.name = "wavelet";
  runner.run = [&](const std::vector<std::string>& train_ids,
                   const std::vector<std::string>& eval_ids,
                   const FoldJob& /*job*/) -> std::vector<std::string> {
    std::vector<WaveletDescriptor> train_data;
    train_data.reserve(train_ids.size());
    for (const auto& id : train_ids) train_data.push_back(descriptors.at(id));
    SvmTrainOptions svm_opts;
    svm_opts.c_reg = opts.c_reg;
    SvmModel model = svm_train(train_data, svm_opts);
    std::vector<std::string> predictions;
    predictions.reserve(eval_ids.size());
    for (const auto& id : eval_ids) predictions.push_back(svm_predict(model, descriptors.at(id)));
    return predictions;
  };

  return run_experiment(items, plan, {runner});
}

}  // namespace stepgrid

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stepgrid/embed.hpp"
#include "stepgrid/heads.hpp"
#include "stepgrid/transform.hpp"
#include "stepgrid/types.hpp"

namespace stepgrid {

enum class Grouping { ByStep, BySequence };

struct CvPlan {
  int folds = 10;
  int repeats = 10;
  uint64_t seed = 0;
  Grouping grouping = Grouping::ByStep;
};

struct LabeledId {
  std::string id;
  std::string cls;
};

/// Stratified folds for one repeat: disjoint id sets covering all ids, class
/// proportions per fold within one member of ideal, deterministic from
/// (plan.seed, repeat_index). Throws Errc::class_too_small when a class has
/// fewer members than folds.
std::vector<std::vector<std::string>> make_folds(const std::vector<LabeledId>& labels,
                                                 const CvPlan& plan, int repeat_index);

/// Trains on the out-of-fold ids and returns one predicted class per eval id,
/// in order. The seed is unique per (strategy, repeat, fold).
struct FoldJob {
  int repeat = 0;
  int fold = 0;
  uint64_t seed = 0;
};
using FoldRunner = std::function<std::vector<std::string>(
    const std::vector<std::string>& train_ids, const std::vector<std::string>& eval_ids,
    const FoldJob& job)>;

struct StrategyRunner {
  std::string name;
  FoldRunner run;
};

/// Full repeated-CV protocol: for every repeat and fold, train on the
/// out-of-fold ids and score accuracy on the fold. Train/eval disjointness is
/// asserted for every split; a failed fold aborts the run.
EvalReport run_experiment(const std::vector<LabeledId>& items, const CvPlan& plan,
                          const std::vector<StrategyRunner>& strategies);

struct StrategySummary {
  std::string strategy;
  double mean_accuracy = 0.0;
  int rows = 0;
};

/// Per-strategy means sorted by accuracy descending, ties by name ascending.
std::vector<StrategySummary> compare_strategies(const EvalReport& report);

// ---------------------------------------------------------------------------
// end-to-end pipeline over preprocessed steps
// ---------------------------------------------------------------------------

struct StepDataset {
  std::vector<StepSequence> steps;          // unique step_id each
  std::vector<std::string> source_sequence;  // parallel to steps; for BySequence grouping
};

enum class HeadKind { Softmax, Gru };

struct PipelineConfig {
  std::vector<Strategy> strategies{Strategy::MaxFrame, Strategy::AverageFrame,
                                   Strategy::FullSequence};
  RenderConfig render;
  EmbedderSpec embedder;
  TrainConfig train;
  CvPlan cv;
  /// FullSequence pairs with the GRU head, Max/Average with softmax. Set
  /// force_head to run an explicit off-pairing (e.g. GRU on single frames).
  std::map<std::string, HeadKind> head_override;
  bool force_head = false;
  /// When set, every trained fold model is written here as
  /// <strategy>_r<RR>_f<FF>.hed1.
  std::optional<std::filesystem::path> models_out;
};

HeadKind default_head(Strategy s);

/// Embeds every step once per strategy, then runs the CV protocol with the
/// paired classifier head. Deterministic for a fixed config and dataset.
EvalReport run_pipeline(const StepDataset& dataset, const PipelineConfig& cfg);

/// Baseline protocol: 336-d wavelet descriptor per step, one-vs-one
/// quadratic-kernel SVM, same CV plan; rows carry strategy name "wavelet".
struct BaselineOptions {
  double c_reg = 1.0;
};
EvalReport run_baseline(const StepDataset& dataset, const CvPlan& plan,
                        const BaselineOptions& opts = {});

}  // namespace stepgrid

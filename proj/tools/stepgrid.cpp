// stepgrid command line: synthetic gait data generation, step preprocessing,
// modality transformation, descriptor extraction, head training, repeated
// cross-validation, and the wavelet+SVM baseline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stepgrid/baseline.hpp"
#include "stepgrid/harness.hpp"
#include "stepgrid/io.hpp"
#include "stepgrid/preproc.hpp"
#include "stepgrid/rng.hpp"
#include "stepgrid/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stepgrid;

namespace {

constexpr const char* kManifest = "manifest.jsonl";

// ---------------------------------------------------------------------------
// dataset directory helpers
// ---------------------------------------------------------------------------

void write_sequence_dir(const LabeledDataset& ds, const fs::path& out) {
  fs::create_directories(out);
  std::vector<SequenceEntry> manifest;
  for (const auto& seq : ds.sequences) {
    const std::string file = seq.sequence_id + ".psq";
    save_psq(seq, out / file);
    manifest.push_back({file, seq.subject_id, seq.sequence_id});
  }
  save_manifest(manifest, out / kManifest);
}

StepDataset load_step_dir(const fs::path& dir) {
  const auto entries = load_step_manifest(dir / kManifest);
  require(!entries.empty(), Errc::io_failure, "no steps in manifest: " + dir.string());
  StepDataset ds;
  for (const auto& e : entries) {
    PressureSequence seq = load_psq(dir / e.path);
    StepSequence step;
    step.frames = std::move(seq.frames);
    step.bbox = e.bbox;
    step.subject_id = e.subject_id;
    step.step_id = e.step_id;
    require(step.valid(), Errc::io_failure, "inconsistent step file: " + e.path);
    ds.steps.push_back(std::move(step));
    ds.source_sequence.push_back(e.sequence_id);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// eval config file (JSON mirror of PipelineConfig)
// ---------------------------------------------------------------------------

PipelineConfig parse_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  require(bool(in), Errc::bad_config, "cannot open config: " + path.string());
  json j = json::parse(in, nullptr, false);
  require(!j.is_discarded(), Errc::bad_config, "config is not valid JSON: " + path.string());

  PipelineConfig cfg;
  if (j.contains("strategies")) {
    cfg.strategies.clear();
    for (const auto& s : j.at("strategies")) cfg.strategies.push_back(parse_strategy(s));
  }
  cfg.render.out_size = j.value("size", cfg.render.out_size);

  if (j.contains("embedder")) {
    const auto& e = j.at("embedder");
    const std::string kind = e.value("kind", "mock");
    if (kind == "mock")
      cfg.embedder.kind = EmbedderKind::MockProjection;
    else if (kind == "model")
      cfg.embedder.kind = EmbedderKind::ExternalModel;
    else
      fail(Errc::bad_config, "config: embedder.kind must be mock|model");
    cfg.embedder.model_path = e.value("path", std::string{});
    cfg.embedder.output_dim = e.value("dim", cfg.embedder.output_dim);
    cfg.embedder.seed = e.value("seed", cfg.embedder.seed);
  }
  cfg.embedder.input_size = cfg.render.out_size;

  if (j.contains("train")) {
    const auto& t = j.at("train");
    cfg.train.epochs = t.value("epochs", cfg.train.epochs);
    cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
    cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
    cfg.train.l2 = t.value("l2", cfg.train.l2);
    cfg.train.hidden = t.value("hidden", cfg.train.hidden);
    const std::string opt = t.value("optimizer", "adam");
    require(opt == "adam" || opt == "sgd", Errc::bad_config,
            "config: train.optimizer must be adam|sgd");
    cfg.train.optimizer = opt == "adam" ? OptimizerKind::Adam : OptimizerKind::Sgd;
  }

  if (j.contains("cv")) {
    const auto& c = j.at("cv");
    cfg.cv.folds = c.value("folds", cfg.cv.folds);
    cfg.cv.repeats = c.value("repeats", cfg.cv.repeats);
    cfg.cv.seed = c.value("seed", cfg.cv.seed);
    const std::string grouping = c.value("grouping", "step");
    require(grouping == "step" || grouping == "sequence", Errc::bad_config,
            "config: cv.grouping must be step|sequence");
    cfg.cv.grouping = grouping == "step" ? Grouping::ByStep : Grouping::BySequence;
  }

  if (j.contains("heads")) {
    for (const auto& [strategy, head] : j.at("heads").items()) {
      parse_strategy(strategy);  // validate the key
      require(head == "softmax" || head == "gru", Errc::bad_config,
              "config: heads values must be softmax|gru");
      cfg.head_override[strategy] = head == "gru" ? HeadKind::Gru : HeadKind::Softmax;
    }
  }
  cfg.force_head = j.value("force_head", false);
  return cfg;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_gen(const std::string& out, int subjects, int seqs, int steps, double noise,
            uint64_t seed, bool twins) {
  GenConfig cfg;
  cfg.num_subjects = subjects;
  cfg.sequences_per_subject = seqs;
  cfg.steps_per_sequence = steps;
  cfg.noise_sigma = noise;
  cfg.seed = seed;
  const LabeledDataset ds = twins ? generate_temporal_twin_dataset(cfg) : generate_dataset(cfg);
  write_sequence_dir(ds, out);
  std::cout << "wrote " << ds.sequences.size() << " sequences (" << subjects << " subjects) to "
            << out << "\n";
  return 0;
}

int cmd_preprocess(const std::string& in, const std::string& out, int min_active, int max_gap,
                   int canvas_h, int canvas_w) {
  const fs::path in_dir(in), out_dir(out);
  const auto entries = load_sequence_manifest(in_dir / kManifest);
  require(!entries.empty(), Errc::io_failure, "no sequences in manifest: " + in);
  fs::create_directories(out_dir);

  std::vector<StepEntry> manifest;
  int steps_total = 0;
  for (const auto& e : entries) {
    PressureSequence seq = load_psq(in_dir / e.path);
    seq.subject_id = e.subject_id;
    seq.sequence_id = e.sequence_id;
    const auto extracted = extract_steps(seq, {min_active, max_gap});
    for (size_t k = 0; k < extracted.size(); ++k) {
      StepSequence step = extracted[k].step;
      if (canvas_h > 0 && canvas_w > 0) step = center_normalize(step, canvas_h, canvas_w);
      step.step_id = e.sequence_id + "_s" + std::to_string(k);

      PressureSequence stored;
      stored.frames = step.frames;
      const std::string file = step.step_id + ".psq";
      save_psq(stored, out_dir / file);
      manifest.push_back({file, e.subject_id, step.step_id, e.sequence_id,
                          extracted[k].range.start, extracted[k].range.end, step.bbox});
      ++steps_total;
    }
  }
  require(steps_total > 0, Errc::no_active_pixels, "preprocess: no steps found in dataset");
  save_manifest(manifest, out_dir / kManifest);
  std::cout << "segmented " << steps_total << " steps from " << entries.size()
            << " sequences into " << out << "\n";
  return 0;
}

int cmd_transform(const std::string& in, const std::string& out, const std::string& strategy,
                  int size) {
  const Strategy strat = parse_strategy(strategy);
  const StepDataset ds = load_step_dir(in);
  const fs::path out_dir(out);
  fs::create_directories(out_dir);

  RenderConfig render{size};
  std::vector<ImageEntry> manifest;
  int images_total = 0;
  for (const auto& step : ds.steps) {
    const TransformOutput t = transform_step(step, strat, render);
    ImageEntry entry;
    entry.subject_id = step.subject_id;
    entry.step_id = step.step_id;
    entry.strategy = strategy_name(strat);
    for (size_t i = 0; i < t.images.size(); ++i) {
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_%s_%03zu.pgm", entry.strategy.c_str(), i);
      const std::string file = step.step_id + suffix;
      save_pgm(t.images[i], out_dir / file);
      entry.paths.push_back(file);
      ++images_total;
    }
    manifest.push_back(std::move(entry));
  }
  save_manifest(manifest, out_dir / kManifest);
  std::cout << "rendered " << images_total << " images (" << strategy << ") into " << out << "\n";
  return 0;
}

int cmd_embed(const std::string& in, const std::string& out, const std::string& kind,
              const std::string& model, int dim, uint64_t seed) {
  const fs::path in_dir(in), out_dir(out);
  const auto entries = load_image_manifest(in_dir / kManifest);
  require(!entries.empty(), Errc::io_failure, "no images in manifest: " + in);
  fs::create_directories(out_dir);

  EmbedderSpec spec;
  if (kind == "mock") {
    spec.kind = EmbedderKind::MockProjection;
  } else if (kind == "model") {
    spec.kind = EmbedderKind::ExternalModel;
    spec.model_path = model;
  } else {
    fail(Errc::bad_config, "embedder must be mock|model");
  }
  spec.output_dim = dim;
  spec.seed = seed;
  {
    // the embedder consumes whatever size the transform stage produced
    const GrayImage probe = load_pgm(in_dir / entries.front().paths.front());
    require(probe.width == probe.height, Errc::size_mismatch, "embed: images must be square");
    spec.input_size = probe.width;
  }
  const auto embedder = load_embedder(spec);

  std::vector<DescriptorEntry> manifest;
  for (const auto& e : entries) {
    std::vector<Descriptor> descriptors;
    descriptors.reserve(e.paths.size());
    for (const auto& rel : e.paths)
      descriptors.push_back(embed_image(*embedder, load_pgm(in_dir / rel)));
    const std::string file = e.step_id + "_" + e.strategy + ".dsc1";
    save_dsc1(descriptors, out_dir / file);
    manifest.push_back({file, e.subject_id, e.step_id, e.strategy, int(descriptors.size()),
                        embedder->output_dim()});
  }
  save_manifest(manifest, out_dir / kManifest);
  std::cout << "embedded " << manifest.size() << " steps (dim " << embedder->output_dim()
            << ") into " << out << "\n";
  return 0;
}

int cmd_train(const std::string& in, const std::string& out, const std::string& arch,
              int epochs, int batch, double lr, const std::string& optimizer, double l2,
              int hidden, uint64_t seed) {
  const fs::path in_dir(in);
  const auto entries = load_descriptor_manifest(in_dir / kManifest);
  require(!entries.empty(), Errc::io_failure, "no descriptors in manifest: " + in);

  std::map<std::string, int> class_of;
  for (const auto& e : entries) class_of.emplace(e.subject_id, 0);
  std::vector<std::string> labels;
  for (auto& [label, idx] : class_of) {
    idx = int(labels.size());
    labels.push_back(label);
  }

  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.batch_size = batch;
  cfg.learning_rate = lr;
  cfg.optimizer = optimizer == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
  cfg.l2 = l2;
  cfg.hidden = hidden;
  cfg.seed = seed;

  if (arch == "softmax") {
    std::vector<LabeledDescriptor> data;
    for (const auto& e : entries) {
      auto d = load_dsc1(in_dir / e.path);
      require(d.size() == 1, Errc::bad_config,
              "train softmax: step '" + e.step_id +
                  "' has several descriptors; use max/avg descriptors or --arch gru");
      data.push_back({std::move(d.front()), class_of.at(e.subject_id)});
    }
    TrainedSoftmax trained = train_softmax_head(data, int(labels.size()), cfg);
    save_checkpoint(trained.model, labels, cfg, out);
    std::cout << "softmax head trained on " << data.size() << " descriptors; final loss "
              << (trained.curve.epoch_loss.empty() ? 0.0 : trained.curve.epoch_loss.back())
              << "; saved to " << out << "\n";
  } else if (arch == "gru") {
    std::vector<LabeledSequence> data;
    for (const auto& e : entries) {
      data.push_back({load_dsc1(in_dir / e.path), class_of.at(e.subject_id)});
    }
    TrainedGru trained = train_gru_head(data, int(labels.size()), cfg);
    save_checkpoint(trained.model, labels, cfg, out);
    std::cout << "gru head trained on " << data.size() << " sequences; final loss "
              << (trained.curve.epoch_loss.empty() ? 0.0 : trained.curve.epoch_loss.back())
              << "; saved to " << out << "\n";
  } else {
    fail(Errc::bad_config, "arch must be softmax|gru");
  }
  return 0;
}

int cmd_eval(const std::string& in, const std::string& config, const std::string& out,
             const std::string& models_out, int64_t seed_override) {
  PipelineConfig cfg = parse_pipeline_config(config);
  if (seed_override >= 0) cfg.cv.seed = uint64_t(seed_override);
  if (!models_out.empty()) cfg.models_out = fs::path(models_out);
  const StepDataset ds = load_step_dir(in);
  const EvalReport report = run_pipeline(ds, cfg);
  save_report_csv(report, out);
  std::cout << "evaluated " << ds.steps.size() << " steps\n";
  for (const auto& s : compare_strategies(report))
    std::printf("  %-8s mean accuracy %.4f over %d folds\n", s.strategy.c_str(),
                s.mean_accuracy, s.rows);
  std::cout << "report written to " << out << "\n";
  return 0;
}

int cmd_baseline(const std::string& in, const std::string& out, int folds, int repeats,
                 uint64_t seed, double c_reg) {
  CvPlan plan;
  plan.folds = folds;
  plan.repeats = repeats;
  plan.seed = seed;
  const StepDataset ds = load_step_dir(in);
  const EvalReport report = run_baseline(ds, plan, {c_reg});
  save_report_csv(report, out);
  const auto summary = compare_strategies(report);
  std::printf("wavelet+SVM baseline: mean accuracy %.4f over %d folds\n",
              summary.front().mean_accuracy, summary.front().rows);
  std::cout << "report written to " << out << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, bool reference) {
  EvalReport merged;
  for (const auto& path : inputs) {
    const EvalReport r = load_report_csv(path);
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  }
  const auto summary = compare_strategies(merged);
  std::printf("%-10s %-14s %s\n", "strategy", "mean accuracy", "rows");
  for (const auto& s : summary)
    std::printf("%-10s %-14.6f %d\n", s.strategy.c_str(), s.mean_accuracy, s.rows);
  if (reference) {
    std::printf("\nreference results on the original 13-person recordings"
                " (not reproducible without that private dataset):\n");
    std::printf("%-10s %-14s\n", "wavelet", "0.769");
    std::printf("%-10s %-14s\n", "max", "0.7199");
    std::printf("%-10s %-14s\n", "avg", "0.7841");
    std::printf("%-10s %-14s\n", "seq", "0.8766");
  }
  return 0;
}

int cmd_render(const std::string& in, const std::string& out) {
  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  const PressureSequence seq = load_psq(in);
  double vmax = 0.0;
  for (const auto& f : seq.frames)
    for (float v : f.values) vmax = std::max(vmax, double(v));
  require(vmax > 0.0, Errc::bad_range, "render: sequence is all zero");
  const std::string stem = fs::path(in).stem().string();
  for (size_t t = 0; t < seq.frames.size(); ++t) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_f%04zu.pgm", t);
    save_pgm(render_gray(seq.frames[t], 0.0, vmax), out_dir / (stem + suffix));
  }
  std::cout << "rendered " << seq.frames.size() << " frames to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pressure-mat footstep identification pipeline"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic labeled dataset");
  std::string gen_out = "data/raw";
  int gen_subjects = 13, gen_seqs = 12, gen_steps = 3;
  double gen_noise = 0.02;
  uint64_t gen_seed = 0;
  bool gen_twins = false;
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_option("--subjects", gen_subjects)->capture_default_str();
  gen->add_option("--seqs", gen_seqs, "sequences per subject")->capture_default_str();
  gen->add_option("--steps", gen_steps, "steps per sequence")
      ->check(CLI::Range(2, 3))
      ->capture_default_str();
  gen->add_option("--noise", gen_noise, "noise sigma")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_flag("--twins", gen_twins, "paired subjects with time-reversed rolls");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "segment sequences into cropped steps");
  std::string pre_in = "data/raw", pre_out = "data/steps";
  int pre_min_active = SegmentParams{}.min_active_pixels;
  int pre_max_gap = SegmentParams{}.max_gap_frames;
  std::vector<int> pre_canvas;
  pre->add_option("--in", pre_in)->capture_default_str();
  pre->add_option("--out", pre_out)->capture_default_str();
  pre->add_option("--min-active", pre_min_active, "active pixels per active frame")
      ->capture_default_str();
  pre->add_option("--max-gap", pre_max_gap, "inactive frames bridged inside a step")
      ->capture_default_str();
  pre->add_option("--center-canvas", pre_canvas,
                  "H W: paste steps centered on a fixed canvas instead of the tight crop")
      ->expected(2);

  // transform
  auto* tra = app.add_subcommand("transform", "render steps to grayscale imagery");
  std::string tra_in = "data/steps", tra_out = "data/images", tra_strategy = "max";
  int tra_size = 299;
  tra->add_option("--in", tra_in)->capture_default_str();
  tra->add_option("--out", tra_out)->capture_default_str();
  tra->add_option("--strategy", tra_strategy, "max|avg|seq")->capture_default_str();
  tra->add_option("--size", tra_size, "square resize target")->capture_default_str();

  // embed
  auto* emb = app.add_subcommand("embed", "extract descriptors from step imagery");
  std::string emb_in = "data/images", emb_out = "data/descriptors", emb_kind = "mock";
  std::string emb_model;
  int emb_dim = 2048;
  uint64_t emb_seed = 0;
  emb->add_option("--in", emb_in)->capture_default_str();
  emb->add_option("--out", emb_out)->capture_default_str();
  emb->add_option("--embedder", emb_kind, "mock|model")->capture_default_str();
  emb->add_option("--model", emb_model, "model file for --embedder model");
  emb->add_option("--dim", emb_dim, "mock output dimension")->capture_default_str();
  emb->add_option("--seed", emb_seed, "mock projection seed")->capture_default_str();

  // train
  auto* trn = app.add_subcommand("train", "train a classification head on descriptors");
  std::string trn_in = "data/descriptors", trn_out = "model.hed1", trn_arch = "softmax";
  std::string trn_opt = "adam";
  int trn_epochs = 100, trn_batch = 16, trn_hidden = 128;
  double trn_lr = 1e-3, trn_l2 = 0.0;
  uint64_t trn_seed = 0;
  trn->add_option("--in", trn_in)->capture_default_str();
  trn->add_option("--out", trn_out)->capture_default_str();
  trn->add_option("--arch", trn_arch, "softmax|gru")->capture_default_str();
  trn->add_option("--epochs", trn_epochs)->capture_default_str();
  trn->add_option("--batch", trn_batch)->capture_default_str();
  trn->add_option("--lr", trn_lr)->capture_default_str();
  trn->add_option("--optimizer", trn_opt, "adam|sgd")->capture_default_str();
  trn->add_option("--l2", trn_l2)->capture_default_str();
  trn->add_option("--hidden", trn_hidden, "GRU hidden size")->capture_default_str();
  trn->add_option("--seed", trn_seed)->capture_default_str();

  // eval
  auto* evl = app.add_subcommand("eval", "repeated cross-validation over strategies");
  std::string evl_in = "data/steps", evl_config, evl_out = "report.csv", evl_models;
  int64_t evl_seed = -1;
  evl->add_option("--in", evl_in, "steps directory")->capture_default_str();
  evl->add_option("--config", evl_config, "pipeline config JSON")->required();
  evl->add_option("--out", evl_out, "report CSV path")->capture_default_str();
  evl->add_option("--models-out", evl_models, "directory for per-fold checkpoints");
  evl->add_option("--seed", evl_seed, "override cv seed from the config");

  // baseline
  auto* bas = app.add_subcommand("baseline", "wavelet descriptor + quadratic SVM baseline");
  std::string bas_in = "data/steps", bas_out = "baseline.csv";
  int bas_folds = 10, bas_repeats = 10;
  uint64_t bas_seed = 0;
  double bas_c = 1.0;
  bas->add_option("--in", bas_in)->capture_default_str();
  bas->add_option("--out", bas_out)->capture_default_str();
  bas->add_option("--folds", bas_folds)->capture_default_str();
  bas->add_option("--repeats", bas_repeats)->capture_default_str();
  bas->add_option("--seed", bas_seed)->capture_default_str();
  bas->add_option("--c", bas_c, "soft-margin C")->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "summarize one or more report CSVs");
  std::vector<std::string> rep_in;
  bool rep_reference = false;
  rep->add_option("--in", rep_in, "report CSV files")->required()->expected(-1);
  rep->add_flag("--reference", rep_reference, "include the published reference accuracies");

  // render
  auto* ren = app.add_subcommand("render", "render a PSQ file to PGM frames for inspection");
  std::string ren_in, ren_out = "render";
  ren->add_option("--in", ren_in, "PSQ file")->required();
  ren->add_option("--out", ren_out)->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*gen) return cmd_gen(gen_out, gen_subjects, gen_seqs, gen_steps, gen_noise, gen_seed,
                             gen_twins);
    if (*pre)
      return cmd_preprocess(pre_in, pre_out, pre_min_active, pre_max_gap,
                            pre_canvas.size() == 2 ? pre_canvas[0] : 0,
                            pre_canvas.size() == 2 ? pre_canvas[1] : 0);
    if (*tra) return cmd_transform(tra_in, tra_out, tra_strategy, tra_size);
    if (*emb) return cmd_embed(emb_in, emb_out, emb_kind, emb_model, emb_dim, emb_seed);
    if (*trn)
      return cmd_train(trn_in, trn_out, trn_arch, trn_epochs, trn_batch, trn_lr, trn_opt,
                       trn_l2, trn_hidden, trn_seed);
    if (*evl) return cmd_eval(evl_in, evl_config, evl_out, evl_models, evl_seed);
    if (*bas) return cmd_baseline(bas_in, bas_out, bas_folds, bas_repeats, bas_seed, bas_c);
    if (*rep) return cmd_report(rep_in, rep_reference);
    if (*ren) return cmd_render(ren_in, ren_out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

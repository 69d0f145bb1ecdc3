// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria. argv[1] must point at the stepgrid CLI binary
// (used by the determinism criterion).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stepgrid/baseline.hpp"
#include "stepgrid/harness.hpp"
#include "stepgrid/io.hpp"
#include "stepgrid/preproc.hpp"
#include "stepgrid/synth.hpp"

using namespace stepgrid;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

StepDataset segment_dataset(const LabeledDataset& ds) {
  StepDataset steps;
  for (const auto& seq : ds.sequences) {
    const auto extracted = extract_steps(seq);
    for (size_t k = 0; k < extracted.size(); ++k) {
      StepSequence step = extracted[k].step;
      step.step_id = seq.sequence_id + "_s" + std::to_string(k);
      steps.steps.push_back(std::move(step));
      steps.source_sequence.push_back(seq.sequence_id);
    }
  }
  return steps;
}

// ---------------------------------------------------------------------------
// 1. oracle equivalence on >= 10000 random inputs per operation
// ---------------------------------------------------------------------------

Check criterion_oracles() {
  Check c;
  Rng rng(20260809);

  int threshold_checked = 0;
  for (int it = 0; it < 10000; ++it) {
    PressureFrame f(2 + int(rng.below(6)), 2 + int(rng.below(6)));
    for (auto& v : f.values)
      v = rng.coin() ? float(rng.uniform(0.0, 2.0)) : float(rng.below(4)) * 0.5f;
    const auto want = oracle::threshold(f);
    if (want.degenerate) {
      try {
        adaptive_threshold(f);
        c.expect(false, "degenerate frame not flagged");
      } catch (const Error&) {
      }
      continue;
    }
    const auto got = adaptive_threshold(f);
    c.expect(got.threshold == want.threshold, "threshold mismatch");
    for (int b = 0; b < 10; ++b)
      c.expect(got.histogram[size_t(b)] == want.counts[size_t(b)], "histogram mismatch");
    ++threshold_checked;
  }
  c.expect(threshold_checked > 9000, "too few non-degenerate threshold cases");

  for (int it = 0; it < 10000; ++it) {
    const auto step = oracle::random_step(rng, 1 + int(rng.below(24)), 3, 4);
    c.expect(select_max_frame(step) == oracle::argmax_frame(step), "argmax mismatch");
  }

  for (int it = 0; it < 10000; ++it) {
    const int frames = 1 + int(rng.below(4));
    PressureSequence seq;
    for (int t = 0; t < frames; ++t) {
      PressureFrame f(3 + int(rng.below(7)), 3 + int(rng.below(7)));
      for (auto& v : f.values)
        if (rng.below(4) == 0) v = float(rng.uniform(0.3, 1.0));
      seq.frames.push_back(std::move(f));
    }
    BoundingBox want;
    const FrameRange range{0, frames};
    if (!oracle::bbox(seq, range, 0.2, want)) {
      try {
        step_bounding_box(seq, range, 0.2);
        c.expect(false, "missing no-active-pixels");
      } catch (const Error&) {
      }
      continue;
    }
    c.expect(step_bounding_box(seq, range, 0.2) == want, "bbox mismatch");
  }

  for (int it = 0; it < 10000; ++it) {
    const int n = 1 + int(rng.below(24));
    PressureSequence seq;
    for (int t = 0; t < n; ++t) {
      PressureFrame f(6, 6);
      if (rng.coin())
        for (int r = 1; r < 4; ++r)
          for (int cc = 1; cc < 4; ++cc) f.at(r, cc) = 1.0f;
      seq.frames.push_back(std::move(f));
    }
    const int max_gap = int(rng.below(4));
    c.expect(segment_steps(seq, 5, max_gap) == oracle::segment(seq, 5, max_gap),
             "segmentation mismatch");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 2. numerical kernels: Haar, gradients, SVM KKT
// ---------------------------------------------------------------------------

Check criterion_kernels() {
  Check c;
  Rng rng(42);

  for (int it = 0; it < 200; ++it) {
    const size_t n = size_t(1) << (1 + rng.below(7));
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-5, 5);
    const auto y = haar_fwt_1d(x);
    double nx = 0, ny = 0;
    for (size_t i = 0; i < n; ++i) {
      nx += x[i] * x[i];
      ny += y[i] * y[i];
    }
    c.expect(std::abs(nx - ny) < 1e-9, "Parseval violated");
    const auto back = haar_ifwt_1d(y);
    for (size_t i = 0; i < n; ++i)
      c.expect(std::abs(back[i] - x[i]) < 1e-9, "reconstruction drift");
  }

  for (int it = 0; it < 10; ++it) {
    const int C = 2 + int(rng.below(8)), D = 1 + int(rng.below(16));
    SoftmaxHead head = init_softmax(C, D, rng.next_u64());
    Descriptor d;
    for (int i = 0; i < D; ++i) d.values.push_back(float(rng.uniform(-1, 1)));
    c.expect(grad_check(head, d, int(rng.below(uint64_t(C)))) < 1e-6,
             "softmax gradient above 1e-6");
  }

  for (int it = 0; it < 3; ++it) {
    GruClassifier g = GruClassifier::zeros(8, 16, 3);
    for (Eigen::Index i = 0; i < g.theta.size(); ++i) g.theta[i] = rng.uniform(-0.6, 0.6);
    std::vector<Descriptor> seq(5);
    for (auto& d : seq)
      for (int i = 0; i < 16; ++i) d.values.push_back(float(rng.uniform(-1, 1)));
    c.expect(grad_check(g, seq, int(rng.below(3))) < 1e-4, "gru gradient above 1e-4");
  }

  std::vector<WaveletDescriptor> blobs;
  const char* names[] = {"a", "b", "c", "d"};
  for (int cls = 0; cls < 4; ++cls)
    for (int i = 0; i < 10; ++i) {
      WaveletDescriptor d;
      d.label = names[cls];
      for (int k = 0; k < 4; ++k) d.values.push_back(rng.uniform(-0.3, 0.3));
      d.values[size_t(cls)] += 1.5;
      blobs.push_back(std::move(d));
    }
  const auto svm = svm_train(blobs, {1.0, 1e-3, 2000000});
  c.expect(svm_kkt_residual(svm, blobs) <= 1e-3, "SVM KKT residual above 1e-3");
  return c;
}

// ---------------------------------------------------------------------------
// 3. temporal-information property on zero-noise twins
// ---------------------------------------------------------------------------

Check criterion_twins() {
  Check c;
  GenConfig gen;
  gen.num_subjects = 8;  // 4 pairs
  gen.sequences_per_subject = 12;
  gen.steps_per_sequence = 2;
  gen.noise_sigma = 0.0;
  gen.seed = 20170101;
  const StepDataset steps = segment_dataset(generate_temporal_twin_dataset(gen));
  c.expect(steps.steps.size() >= 150, "twin segmentation lost steps");

  PipelineConfig cfg;
  cfg.render.out_size = 32;
  cfg.embedder.output_dim = 32;
  cfg.embedder.seed = 7;
  cfg.embedder.input_size = 32;
  cfg.train.epochs = 60;
  cfg.train.batch_size = 16;
  cfg.train.learning_rate = 1e-3;
  cfg.train.hidden = 24;
  cfg.cv.folds = 10;
  cfg.cv.repeats = 1;
  cfg.cv.seed = 1;

  cfg.strategies = {Strategy::FullSequence};
  const double gru_acc = run_pipeline(steps, cfg).strategy_means().at("seq");
  cfg.strategies = {Strategy::AverageFrame};
  const double avg_acc = run_pipeline(steps, cfg).strategy_means().at("avg");

  std::ostringstream detail;
  detail << "gru-on-seq " << gru_acc << " (need >= 0.90), softmax-on-avg " << avg_acc
         << " (need <= 0.60)";
  c.detail = detail.str();
  c.pass = gru_acc >= 0.90 && avg_acc <= 0.60;
  return c;
}

// ---------------------------------------------------------------------------
// 4. separable-dataset sanity on the default synthetic dataset
// ---------------------------------------------------------------------------

Check criterion_separable() {
  Check c;
  GenConfig gen;  // defaults: 13 subjects, 12 sequences, moderate noise
  gen.seed = 4;
  const StepDataset steps = segment_dataset(generate_dataset(gen));
  c.expect(steps.steps.size() >= 400, "segmentation lost steps");

  PipelineConfig cfg;
  cfg.render.out_size = 32;
  cfg.embedder.output_dim = 32;
  cfg.embedder.seed = 7;
  cfg.embedder.input_size = 32;
  cfg.train.epochs = 40;
  cfg.train.batch_size = 16;
  cfg.train.learning_rate = 1e-3;
  cfg.train.hidden = 24;
  cfg.cv.folds = 10;
  cfg.cv.repeats = 2;
  cfg.cv.seed = 2;

  const auto means = run_pipeline(steps, cfg).strategy_means();
  const double chance5 = 5.0 / 13.0;
  std::ostringstream detail;
  detail << "max " << means.at("max") << ", avg " << means.at("avg") << ", seq "
         << means.at("seq") << " (all need > " << chance5 << "; seq >= avg - 0.02)";
  c.detail = detail.str();
  c.pass = means.at("max") > chance5 && means.at("avg") > chance5 &&
           means.at("seq") > chance5 && means.at("seq") >= means.at("avg") - 0.02;
  return c;
}

// ---------------------------------------------------------------------------
// 5. CLI determinism: byte-identical reports and checkpoints
// ---------------------------------------------------------------------------

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check criterion_determinism(const std::string& cli) {
  Check c;
  const fs::path root = fs::temp_directory_path() / "stepgrid_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  c.expect(run("gen --subjects 4 --seqs 4 --steps 2 --noise 0.02 --seed 5 --out " +
               (root / "raw").string()),
           "gen failed");
  c.expect(run("preprocess --in " + (root / "raw").string() + " --out " +
               (root / "steps").string()),
           "preprocess failed");

  std::ofstream(root / "cfg.json")
      << R"({"strategies": ["max", "avg", "seq"], "size": 32,)"
      << R"( "embedder": {"kind": "mock", "dim": 24, "seed": 7},)"
      << R"( "train": {"epochs": 12, "batch_size": 8, "hidden": 12},)"
      << R"( "cv": {"folds": 4, "repeats": 2, "seed": 11}})";

  for (int run_idx = 1; run_idx <= 2; ++run_idx) {
    const std::string tag = std::to_string(run_idx);
    c.expect(run("eval --in " + (root / "steps").string() + " --config " +
                 (root / "cfg.json").string() + " --out " + (root / ("r" + tag + ".csv")).string() +
                 " --models-out " + (root / ("m" + tag)).string()),
             "eval run " + tag + " failed");
  }

  c.expect(read_file(root / "r1.csv") == read_file(root / "r2.csv"),
           "report CSVs differ between runs");
  const auto csv = read_file(root / "r1.csv");
  c.expect(csv.rfind("repeat,fold,strategy,accuracy\n", 0) == 0, "report header wrong");

  int models = 0;
  for (const auto& entry : fs::directory_iterator(root / "m1")) {
    const auto other = root / "m2" / entry.path().filename();
    c.expect(fs::exists(other), "missing checkpoint in second run");
    if (fs::exists(other))
      c.expect(read_file(entry.path()) == read_file(other),
               "checkpoint bytes differ: " + entry.path().filename().string());
    ++models;
  }
  c.expect(models == 3 * 4 * 2, "unexpected checkpoint count");
  fs::remove_all(root);
  return c;
}

// ---------------------------------------------------------------------------
// 6. format fidelity on 1000 random artifacts
// ---------------------------------------------------------------------------

Check criterion_formats() {
  Check c;
  Rng rng(66);
  const fs::path dir = fs::temp_directory_path() / "stepgrid_acceptance_fmt";
  fs::create_directories(dir);

  for (int it = 0; it < 1000; ++it) {
    const auto seq = oracle::random_sequence(rng, 1 + int(rng.below(5)), 2 + int(rng.below(8)),
                                             2 + int(rng.below(8)));
    std::stringstream buf;
    write_psq(seq, buf);
    const auto back = read_psq(buf);
    bool same = back.num_frames() == seq.num_frames();
    for (size_t t = 0; same && t < seq.num_frames(); ++t)
      same = back.frames[t].values == seq.frames[t].values;
    c.expect(same, "psq round-trip failed");
  }

  for (int it = 0; it < 1000; ++it) {
    const auto img = oracle::random_image(rng, 1 + int(rng.below(48)), 1 + int(rng.below(48)));
    const auto path = dir / "probe.pgm";
    save_pgm(img, path);
    GrayImage via_reference;
    c.expect(oracle::read_pgm_file(path, via_reference), "reference PGM reader rejected output");
    c.expect(via_reference == img, "pgm round-trip failed");
  }
  fs::remove_all(dir);
  return c;
}

// ---------------------------------------------------------------------------
// 7. protocol integrity over 100 random fold plans
// ---------------------------------------------------------------------------

Check criterion_protocol() {
  Check c;
  Rng rng(77);
  for (int it = 0; it < 100; ++it) {
    const int folds = 2 + int(rng.below(9));
    const int classes = 2 + int(rng.below(5));
    std::vector<LabeledId> labels;
    for (int cls = 0; cls < classes; ++cls) {
      const int members = folds + int(rng.below(30));
      for (int i = 0; i < members; ++i)
        labels.push_back({"c" + std::to_string(cls) + "_" + std::to_string(i),
                          "c" + std::to_string(cls)});
    }
    CvPlan plan;
    plan.folds = folds;
    plan.repeats = 1 + int(rng.below(3));
    plan.seed = rng.next_u64();

    for (int repeat = 0; repeat < plan.repeats; ++repeat) {
      const auto fold_sets = make_folds(labels, plan, repeat);
      std::set<std::string> seen;
      size_t total = 0;
      for (const auto& fold : fold_sets) {
        total += fold.size();
        for (const auto& id : fold) c.expect(seen.insert(id).second, "folds overlap");
      }
      c.expect(total == labels.size(), "folds do not cover");
    }

    // the leakage assertion inside run_experiment must hold for every plan
    std::map<std::string, std::string> truth;
    for (const auto& item : labels) truth[item.id] = item.cls;
    StrategyRunner oracle_runner{
        "oracle", [&](const std::vector<std::string>& train_ids,
                      const std::vector<std::string>& eval_ids, const FoldJob&) {
          std::set<std::string> train(train_ids.begin(), train_ids.end());
          std::vector<std::string> out;
          for (const auto& id : eval_ids) {
            if (train.count(id)) return std::vector<std::string>{};  // would be leakage
            out.push_back(truth.at(id));
          }
          return out;
        }};
    try {
      const auto report = run_experiment(labels, plan, {oracle_runner});
      for (const auto& row : report.rows) c.expect(row.accuracy == 1.0, "oracle row not 1.0");
    } catch (const std::exception& e) {
      c.expect(false, std::string("protocol run failed: ") + e.what());
    }
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-stepgrid-cli>\n";
    return 127;
  }
  const std::string cli = argv[1];

  struct Entry {
    int id;
    std::string name;
    Check (*fn)();
  };

  int failures = 0;
  auto report = [&](int id, const std::string& name, const Check& c, double seconds) {
    std::printf("%s  criterion %d: %-28s (%.1fs)%s%s\n", c.pass ? "PASS" : "FAIL", id,
                name.c_str(), seconds, c.detail.empty() ? "" : " -- ", c.detail.c_str());
    std::fflush(stdout);
    if (!c.pass) ++failures;
  };

  auto timed = [&](int id, const std::string& name, auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(id, name, c, seconds);
  };

  timed(1, "oracle equivalence", [] { return criterion_oracles(); });
  timed(2, "numerical kernels", [] { return criterion_kernels(); });
  timed(3, "temporal information", [] { return criterion_twins(); });
  timed(4, "separable-dataset sanity", [] { return criterion_separable(); });
  timed(5, "determinism", [&] { return criterion_determinism(cli); });
  timed(6, "format fidelity", [] { return criterion_formats(); });
  timed(7, "protocol integrity", [] { return criterion_protocol(); });

  if (failures == 0)
    std::printf("all 7 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}

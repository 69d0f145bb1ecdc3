#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <set>

#include "oracles.hpp"
#include "stepgrid/preproc.hpp"
#include "stepgrid/synth.hpp"

using namespace stepgrid;

namespace {

// maximal runs of frames with any nonzero pixel; valid as a burst counter
// only at zero noise
std::vector<FrameRange> nonzero_bursts(const PressureSequence& seq) {
  std::vector<FrameRange> out;
  int start = -1;
  for (int t = 0; t < int(seq.num_frames()); ++t) {
    bool any = false;
    for (float v : seq.frames[size_t(t)].values) any = any || v != 0.0f;
    if (any && start < 0) start = t;
    if (!any && start >= 0) {
      out.push_back({start, t});
      start = -1;
    }
  }
  if (start >= 0) out.push_back({start, int(seq.num_frames())});
  return out;
}

bool sequences_equal(const PressureSequence& a, const PressureSequence& b) {
  if (a.num_frames() != b.num_frames()) return false;
  for (size_t t = 0; t < a.num_frames(); ++t)
    if (std::memcmp(a.frames[t].values.data(), b.frames[t].values.data(),
                    a.frames[t].values.size() * sizeof(float)) != 0)
      return false;
  return true;
}

}  // namespace

TEST_CASE("sample_profiles: count, determinism, distinctness") {
  GenConfig cfg;
  cfg.num_subjects = 13;
  const auto a = sample_profiles(cfg);
  const auto b = sample_profiles(cfg);
  REQUIRE(a.size() == 13);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].foot_length_px == b[i].foot_length_px);
    CHECK(a[i].foot_width_px == b[i].foot_width_px);
    CHECK(a[i].roll_duration_frames == b[i].roll_duration_frames);
    CHECK(a[i].roll_skew == b[i].roll_skew);
    CHECK(a[i].peak_pressure == b[i].peak_pressure);
  }
}

TEST_CASE("sample_profiles: no duplicate pair across 1000 seeds") {
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    const auto profiles = sample_profiles(cfg);
    for (size_t i = 0; i < profiles.size(); ++i)
      for (size_t j = i + 1; j < profiles.size(); ++j) {
        const bool same_dims = profiles[i].foot_length_px == profiles[j].foot_length_px &&
                               profiles[i].foot_width_px == profiles[j].foot_width_px;
        const bool same_roll =
            profiles[i].roll_duration_frames == profiles[j].roll_duration_frames;
        const bool same_skew = profiles[i].roll_skew == profiles[j].roll_skew;
        CHECK_FALSE((same_dims && same_roll && same_skew));
      }
  }
}

TEST_CASE("generate_sequence: deterministic from (profile, cfg, seed)") {
  GenConfig cfg;
  cfg.noise_sigma = 0.05;
  SubjectProfile p = sample_profiles(cfg).front();
  p.noise_sigma = 0.05;
  const auto a = generate_sequence(p, cfg, 99);
  const auto b = generate_sequence(p, cfg, 99);
  CHECK(sequences_equal(a, b));
  const auto c = generate_sequence(p, cfg, 100);
  CHECK_FALSE(sequences_equal(a, c));
}

TEST_CASE("generate_sequence: noise-free single step peaks exactly at peak_pressure") {
  GenConfig cfg;
  cfg.steps_per_sequence = 1;
  SubjectProfile p;
  p.peak_pressure = 1.0;
  p.noise_sigma = 0.0;
  const auto seq = generate_sequence(p, cfg, 7);
  float mx = 0.0f;
  for (const auto& f : seq.frames)
    for (float v : f.values) mx = std::max(mx, v);
  CHECK(std::abs(double(mx) - 1.0) < 1e-9);
}

TEST_CASE("generate_sequence: background frames are exactly zero at zero noise") {
  GenConfig cfg;
  SubjectProfile p;
  p.noise_sigma = 0.0;
  const auto gen = generate_clean_sequence(p, cfg, 21);
  std::set<int> burst_frames;
  for (const auto& b : gen.bursts)
    for (int t = b.start; t < b.end; ++t) burst_frames.insert(t);
  int zero_frames = 0;
  for (int t = 0; t < int(gen.seq.num_frames()); ++t) {
    if (burst_frames.count(t)) continue;
    for (float v : gen.seq.frames[size_t(t)].values) CHECK(v == 0.0f);
    ++zero_frames;
  }
  CHECK(zero_frames >= 3 * (int(gen.bursts.size()) + 1));
}

TEST_CASE("generate_sequence: burst structure matches the oracle counter") {
  GenConfig cfg;
  cfg.steps_per_sequence = 3;
  SubjectProfile p;
  p.roll_duration_frames = 11;
  p.noise_sigma = 0.0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto gen = generate_clean_sequence(p, cfg, seed);
    const auto bursts = nonzero_bursts(gen.seq);
    REQUIRE(bursts.size() == 3);
    int covered = 0;
    for (const auto& b : bursts) {
      CHECK(b.length() == 11);
      covered += b.length();
    }
    CHECK(gen.bursts == bursts);
    CHECK(int(gen.seq.num_frames()) == covered + (int(gen.seq.num_frames()) - covered));
    // bursts separated by at least 3 background frames
    for (size_t k = 1; k < bursts.size(); ++k)
      CHECK(bursts[k].start - bursts[k - 1].end >= 3);
  }
}

TEST_CASE("generate_sequence: placement outside the grid is rejected") {
  GenConfig cfg;
  SubjectProfile p;
  p.stance_row = 200;
  try {
    generate_sequence(p, cfg, 1);
    FAIL("expected foot-does-not-fit");
  } catch (const Error& e) {
    CHECK(e.errc() == Errc::foot_does_not_fit);
  }
}

TEST_CASE("twin dataset: pair sequences share frames, reversed within bursts") {
  GenConfig cfg;
  cfg.num_subjects = 4;
  cfg.sequences_per_subject = 3;
  cfg.steps_per_sequence = 2;
  cfg.noise_sigma = 0.0;
  cfg.seed = 5;
  const auto ds = generate_temporal_twin_dataset(cfg);
  REQUIRE(ds.sequences.size() == 4 * 3);

  for (size_t i = 0; i + 1 < ds.sequences.size(); i += 2) {
    const auto& a = ds.sequences[i];
    const auto& b = ds.sequences[i + 1];
    REQUIRE(a.num_frames() == b.num_frames());
    CHECK(a.subject_id.back() == 'a');
    CHECK(b.subject_id.back() == 'b');

    // the sequences differ somewhere...
    CHECK_FALSE(sequences_equal(a, b));
    // ...but frame multisets per burst are identical: reversing b recovers a
    const auto bursts = nonzero_bursts(a);
    PressureSequence rebuilt = b;
    for (const auto& burst : bursts)
      std::reverse(rebuilt.frames.begin() + burst.start, rebuilt.frames.begin() + burst.end);
    CHECK(sequences_equal(rebuilt, a));
  }
}

TEST_CASE("twin dataset: per-step averages identical, frame-wise L1 positive at zero noise") {
  GenConfig cfg;
  cfg.num_subjects = 2;
  cfg.sequences_per_subject = 2;
  cfg.steps_per_sequence = 2;
  cfg.noise_sigma = 0.0;
  cfg.seed = 77;
  const auto ds = generate_temporal_twin_dataset(cfg);

  for (size_t i = 0; i + 1 < ds.sequences.size(); i += 2) {
    const auto steps_a = extract_steps(ds.sequences[i]);
    const auto steps_b = extract_steps(ds.sequences[i + 1]);
    REQUIRE(!steps_a.empty());
    REQUIRE(steps_a.size() == steps_b.size());
    for (size_t k = 0; k < steps_a.size(); ++k) {
      const auto& fa = steps_a[k].step.frames;
      const auto& fb = steps_b[k].step.frames;
      REQUIRE(fa.size() == fb.size());

      // double-precision averages are bitwise equal thanks to grid quantization
      const size_t px = fa.front().values.size();
      for (size_t p = 0; p < px; ++p) {
        double sa = 0.0, sb = 0.0;
        for (size_t t = 0; t < fa.size(); ++t) {
          sa += double(fa[t].values[p]);
          sb += double(fb[t].values[p]);
        }
        CHECK(sa == sb);
      }

      // the temporal sequences genuinely differ
      double l1 = 0.0;
      for (size_t t = 0; t < fa.size(); ++t)
        for (size_t p = 0; p < px; ++p)
          l1 += std::abs(double(fa[t].values[p]) - double(fb[t].values[p]));
      CHECK(l1 > 0.0);
    }
  }
}

TEST_CASE("generated sequences satisfy the domain invariants") {
  GenConfig cfg;
  cfg.num_subjects = 3;
  cfg.sequences_per_subject = 2;
  cfg.noise_sigma = 0.03;
  const auto ds = generate_dataset(cfg);
  REQUIRE(ds.sequences.size() == 6);
  for (const auto& seq : ds.sequences) {
    CHECK(seq.valid());
    CHECK(seq.rows() == cfg.rows);
    CHECK(seq.cols() == cfg.cols);
    CHECK_FALSE(seq.subject_id.empty());
    CHECK_FALSE(seq.sequence_id.empty());
  }
}

#include "stepgrid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stepgrid/rng.hpp"

namespace stepgrid {

namespace {

constexpr double kGrid = 4096.0;  // 2^12

struct FootTemplate {
  int length, width;
  std::vector<double> heel;  // length x width, row-major
  std::vector<double> toe;
};

double lobe(double r, double c, double cr, double cc, double rr, double rc) {
  const double dr = (r - cr) / rr;
  const double dc = (c - cc) / rc;
  return std::max(0.0, 1.0 - (dr * dr + dc * dc));
}

FootTemplate make_template(const SubjectProfile& p) {
  const int L = p.foot_length_px, W = p.foot_width_px;
  FootTemplate t{L, W, std::vector<double>(size_t(L) * W), std::vector<double>(size_t(L) * W)};
  // row 0 is the toe end (walking direction is toward smaller rows)
  const double toe_cr = 0.26 * (L - 1), toe_cc = 0.50 * (W - 1);
  const double heel_cr = 0.74 * (L - 1), heel_cc = 0.50 * (W - 1);
  for (int r = 0; r < L; ++r)
    for (int c = 0; c < W; ++c) {
      t.toe[size_t(r) * W + c] = lobe(r, c, toe_cr, toe_cc, 0.32 * L, 0.42 * W);
      t.heel[size_t(r) * W + c] = lobe(r, c, heel_cr, heel_cc, 0.28 * L, 0.38 * W);
    }
  return t;
}

/// Per-frame (heel, toe) coefficients of one burst: complementary lobe
/// weights rolling heel to toe, shaped by roll_skew, under a sin envelope
/// that is strictly positive on every burst frame.
struct RollSchedule {
  std::vector<double> heel_coef;
  std::vector<double> toe_coef;
};

RollSchedule make_schedule(int duration, double skew) {
  RollSchedule s;
  s.heel_coef.resize(size_t(duration));
  s.toe_coef.resize(size_t(duration));
  for (int t = 0; t < duration; ++t) {
    const double u = duration > 1 ? double(t) / (duration - 1) : 0.5;
    const double shaped = std::pow(u, std::exp2(-skew));
    const double wh = std::cos(M_PI / 2.0 * shaped);
    const double w_heel = wh * wh;
    const double envelope = std::sin(M_PI * (t + 0.5) / duration);
    s.heel_coef[size_t(t)] = envelope * w_heel;
    s.toe_coef[size_t(t)] = envelope * (1.0 - w_heel);
  }
  return s;
}

}  // namespace

double quantize_pressure(double v) { return std::round(v * kGrid) / kGrid; }

std::vector<SubjectProfile> sample_profiles(const GenConfig& cfg) {
  require(cfg.num_subjects > 0 && cfg.sequences_per_subject > 0, Errc::bad_config,
          "sample_profiles: counts must be positive");
  const int max_len = std::min(26, (cfg.rows - 14) / std::max(1, cfg.steps_per_sequence) - 4);
  const int max_wid = std::min(14, cfg.cols - 14);
  require(max_len >= 16 && max_wid >= 8, Errc::bad_config,
          "sample_profiles: sensor grid too small for the default foot geometry");

  Rng rng(derive_seed(cfg.seed, "profiles"));
  std::vector<SubjectProfile> profiles;
  profiles.reserve(size_t(cfg.num_subjects));
  for (int i = 0; i < cfg.num_subjects; ++i) {
    SubjectProfile p;
    int attempts = 0;
    do {
      require(++attempts < 10000, Errc::bad_config, "sample_profiles: cannot draw distinct profiles");
      p.foot_length_px = int(rng.range(16, max_len));
      p.foot_width_px = int(rng.range(8, max_wid));
      p.roll_duration_frames = int(2 * rng.range(4, 7) + 1);  // odd: 9, 11, 13, 15
      p.roll_skew = quantize_pressure(rng.uniform(-0.75, 0.75));
    } while (std::any_of(profiles.begin(), profiles.end(), [&](const SubjectProfile& q) {
      return q.foot_length_px == p.foot_length_px && q.foot_width_px == p.foot_width_px &&
             q.roll_duration_frames == p.roll_duration_frames && q.roll_skew == p.roll_skew;
    }));
    p.peak_pressure = quantize_pressure(rng.uniform(0.75, 2.0));
    p.stance_row = int(rng.range(2, 8));
    p.stance_col = int(rng.range(4, cfg.cols - p.foot_width_px - 8));
    p.noise_sigma = cfg.noise_sigma;
    profiles.push_back(p);
  }
  return profiles;
}

GeneratedSequence generate_clean_sequence(const SubjectProfile& profile, const GenConfig& cfg,
                                          uint64_t shape_seed) {
  require(cfg.steps_per_sequence >= 1, Errc::bad_config, "generate: need at least one step");
  require(profile.foot_length_px > 0 && profile.foot_width_px > 0 &&
              profile.roll_duration_frames > 0 && profile.peak_pressure > 0,
          Errc::bad_config, "generate: invalid profile");

  Rng rng(shape_seed);
  const FootTemplate foot = make_template(profile);
  const RollSchedule roll = make_schedule(profile.roll_duration_frames, profile.roll_skew);
  const int T = profile.roll_duration_frames;

  // the whole walk shifts a little between recordings
  const int jitter_r = int(rng.range(-2, 2));
  const int jitter_c = int(rng.range(-3, 3));
  const int stride = profile.foot_length_px + 4;

  struct Placement {
    int row, col;
  };
  std::vector<Placement> placements;
  for (int k = 0; k < cfg.steps_per_sequence; ++k) {
    Placement pl;
    pl.row = profile.stance_row + jitter_r + k * stride;
    pl.col = profile.stance_col + jitter_c + (k % 2 == 1 ? 2 : 0) + int(rng.range(-1, 1));
    require(pl.row >= 0 && pl.col >= 0 && pl.row + profile.foot_length_px <= cfg.rows &&
                pl.col + profile.foot_width_px <= cfg.cols,
            Errc::foot_does_not_fit, "generate: step placement exceeds the sensor grid");
    placements.push_back(pl);
  }

  std::vector<int> gaps;  // leading gap, then one gap after each burst
  for (int k = 0; k <= cfg.steps_per_sequence; ++k) gaps.push_back(int(3 + rng.range(0, 2)));

  // normalize so the burst-wide maximum equals peak_pressure exactly
  double raw_max = 0.0;
  for (int t = 0; t < T; ++t)
    for (size_t i = 0; i < foot.heel.size(); ++i)
      raw_max = std::max(raw_max, roll.heel_coef[size_t(t)] * foot.heel[i] +
                                      roll.toe_coef[size_t(t)] * foot.toe[i]);
  const double scale = profile.peak_pressure / raw_max;

  GeneratedSequence out;
  out.seq.fps = cfg.fps;
  int total = 0;
  for (int k = 0; k < cfg.steps_per_sequence; ++k) total += gaps[size_t(k)] + T;
  total += gaps.back();
  out.seq.frames.assign(size_t(total), PressureFrame(cfg.rows, cfg.cols));

  int cursor = 0;
  for (int k = 0; k < cfg.steps_per_sequence; ++k) {
    cursor += gaps[size_t(k)];
    out.bursts.push_back({cursor, cursor + T});
    for (int t = 0; t < T; ++t) {
      PressureFrame& frame = out.seq.frames[size_t(cursor + t)];
      for (int r = 0; r < foot.length; ++r)
        for (int c = 0; c < foot.width; ++c) {
          const size_t i = size_t(r) * foot.width + c;
          const double v = scale * (roll.heel_coef[size_t(t)] * foot.heel[i] +
                                    roll.toe_coef[size_t(t)] * foot.toe[i]);
          frame.at(placements[size_t(k)].row + r, placements[size_t(k)].col + c) =
              float(quantize_pressure(v));
        }
    }
    cursor += T;
  }
  return out;
}

void add_noise(PressureSequence& seq, double sigma, uint64_t noise_seed) {
  if (sigma <= 0.0) return;
  Rng rng(noise_seed);
  for (auto& frame : seq.frames)
    for (auto& v : frame.values)
      v = float(quantize_pressure(std::max(0.0, double(v) + sigma * rng.normal())));
}

PressureSequence generate_sequence(const SubjectProfile& profile, const GenConfig& cfg,
                                   uint64_t sequence_seed, std::string subject_id,
                                   std::string sequence_id) {
  GeneratedSequence gen =
      generate_clean_sequence(profile, cfg, derive_seed(sequence_seed, "shape"));
  add_noise(gen.seq, profile.noise_sigma, derive_seed(sequence_seed, "noise"));
  gen.seq.subject_id = std::move(subject_id);
  gen.seq.sequence_id = std::move(sequence_id);
  return std::move(gen.seq);
}

namespace {

std::string format_id(const char* fmt, int a, int b = -1) {
  char buf[64];
  if (b < 0)
    std::snprintf(buf, sizeof buf, fmt, a);
  else
    std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

}  // namespace

LabeledDataset generate_dataset(const GenConfig& cfg) {
  LabeledDataset ds;
  ds.profiles = sample_profiles(cfg);
  for (int i = 0; i < cfg.num_subjects; ++i) {
    const std::string subject = format_id("s%02d", i);
    for (int k = 0; k < cfg.sequences_per_subject; ++k)
      ds.sequences.push_back(generate_sequence(ds.profiles[size_t(i)], cfg,
                                               derive_seed(cfg.seed, "seq", i, k), subject,
                                               format_id("s%02d_r%03d", i, k)));
  }
  return ds;
}

LabeledDataset generate_temporal_twin_dataset(const GenConfig& cfg) {
  require(cfg.num_subjects % 2 == 0, Errc::bad_config,
          "twin dataset: num_subjects must be even");
  GenConfig pair_cfg = cfg;
  pair_cfg.num_subjects = cfg.num_subjects / 2;
  pair_cfg.seed = derive_seed(cfg.seed, "twin-profiles");

  LabeledDataset ds;
  ds.profiles = sample_profiles(pair_cfg);
  for (int p = 0; p < pair_cfg.num_subjects; ++p) {
    const SubjectProfile& profile = ds.profiles[size_t(p)];
    const std::string subject_a = format_id("p%02da", p);
    const std::string subject_b = format_id("p%02db", p);
    for (int k = 0; k < cfg.sequences_per_subject; ++k) {
      const uint64_t shape_seed = derive_seed(cfg.seed, "twin-shape", p, k);
      GeneratedSequence gen = generate_clean_sequence(profile, cfg, shape_seed);

      PressureSequence seq_a = gen.seq;
      PressureSequence seq_b = gen.seq;
      for (const FrameRange& burst : gen.bursts)
        std::reverse(seq_b.frames.begin() + burst.start, seq_b.frames.begin() + burst.end);

      add_noise(seq_a, cfg.noise_sigma, derive_seed(cfg.seed, "twin-noise-a", p, k));
      add_noise(seq_b, cfg.noise_sigma, derive_seed(cfg.seed, "twin-noise-b", p, k));
      seq_a.subject_id = subject_a;
      seq_a.sequence_id = format_id("p%02da_r%03d", p, k);
      seq_b.subject_id = subject_b;
      seq_b.sequence_id = format_id("p%02db_r%03d", p, k);
      ds.sequences.push_back(std::move(seq_a));
      ds.sequences.push_back(std::move(seq_b));
    }
  }
  return ds;
}

}  // namespace stepgrid

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stepgrid/types.hpp"

namespace stepgrid {

/// Per-subject gait parameters. Stands in for the inter-subject variation of
/// the real participants (height, weight, shoe size).
struct SubjectProfile {
  int foot_length_px = 22;
  int foot_width_px = 10;
  double peak_pressure = 1.0;    // sensor units, on the generator value grid
  int roll_duration_frames = 11;  // heel strike to toe off
  double roll_skew = 0.0;        // <0 heel-weighted timing, >0 toe-weighted
  int stance_row = 4;            // top-left corner of the first step's foot box
  int stance_col = 20;
  double noise_sigma = 0.0;
};

struct GenConfig {
  int num_subjects = 13;
  int sequences_per_subject = 12;
  int steps_per_sequence = 3;  // recordings hold 2-3 steps
  int rows = 120;
  int cols = 54;
  double fps = 25.0;
  double noise_sigma = 0.02;
  uint64_t seed = 0;
};

/// All generated pressures are quantized to this grid (multiples of 2^-12).
/// Sums of grid values accumulate exactly in double regardless of order,
/// which is what makes the twin-dataset average-frame guarantee bitwise.
double quantize_pressure(double v);

/// num_subjects deterministic profiles, pairwise distinct in at least one of
/// foot dims, roll duration, roll skew.
std::vector<SubjectProfile> sample_profiles(const GenConfig& cfg);

struct GeneratedSequence {
  PressureSequence seq;
  std::vector<FrameRange> bursts;  // one per step, in temporal order
};

/// Noise-free sequence plus the exact burst ranges it was built from. Each
/// burst is roll_duration_frames long; bursts are separated by >= 3 all-zero
/// frames. Within a burst an elliptical two-lobe foot template rolls heel to
/// toe under a rising-then-falling envelope; the burst maximum equals
/// peak_pressure exactly.
GeneratedSequence generate_clean_sequence(const SubjectProfile& profile, const GenConfig& cfg,
                                          uint64_t shape_seed);

/// Adds per-pixel i.i.d. Gaussian noise clipped at 0 (then re-quantized).
void add_noise(PressureSequence& seq, double sigma, uint64_t noise_seed);

/// Clean sequence + noise, fully determined by (profile, cfg, sequence_seed).
PressureSequence generate_sequence(const SubjectProfile& profile, const GenConfig& cfg,
                                   uint64_t sequence_seed, std::string subject_id = "",
                                   std::string sequence_id = "");

struct LabeledDataset {
  std::vector<SubjectProfile> profiles;
  std::vector<PressureSequence> sequences;
};

/// The default dataset: num_subjects distinct profiles, sequences_per_subject
/// recordings each.
LabeledDataset generate_dataset(const GenConfig& cfg);

/// Subjects come in pairs sharing a profile: member "a" rolls heel-first and
/// member "b" is "a" with every burst reversed in time, frame for frame. At
/// noise_sigma = 0 the per-step average frames (and max frames) of a pair are
/// therefore bitwise identical while the frame-by-frame sequences differ.
/// Requires an even num_subjects.
LabeledDataset generate_temporal_twin_dataset(const GenConfig& cfg);

}  // namespace stepgrid

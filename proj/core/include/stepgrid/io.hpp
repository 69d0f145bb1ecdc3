#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stepgrid/types.hpp"

namespace stepgrid {

// ---------------------------------------------------------------------------
// PSQ: magic "PSQ1", little-endian u32 rows, u32 cols, u32 num_frames,
// then num_frames*rows*cols little-endian f32, frame-major, row-major
// within a frame. Labels are deliberately not part of the format; they live
// in the JSON-lines manifest next to the files.
// ---------------------------------------------------------------------------

size_t write_psq(const PressureSequence& seq, std::ostream& sink);

/// fps is not stored in the file; the caller supplies it (sensor default 25).
PressureSequence read_psq(std::istream& source, double fps = 25.0);

void save_psq(const PressureSequence& seq, const std::filesystem::path& path);
PressureSequence load_psq(const std::filesystem::path& path, double fps = 25.0);

// ---------------------------------------------------------------------------
// PGM, binary variant: "P5\n<width> <height>\n255\n" + raw bytes.
// ---------------------------------------------------------------------------

size_t write_pgm(const GrayImage& img, std::ostream& sink);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);
GrayImage read_pgm(std::istream& source);
GrayImage load_pgm(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Report CSV: header "repeat,fold,strategy,accuracy", accuracy with 6
// decimals, rows ordered by (repeat, fold, strategy) ascending.
// ---------------------------------------------------------------------------

size_t write_report_csv(const EvalReport& report, std::ostream& sink);
void save_report_csv(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report_csv(std::istream& source);
EvalReport load_report_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// DSC1 descriptor matrix: magic "DSC1", little-endian u32 count, u32 dim,
// then count*dim little-endian f32 in row order.
// ---------------------------------------------------------------------------

size_t write_dsc1(const std::vector<Descriptor>& descriptors, std::ostream& sink);
std::vector<Descriptor> read_dsc1(std::istream& source);
void save_dsc1(const std::vector<Descriptor>& descriptors, const std::filesystem::path& path);
std::vector<Descriptor> load_dsc1(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// JSON-lines manifests, one object per line.
// ---------------------------------------------------------------------------

struct SequenceEntry {
  std::string path;
  std::string subject_id;
  std::string sequence_id;
};

struct StepEntry {
  std::string path;
  std::string subject_id;
  std::string step_id;
  std::string sequence_id;
  int start = 0;  // [start, end) frame range in the source sequence
  int end = 0;
  BoundingBox bbox;
};

struct ImageEntry {
  std::vector<std::string> paths;  // one per image; FullSequence emits many
  std::string subject_id;
  std::string step_id;
  std::string strategy;
};

struct DescriptorEntry {
  std::string path;
  std::string subject_id;
  std::string step_id;
  std::string strategy;
  int count = 0;
  int dim = 0;
};

void write_manifest(const std::vector<SequenceEntry>& entries, std::ostream& sink);
void write_manifest(const std::vector<StepEntry>& entries, std::ostream& sink);
void write_manifest(const std::vector<ImageEntry>& entries, std::ostream& sink);
void write_manifest(const std::vector<DescriptorEntry>& entries, std::ostream& sink);

std::vector<SequenceEntry> read_sequence_manifest(std::istream& source);
std::vector<StepEntry> read_step_manifest(std::istream& source);
std::vector<ImageEntry> read_image_manifest(std::istream& source);
std::vector<DescriptorEntry> read_descriptor_manifest(std::istream& source);

template <typename Entry>
void save_manifest(const std::vector<Entry>& entries, const std::filesystem::path& path);

std::vector<SequenceEntry> load_sequence_manifest(const std::filesystem::path& path);
std::vector<StepEntry> load_step_manifest(const std::filesystem::path& path);
std::vector<ImageEntry> load_image_manifest(const std::filesystem::path& path);
std::vector<DescriptorEntry> load_descriptor_manifest(const std::filesystem::path& path);

}  // namespace stepgrid

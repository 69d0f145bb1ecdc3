#include "stepgrid/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace stepgrid {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");
static_assert(sizeof(float) == 4);

void put_u32(std::ostream& s, uint32_t v) { s.write(reinterpret_cast<const char*>(&v), 4); }

uint32_t get_u32(std::istream& s) {
  uint32_t v = 0;
  s.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

void check_sink(std::ostream& s, const char* what) {
  require(bool(s), Errc::io_failure, std::string("write failure: ") + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), Errc::io_failure, "cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), Errc::io_failure, "cannot open for reading: " + path.string());
  return in;
}

}  // namespace

// --------------------------------------------------------------------------
// PSQ
// --------------------------------------------------------------------------

size_t write_psq(const PressureSequence& seq, std::ostream& sink) {
  require(seq.valid(), Errc::bad_config, "write_psq: invalid sequence");
  sink.write("PSQ1", 4);
  put_u32(sink, uint32_t(seq.rows()));
  put_u32(sink, uint32_t(seq.cols()));
  put_u32(sink, uint32_t(seq.num_frames()));
  for (const auto& f : seq.frames)
    sink.write(reinterpret_cast<const char*>(f.values.data()), std::streamsize(f.values.size() * 4));
  check_sink(sink, "psq");
  return 16 + seq.num_frames() * size_t(seq.rows()) * size_t(seq.cols()) * 4;
}

PressureSequence read_psq(std::istream& source, double fps) {
  char magic[4] = {};
  source.read(magic, 4);
  require(source.gcount() == 4 && std::memcmp(magic, "PSQ1", 4) == 0, Errc::bad_magic,
          "psq: bad magic");
  uint32_t rows = get_u32(source);
  uint32_t cols = get_u32(source);
  uint32_t num_frames = get_u32(source);
  require(bool(source), Errc::truncated_payload, "psq: truncated header");
  require(rows > 0 && cols > 0 && num_frames > 0, Errc::zero_dimension,
          "psq: zero dimension in header");

  PressureSequence seq;
  seq.fps = fps;
  seq.frames.reserve(num_frames);
  const size_t frame_px = size_t(rows) * size_t(cols);
  for (uint32_t t = 0; t < num_frames; ++t) {
    PressureFrame f{int(rows), int(cols)};
    source.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(frame_px * 4));
    require(size_t(source.gcount()) == frame_px * 4, Errc::truncated_payload,
            "psq: payload shorter than header claims");
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

void save_psq(const PressureSequence& seq, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_psq(seq, out);
}

PressureSequence load_psq(const std::filesystem::path& path, double fps) {
  auto in = open_in(path);
  return read_psq(in, fps);
}

// --------------------------------------------------------------------------
// PGM
// --------------------------------------------------------------------------

size_t write_pgm(const GrayImage& img, std::ostream& sink) {
  require(img.valid(), Errc::bad_config, "write_pgm: invalid image");
  std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  sink.write(header.data(), std::streamsize(header.size()));
  sink.write(reinterpret_cast<const char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  check_sink(sink, "pgm");
  return header.size() + img.pixels.size();
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_pgm(img, out);
}

GrayImage read_pgm(std::istream& source) {
  std::string magic;
  source >> magic;
  require(magic == "P5", Errc::bad_magic, "pgm: expected P5");
  int width = 0, height = 0, maxval = 0;
  source >> width >> height >> maxval;
  require(bool(source) && width > 0 && height > 0, Errc::zero_dimension, "pgm: bad dimensions");
  require(maxval == 255, Errc::bad_range, "pgm: only maxval 255 supported");
  source.get();  // single whitespace after maxval
  GrayImage img(width, height);
  source.read(reinterpret_cast<char*>(img.pixels.data()), std::streamsize(img.pixels.size()));
  require(size_t(source.gcount()) == img.pixels.size(), Errc::truncated_payload,
          "pgm: truncated payload");
  return img;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

// --------------------------------------------------------------------------
// Report CSV
// --------------------------------------------------------------------------

size_t write_report_csv(const EvalReport& report, std::ostream& sink) {
  std::vector<ReportRow> rows = report.rows;
  std::sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.repeat != b.repeat) return a.repeat < b.repeat;
    if (a.fold != b.fold) return a.fold < b.fold;
    return a.strategy < b.strategy;
  });
  std::string out = "repeat,fold,strategy,accuracy\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.accuracy);
    out += std::to_string(r.repeat) + "," + std::to_string(r.fold) + "," + r.strategy + "," + buf +
           "\n";
  }
  sink.write(out.data(), std::streamsize(out.size()));
  check_sink(sink, "report csv");
  return out.size();
}

void save_report_csv(const EvalReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_report_csv(report, out);
}

EvalReport read_report_csv(std::istream& source) {
  EvalReport report;
  std::string line;
  std::getline(source, line);
  require(line == "repeat,fold,strategy,accuracy", Errc::bad_magic, "report csv: bad header");
  while (std::getline(source, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string repeat, fold, strategy, accuracy;
    std::getline(ss, repeat, ',');
    std::getline(ss, fold, ',');
    std::getline(ss, strategy, ',');
    std::getline(ss, accuracy);
    require(!accuracy.empty(), Errc::truncated_payload, "report csv: short row");
    report.rows.push_back(
        {std::stoi(repeat), std::stoi(fold), strategy, std::stod(accuracy)});
  }
  return report;
}

EvalReport load_report_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_report_csv(in);
}

// --------------------------------------------------------------------------
// DSC1
// --------------------------------------------------------------------------

size_t write_dsc1(const std::vector<Descriptor>& descriptors, std::ostream& sink) {
  require(!descriptors.empty(), Errc::bad_config, "dsc1: empty descriptor list");
  const int dim = descriptors.front().dim();
  for (const auto& d : descriptors)
    require(d.dim() == dim, Errc::dim_mismatch, "dsc1: mixed descriptor dimensions");
  sink.write("DSC1", 4);
  put_u32(sink, uint32_t(descriptors.size()));
  put_u32(sink, uint32_t(dim));
  for (const auto& d : descriptors)
    sink.write(reinterpret_cast<const char*>(d.values.data()), std::streamsize(size_t(dim) * 4));
  check_sink(sink, "dsc1");
  return 12 + descriptors.size() * size_t(dim) * 4;
}

std::vector<Descriptor> read_dsc1(std::istream& source) {
  char magic[4] = {};
  source.read(magic, 4);
  require(source.gcount() == 4 && std::memcmp(magic, "DSC1", 4) == 0, Errc::bad_magic,
          "dsc1: bad magic");
  uint32_t count = get_u32(source);
  uint32_t dim = get_u32(source);
  require(bool(source), Errc::truncated_payload, "dsc1: truncated header");
  require(count > 0 && dim > 0, Errc::zero_dimension, "dsc1: zero dimension");
  std::vector<Descriptor> out(count);
  for (auto& d : out) {
    d.values.resize(dim);
    source.read(reinterpret_cast<char*>(d.values.data()), std::streamsize(size_t(dim) * 4));
    require(size_t(source.gcount()) == size_t(dim) * 4, Errc::truncated_payload,
            "dsc1: truncated payload");
  }
  return out;
}

void save_dsc1(const std::vector<Descriptor>& descriptors, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_dsc1(descriptors, out);
}

std::vector<Descriptor> load_dsc1(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dsc1(in);
}

// --------------------------------------------------------------------------
// Manifests
// --------------------------------------------------------------------------

namespace {

json to_json(const SequenceEntry& e) {
  return {{"path", e.path}, {"subject_id", e.subject_id}, {"sequence_id", e.sequence_id}};
}

json to_json(const StepEntry& e) {
  return {{"path", e.path},
          {"subject_id", e.subject_id},
          {"step_id", e.step_id},
          {"sequence_id", e.sequence_id},
          {"start", e.start},
          {"end", e.end},
          {"bbox", {e.bbox.row0, e.bbox.col0, e.bbox.height, e.bbox.width}}};
}

json to_json(const ImageEntry& e) {
  return {{"paths", e.paths},
          {"subject_id", e.subject_id},
          {"step_id", e.step_id},
          {"strategy", e.strategy}};
}

json to_json(const DescriptorEntry& e) {
  return {{"path", e.path},       {"subject_id", e.subject_id}, {"step_id", e.step_id},
          {"strategy", e.strategy}, {"count", e.count},          {"dim", e.dim}};
}

template <typename Entry>
void write_jsonl(const std::vector<Entry>& entries, std::ostream& sink) {
  for (const auto& e : entries) sink << to_json(e).dump() << "\n";
  check_sink(sink, "manifest");
}

template <typename Entry, typename FromJson>
std::vector<Entry> read_jsonl(std::istream& source, FromJson from) {
  std::vector<Entry> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(source, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    require(!j.is_discarded(), Errc::io_failure,
            "manifest: bad JSON on line " + std::to_string(lineno));
    out.push_back(from(j));
  }
  return out;
}

}  // namespace

void write_manifest(const std::vector<SequenceEntry>& entries, std::ostream& sink) {
  write_jsonl(entries, sink);
}
void write_manifest(const std::vector<StepEntry>& entries, std::ostream& sink) {
  write_jsonl(entries, sink);
}
void write_manifest(const std::vector<ImageEntry>& entries, std::ostream& sink) {
  write_jsonl(entries, sink);
}
void write_manifest(const std::vector<DescriptorEntry>& entries, std::ostream& sink) {
  write_jsonl(entries, sink);
}

std::vector<SequenceEntry> read_sequence_manifest(std::istream& source) {
  return read_jsonl<SequenceEntry>(source, [](const json& j) {
    return SequenceEntry{j.at("path"), j.at("subject_id"), j.at("sequence_id")};
  });
}

std::vector<StepEntry> read_step_manifest(std::istream& source) {
  return read_jsonl<StepEntry>(source, [](const json& j) {
    StepEntry e{j.at("path"),  j.at("subject_id"), j.at("step_id"), j.at("sequence_id"),
                j.at("start"), j.at("end"),        {}};
    auto b = j.at("bbox");
    e.bbox = {b.at(0), b.at(1), b.at(2), b.at(3)};
    return e;
  });
}

std::vector<ImageEntry> read_image_manifest(std::istream& source) {
  return read_jsonl<ImageEntry>(source, [](const json& j) {
    return ImageEntry{j.at("paths"), j.at("subject_id"), j.at("step_id"), j.at("strategy")};
  });
}

std::vector<DescriptorEntry> read_descriptor_manifest(std::istream& source) {
  return read_jsonl<DescriptorEntry>(source, [](const json& j) {
    return DescriptorEntry{j.at("path"),     j.at("subject_id"), j.at("step_id"),
                           j.at("strategy"), j.at("count"),      j.at("dim")};
  });
}

template <typename Entry>
void save_manifest(const std::vector<Entry>& entries, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_manifest(entries, out);
}

template void save_manifest<SequenceEntry>(const std::vector<SequenceEntry>&,
                                           const std::filesystem::path&);
template void save_manifest<StepEntry>(const std::vector<StepEntry>&,
                                       const std::filesystem::path&);
template void save_manifest<ImageEntry>(const std::vector<ImageEntry>&,
                                        const std::filesystem::path&);
template void save_manifest<DescriptorEntry>(const std::vector<DescriptorEntry>&,
                                             const std::filesystem::path&);

std::vector<SequenceEntry> load_sequence_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_sequence_manifest(in);
}
std::vector<StepEntry> load_step_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_step_manifest(in);
}
std::vector<ImageEntry> load_image_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_image_manifest(in);
}
std::vector<DescriptorEntry> load_descriptor_manifest(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_descriptor_manifest(in);
}

}  // namespace stepgrid

#pragma once

#include "mcmon/chart.hpp"
#include "mcmon/extractor.hpp"
#include "mcmon/simgen.hpp"
#include "mcmon/tensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcmon {

// 1-based inclusive point range of a profile segment.
struct SegmentInterval {
    std::size_t lo = 1;
    std::size_t hi = 1;

    std::size_t length() const noexcept { return hi - lo + 1; }
    void validate(std::size_t points) const;
};

// Parses "lo:hi".
SegmentInterval parse_segment(std::string_view text);

Sample slice_segment(const Sample& sample, const SegmentInterval& interval);
TensorBatch slice_segment(const TensorBatch& batch, const SegmentInterval& interval);

// --- sample CSV: header `id,label,v0..v{CK-1}`, channel-major values ---

struct SampleRecord {
    std::string id;
    std::optional<int> label;
    std::vector<double> values;
};

// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

void write_csv_header(std::ostream& out, std::size_t width);
void write_record(std::ostream& out, const SampleRecord& record);

// Parses one data line. `expected_width`, when non-zero, is the required value count.
SampleRecord parse_record(std::string_view line, std::size_t expected_width = 0);

// True for a header line (`id,label,...`).
bool is_header_line(std::string_view line);

struct SampleTable {
    std::vector<std::string> ids;
    TensorBatch batch;
};

void write_samples_csv(std::ostream& out, const TensorBatch& batch, std::string_view id_prefix = "s");

// Reads a whole CSV. Labels are attached only when every row carries one.
SampleTable read_samples_csv(std::istream& in, std::size_t channels);

// --- model file ---

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
    Extractor extractor;
    T2Chart chart;
    // Points per channel of raw input before any segment slicing.
    std::size_t raw_points = 0;
    std::optional<SegmentInterval> segment;
    std::optional<SimConfig> simulation;
};

// Applies the stored segment to a raw sample and checks its shape.
Sample prepare_sample(const ModelFile& model, const Sample& raw);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

// Text form used by save_model/load_model.
std::string serialize_model(const ModelFile& model);
ModelFile deserialize_model(std::string_view text);

} // namespace mcmon

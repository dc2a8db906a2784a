#include "mcmon/io.hpp"

#include "mcmon/error.hpp"

#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <system_error>

namespace mcmon {

using nlohmann::json;

namespace {

template <class T>
T parse_number(std::string_view text, const char* what) {
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw InvalidArgument(std::string("cannot parse ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

std::string_view trim_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

// --- JSON helpers ---

json vector_json(const Vector& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector vector_from(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json matrix_json(const Matrix& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            data.push_back(m(r, c));
        }
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
        throw ModelFileError(ModelFileError::Kind::Format, "matrix dimensions do not match its data");
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
        }
    }
    return m;
}

json sample_json(const Sample& s) {
    return matrix_json(s.values());
}

Sample sample_from(const json& j) {
    return Sample(RowMatrix(matrix_from(j)));
}

json tvp_json(const Tvp& tvp) {
    json emps = json::array();
    for (const auto& e : tvp.emps()) {
        emps.push_back({{"channel", vector_json(e.channel_vec())}, {"point", vector_json(e.point_vec())}});
    }
    return emps;
}

Tvp tvp_from(const json& j) {
    std::vector<Emp> emps;
    for (const auto& e : j) {
        emps.push_back(Emp::restore(vector_from(e.at("channel")), vector_from(e.at("point"))));
    }
    return Tvp(std::move(emps));
}

json coords_json(const std::vector<Vector>& coords) {
    json out = json::array();
    for (const auto& h : coords) {
        out.push_back(vector_json(h));
    }
    return out;
}

std::vector<Vector> coords_from(const json& j) {
    std::vector<Vector> out;
    for (const auto& h : j) {
        out.push_back(vector_from(h));
    }
    return out;
}

json extractor_json(const Extractor& extractor) {
    json j;
    j["method"] = to_string(extractor.method());
    j["channels"] = extractor.channels();
    j["points"] = extractor.points();
    j["features"] = extractor.feature_count();
    switch (extractor.method()) {
    case Method::Umlda: {
        const auto& m = std::get<UmldaModel>(extractor.model());
        j["mean"] = sample_json(m.mean);
        j["emps"] = tvp_json(m.tvp);
        j["gamma"] = m.gamma;
        j["class_count"] = m.class_count;
        j["training_coords"] = coords_json(m.training_coords);
        j["fisher_ratios"] = m.fisher_ratios;
        j["regularizers"] = m.regularizers;
        j["converged"] = m.converged;
        j["objective_trace"] = m.objective_trace;
        break;
    }
    case Method::Umpca: {
        const auto& m = std::get<UmpcaModel>(extractor.model());
        j["mean"] = sample_json(m.mean);
        j["emps"] = tvp_json(m.tvp);
        j["training_coords"] = coords_json(m.training_coords);
        j["captured"] = m.captured;
        j["converged"] = m.converged;
        break;
    }
    case Method::Mpca: {
        const auto& m = std::get<MpcaModel>(extractor.model());
        j["mean"] = sample_json(m.mean);
        j["u1"] = matrix_json(m.u1);
        j["u2"] = matrix_json(m.u2);
        j["feature_index"] = m.feature_index;
        break;
    }
    case Method::Vpca: {
        const auto& m = std::get<VpcaModel>(extractor.model());
        j["mean"] = vector_json(m.mean);
        j["loadings"] = matrix_json(m.loadings);
        j["variances"] = vector_json(m.variances);
        break;
    }
    }
    return j;
}

Extractor extractor_from(const json& j) {
    const Method method = parse_method(j.at("method").get<std::string>());
    switch (method) {
    case Method::Umlda: {
        UmldaModel m;
        m.mean = sample_from(j.at("mean"));
        m.tvp = tvp_from(j.at("emps"));
        m.gamma = j.at("gamma").get<double>();
        m.class_count = j.at("class_count").get<int>();
        m.training_coords = coords_from(j.at("training_coords"));
        m.fisher_ratios = j.at("fisher_ratios").get<std::vector<double>>();
        m.regularizers = j.at("regularizers").get<std::vector<double>>();
        m.converged = j.at("converged").get<std::vector<bool>>();
        m.objective_trace = j.at("objective_trace").get<std::vector<std::vector<double>>>();
        return Extractor(std::move(m));
    }
    case Method::Umpca: {
        UmpcaModel m;
        m.mean = sample_from(j.at("mean"));
        m.tvp = tvp_from(j.at("emps"));
        m.training_coords = coords_from(j.at("training_coords"));
        m.captured = j.at("captured").get<std::vector<double>>();
        m.converged = j.at("converged").get<std::vector<bool>>();
        return Extractor(std::move(m));
    }
    case Method::Mpca: {
        MpcaModel m;
        m.mean = sample_from(j.at("mean"));
        m.u1 = matrix_from(j.at("u1"));
        m.u2 = matrix_from(j.at("u2"));
        m.feature_index = j.at("feature_index").get<std::vector<Eigen::Index>>();
        return Extractor(std::move(m));
    }
    case Method::Vpca: {
        VpcaModel m;
        m.mean = vector_from(j.at("mean"));
        m.loadings = matrix_from(j.at("loadings"));
        m.variances = vector_from(j.at("variances"));
        m.channels = j.at("channels").get<std::size_t>();
        m.points = j.at("points").get<std::size_t>();
        return Extractor(std::move(m));
    }
    }
    throw ModelFileError(ModelFileError::Kind::Format, "unknown extractor kind");
}

json chart_json(const T2Chart& chart) {
    return json{{"mean", vector_json(chart.mean())},
                {"cov_inv", matrix_json(chart.cov_inv())},
                {"ucl", chart.ucl()},
                {"alpha", chart.alpha()},
                {"m_train", chart.m_train()},
                {"convention", to_string(chart.convention())}};
}

T2Chart chart_from(const json& j) {
    return T2Chart::from_parts(vector_from(j.at("mean")), matrix_from(j.at("cov_inv")), j.at("ucl").get<double>(),
                               j.at("alpha").get<double>(), j.at("m_train").get<std::size_t>(),
                               parse_limit_convention(j.at("convention").get<std::string>()));
}

json sim_json(const SimConfig& c) {
    return json{{"k_mean", vector_json(c.k_mean)},
                {"k_var", vector_json(c.k_var)},
                {"noise_sd", vector_json(c.noise_sd)},
                {"points", c.points}};
}

SimConfig sim_from(const json& j) {
    SimConfig c;
    c.k_mean = vector_from(j.at("k_mean"));
    c.k_var = vector_from(j.at("k_var"));
    c.noise_sd = vector_from(j.at("noise_sd"));
    c.points = j.at("points").get<std::size_t>();
    c.validate();
    return c;
}

std::string checksum(const std::string& text) {
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size()));
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
    return buf;
}

} // namespace

void SegmentInterval::validate(std::size_t points) const {
    if (lo < 1 || lo > hi || hi > points) {
        throw InvalidArgument("segment [" + std::to_string(lo) + ", " + std::to_string(hi) +
                              "] is outside 1 <= lo <= hi <= K = " + std::to_string(points));
    }
}

SegmentInterval parse_segment(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgument("segment must be written lo:hi, got '" + std::string(text) + "'");
    }
    SegmentInterval s{parse_number<std::size_t>(text.substr(0, colon), "segment start"),
                      parse_number<std::size_t>(text.substr(colon + 1), "segment end")};
    if (s.lo < 1 || s.lo > s.hi) {
        throw InvalidArgument("segment must satisfy 1 <= lo <= hi, got '" + std::string(text) + "'");
    }
    return s;
}

Sample slice_segment(const Sample& sample, const SegmentInterval& interval) {
    interval.validate(sample.points());
    return Sample(RowMatrix(sample.values().middleCols(static_cast<Eigen::Index>(interval.lo - 1),
                                                       static_cast<Eigen::Index>(interval.length()))));
}

TensorBatch slice_segment(const TensorBatch& batch, const SegmentInterval& interval) {
    std::vector<Sample> out;
    out.reserve(batch.size());
    for (const auto& s : batch.samples()) {
        out.push_back(slice_segment(s, interval));
    }
    if (batch.has_labels()) {
        return TensorBatch(std::move(out), batch.labels());
    }
    return TensorBatch(std::move(out));
}

std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) {
        throw InvalidArgument("cannot format value");
    }
    return std::string(buf, ptr);
}

void write_csv_header(std::ostream& out, std::size_t width) {
    out << "id,label";
    for (std::size_t i = 0; i < width; ++i) {
        out << ",v" << i;
    }
    out << '\n';
}

void write_record(std::ostream& out, const SampleRecord& record) {
    out << record.id << ',';
    if (record.label) {
        out << *record.label;
    }
    for (const double v : record.values) {
        out << ',' << format_double(v);
    }
    out << '\n';
}

bool is_header_line(std::string_view line) {
    return line.rfind("id,label", 0) == 0;
}

SampleRecord parse_record(std::string_view line, std::size_t expected_width) {
    line = trim_cr(line);
    SampleRecord rec;
    std::size_t field = 0;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto token = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (field == 0) {
            rec.id = std::string(token);
        } else if (field == 1) {
            if (!token.empty()) {
                rec.label = parse_number<int>(token, "label");
            }
        } else {
            rec.values.push_back(parse_number<double>(token, "value"));
        }
        ++field;
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    if (field < 3) {
        throw InvalidArgument("sample record needs id, label and at least one value");
    }
    if (expected_width != 0 && rec.values.size() != expected_width) {
        throw DimensionError("sample record '" + rec.id + "' has " + std::to_string(rec.values.size()) +
                             " values, expected " + std::to_string(expected_width));
    }
    return rec;
}

void write_samples_csv(std::ostream& out, const TensorBatch& batch, std::string_view id_prefix) {
    write_csv_header(out, batch.channels() * batch.points());
    for (std::size_t m = 0; m < batch.size(); ++m) {
        const Vector flat = flatten(batch[m]);
        SampleRecord rec{std::string(id_prefix) + std::to_string(m), std::nullopt,
                         std::vector<double>(flat.data(), flat.data() + flat.size())};
        if (batch.has_labels()) {
            rec.label = batch.labels()[m];
        }
        write_record(out, rec);
    }
}

SampleTable read_samples_csv(std::istream& in, std::size_t channels) {
    if (channels < 1) {
        throw InvalidArgument("channel count must be >= 1");
    }
    std::string line;
    if (!std::getline(in, line) || !is_header_line(trim_cr(line))) {
        throw InvalidArgument("sample CSV must start with an 'id,label,v0,...' header");
    }
    const auto width = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) - 1;
    if (width == 0 || width % channels != 0) {
        throw DimensionError("CSV has " + std::to_string(width) + " values per row, not a multiple of C = " +
                             std::to_string(channels));
    }
    const std::size_t points = width / channels;
    SampleTable table;
    std::vector<Sample> samples;
    std::vector<int> labels;
    bool all_labeled = true;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_cr(line).empty()) {
            continue;
        }
        SampleRecord rec;
        try {
            rec = parse_record(line, width);
        } catch (const Error& e) {
            throw InvalidArgument("line " + std::to_string(line_no) + ": " + e.what());
        }
        all_labeled = all_labeled && rec.label.has_value();
        labels.push_back(rec.label.value_or(0));
        table.ids.push_back(rec.id);
        samples.push_back(Sample::from_flat(channels, points, rec.values));
    }
    if (all_labeled && !samples.empty()) {
        table.batch = TensorBatch(std::move(samples), std::move(labels));
    } else {
        table.batch = TensorBatch(std::move(samples));
    }
    return table;
}

Sample prepare_sample(const ModelFile& model, const Sample& raw) {
    if (raw.channels() != model.extractor.channels() || raw.points() != model.raw_points) {
        throw DimensionError("sample is " + std::to_string(raw.channels()) + "x" + std::to_string(raw.points()) +
                             ", model expects raw " + std::to_string(model.extractor.channels()) + "x" +
                             std::to_string(model.raw_points));
    }
    return model.segment ? slice_segment(raw, *model.segment) : raw;
}

std::string serialize_model(const ModelFile& model) {
    json content;
    content["extractor"] = extractor_json(model.extractor);
    content["chart"] = chart_json(model.chart);
    content["raw_points"] = model.raw_points;
    content["segment"] = model.segment ? json{{"lo", model.segment->lo}, {"hi", model.segment->hi}} : json(nullptr);
    content["simulation"] = model.simulation ? sim_json(*model.simulation) : json(nullptr);
    const std::string body = content.dump();
    json doc;
    doc["format"] = "mcmon-model";
    doc["format_version"] = kModelFormatVersion;
    doc["checksum"] = checksum(body);
    doc["content"] = std::move(content);
    return doc.dump(1) + "\n";
}

ModelFile deserialize_model(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error&) {
        throw ModelFileError(ModelFileError::Kind::Checksum, "model file is truncated or corrupt (checksum failure)");
    }
    try {
        if (doc.at("format").get<std::string>() != "mcmon-model") {
            throw ModelFileError(ModelFileError::Kind::Format, "not an mcmon model file");
        }
        const int version = doc.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ModelFileError(ModelFileError::Kind::Version,
                                 "model file format version " + std::to_string(version) +
                                     " is not supported (this build reads version " +
                                     std::to_string(kModelFormatVersion) + ")");
        }
        const json& content = doc.at("content");
        if (checksum(content.dump()) != doc.at("checksum").get<std::string>()) {
            throw ModelFileError(ModelFileError::Kind::Checksum, "model file checksum mismatch");
        }
        ModelFile model{extractor_from(content.at("extractor")), chart_from(content.at("chart")),
                        content.at("raw_points").get<std::size_t>(), std::nullopt, std::nullopt};
        if (!content.at("segment").is_null()) {
            model.segment = SegmentInterval{content["segment"].at("lo").get<std::size_t>(),
                                            content["segment"].at("hi").get<std::size_t>()};
            model.segment->validate(model.raw_points);
            if (model.segment->length() != model.extractor.points()) {
                throw ModelFileError(ModelFileError::Kind::Format, "stored segment does not match extractor width");
            }
        } else if (model.raw_points != model.extractor.points()) {
            throw ModelFileError(ModelFileError::Kind::Format, "raw width does not match extractor width");
        }
        if (!content.at("simulation").is_null()) {
            model.simulation = sim_from(content["simulation"]);
        }
        if (model.chart.dimension() != model.extractor.feature_count()) {
            throw ModelFileError(ModelFileError::Kind::Format, "chart dimension does not match extractor features");
        }
        return model;
    } catch (const json::exception& e) {
        throw ModelFileError(ModelFileError::Kind::Format, std::string("malformed model file: ") + e.what());
    }
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    const std::string text = serialize_model(model);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) {
        throw ModelFileError(ModelFileError::Kind::Io, "cannot write model file " + path.string());
    }
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelFileError(ModelFileError::Kind::Io, "cannot read model file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_model(buf.str());
}

} // namespace mcmon

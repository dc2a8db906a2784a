#include "mcmon/error.hpp"
#include "mcmon/io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace mcmon;
using testing_support::labeled_gaussian;
using testing_support::random_sample;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("mcmon_io_" + name);
}

ModelFile trained_model(Method method, std::optional<SegmentInterval> segment = std::nullopt) {
    std::mt19937_64 rng(41);
    const TensorBatch raw = labeled_gaussian(rng, 4, 20, 3, 25, 1.0);
    const TensorBatch batch = segment ? slice_segment(raw, *segment) : raw;
    Extractor ex = train_extractor(batch, method, 3);
    std::vector<Vector> rows;
    const TensorBatch in_control = batch.with_label(0);
    for (const auto& s : in_control.samples()) {
        rows.push_back(ex.extract(s));
    }
    T2Chart chart = phase1_fit(stack_rows(rows), 0.01);
    return ModelFile{std::move(ex), std::move(chart), 20, segment, SimConfig::standard(NoiseNotation::StdDev, 1.0, 20)};
}

} // namespace

TEST(Segment, PublishedInterval) {
    const Sample s(4, 1200);
    const auto seg = parse_segment("297:447");
    EXPECT_EQ(slice_segment(s, seg).points(), 151u);
}

TEST(Segment, FullAndSinglePoint) {
    std::mt19937_64 rng(42);
    const Sample s = random_sample(rng, 3, 9);
    EXPECT_TRUE(slice_segment(s, SegmentInterval{1, 9}) == s);
    const Sample one = slice_segment(s, SegmentInterval{4, 4});
    ASSERT_EQ(one.points(), 1u);
    EXPECT_EQ(one(2, 0), s(2, 3));
}

TEST(Segment, RejectsBadIntervals) {
    const Sample s(2, 10);
    EXPECT_THROW(slice_segment(s, SegmentInterval{0, 3}), InvalidArgument);
    EXPECT_THROW(slice_segment(s, SegmentInterval{5, 11}), InvalidArgument);
    EXPECT_THROW(slice_segment(s, SegmentInterval{6, 5}), InvalidArgument);
    EXPECT_THROW(parse_segment("12"), InvalidArgument);
    EXPECT_THROW(parse_segment("a:3"), InvalidArgument);
}

TEST(Csv, RoundTripIsExact) {
    std::mt19937_64 rng(43);
    std::vector<Sample> samples;
    for (int m = 0; m < 6; ++m) {
        samples.push_back(random_sample(rng, 3, 5, 1e3));
    }
    RowMatrix edge(3, 5);
    edge.setConstant(0.1);
    edge(0, 0) = std::numeric_limits<double>::denorm_min();
    edge(1, 1) = -std::numeric_limits<double>::max();
    edge(2, 2) = 1.0 / 3.0;
    samples.emplace_back(edge);
    const TensorBatch batch(samples, std::vector<int>{0, 1, 1, 0, 2, 2, 0});

    std::stringstream io;
    write_samples_csv(io, batch);
    const auto table = read_samples_csv(io, 3);
    ASSERT_EQ(table.batch.size(), batch.size());
    EXPECT_EQ(table.batch.labels(), batch.labels());
    EXPECT_EQ(table.ids.front(), "s0");
    for (std::size_t m = 0; m < batch.size(); ++m) {
        EXPECT_TRUE(table.batch[m] == batch[m]);
    }
}

TEST(Csv, FieldCountAndEmptyLabel) {
    std::ostringstream os;
    write_record(os, SampleRecord{"x", std::nullopt, {1.5, -2.0, 3.0, 4.0}});
    const std::string line = os.str();
    EXPECT_EQ(line, "x,,1.5,-2,3,4\n");
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
    const auto rec = parse_record(line.substr(0, line.size() - 1), 4);
    EXPECT_FALSE(rec.label.has_value());
    EXPECT_EQ(rec.values[1], -2.0);
    EXPECT_THROW(parse_record("x,,1,2", 4), DimensionError);
}

TEST(Csv, UnlabeledRowsDropLabels) {
    std::istringstream in("id,label,v0,v1\na,0,1,2\nb,,3,4\n");
    const auto t = read_samples_csv(in, 1);
    EXPECT_FALSE(t.batch.has_labels());
    EXPECT_EQ(t.batch.points(), 2u);
}

TEST(Csv, WidthMustDivideChannels) {
    std::istringstream in("id,label,v0,v1,v2\na,,1,2,3\n");
    EXPECT_THROW(read_samples_csv(in, 2), DimensionError);
}

class ModelRoundTrip : public ::testing::TestWithParam<Method> {};

TEST_P(ModelRoundTrip, BitIdenticalFeaturesAndT2) {
    const ModelFile model = trained_model(GetParam());
    const auto path = temp_path("model_" + to_string(GetParam()) + ".json");
    save_model(model, path);
    const ModelFile back = load_model(path);
    std::filesystem::remove(path);

    EXPECT_EQ(back.extractor.method(), GetParam());
    EXPECT_EQ(back.chart.ucl(), model.chart.ucl());
    EXPECT_EQ(back.chart.convention(), model.chart.convention());
    ASSERT_TRUE(back.simulation.has_value());
    EXPECT_EQ(back.simulation->noise_sd, model.simulation->noise_sd);
    std::mt19937_64 rng(44);
    for (int i = 0; i < 100; ++i) {
        const Sample probe = random_sample(rng, 4, 20, 2.0);
        const Vector a = model.extractor.extract(probe);
        const Vector b = back.extractor.extract(probe);
        ASSERT_EQ(a, b);
        ASSERT_EQ(t2_statistic(model.chart, a), t2_statistic(back.chart, b));
    }
}

INSTANTIATE_TEST_SUITE_P(Methods, ModelRoundTrip,
                         ::testing::Values(Method::Umlda, Method::Umpca, Method::Mpca, Method::Vpca),
                         [](const auto& info) { return to_string(info.param); });

TEST(ModelFile, SegmentIsStoredAndApplied) {
    const ModelFile model = trained_model(Method::Vpca, SegmentInterval{5, 14});
    const ModelFile back = deserialize_model(serialize_model(model));
    ASSERT_TRUE(back.segment.has_value());
    EXPECT_EQ(back.segment->lo, 5u);
    EXPECT_EQ(back.segment->hi, 14u);
    std::mt19937_64 rng(45);
    const Sample raw = random_sample(rng, 4, 20);
    EXPECT_EQ(prepare_sample(back, raw).points(), 10u);
    EXPECT_THROW(prepare_sample(back, random_sample(rng, 4, 10)), DimensionError);
}

TEST(ModelFile, TruncationIsChecksumFailure) {
    const std::string text = serialize_model(trained_model(Method::Umlda));
    for (const double frac : {0.1, 0.5, 0.99}) {
        try {
            deserialize_model(std::string_view(text).substr(0, static_cast<std::size_t>(frac * text.size())));
            FAIL();
        } catch (const ModelFileError& e) {
            EXPECT_EQ(e.kind(), ModelFileError::Kind::Checksum);
        }
    }
}

TEST(ModelFile, AlteredContentIsChecksumFailure) {
    std::string text = serialize_model(trained_model(Method::Vpca));
    const auto pos = text.find("\"ucl\": ");
    ASSERT_NE(pos, std::string::npos);
    text.insert(pos + 7, "1");
    try {
        deserialize_model(text);
        FAIL();
    } catch (const ModelFileError& e) {
        EXPECT_EQ(e.kind(), ModelFileError::Kind::Checksum);
    }
}

TEST(ModelFile, VersionMismatchNamesBoth) {
    std::string text = serialize_model(trained_model(Method::Mpca));
    const std::string key = "\"format_version\": 1";
    const auto pos = text.find(key);
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, key.size(), "\"format_version\": 2");
    try {
        deserialize_model(text);
        FAIL();
    } catch (const ModelFileError& e) {
        EXPECT_EQ(e.kind(), ModelFileError::Kind::Version);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("version 2"), std::string::npos);
        EXPECT_NE(msg.find("version 1"), std::string::npos);
    }
}

TEST(ModelFile, MissingFileIsIoError) {
    try {
        load_model(temp_path("does_not_exist.json"));
        FAIL();
    } catch (const ModelFileError& e) {
        EXPECT_EQ(e.kind(), ModelFileError::Kind::Io);
    }
}

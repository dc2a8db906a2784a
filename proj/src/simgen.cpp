#include "mcmon/simgen.hpp"

#include "mcmon/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mcmon {

namespace {

// Breakpoints, heights and widths of the canonical Donoho-Johnstone tables.
constexpr std::array<double, 11> kPositions = {0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<double, 11> kBlockHeights = {4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
constexpr std::array<double, 11> kBumpHeights = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<double, 11> kBumpWidths = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                                0.01,  0.01,  0.005, 0.008, 0.005};

double sgn(double x) {
    return static_cast<double>((x > 0.0) - (x < 0.0));
}

double blocks(double t) {
    double v = 0.0;
    for (std::size_t j = 0; j < kPositions.size(); ++j) {
        v += kBlockHeights[j] * (1.0 + sgn(t - kPositions[j])) / 2.0;
    }
    return v;
}

double bumps(double t) {
    double v = 0.0;
    for (std::size_t j = 0; j < kPositions.size(); ++j) {
        v += kBumpHeights[j] * std::pow(1.0 + std::abs((t - kPositions[j]) / kBumpWidths[j]), -4.0);
    }
    return v;
}

double heavy_sine(double t) {
    return 4.0 * std::sin(4.0 * std::numbers::pi * t) - sgn(t - 0.3) - sgn(0.72 - t);
}

} // namespace

BenchmarkSignal gen_benchmark(Benchmark kind, std::size_t points) {
    if (points < 8) {
        throw InvalidArgument("benchmark signals need K >= 8, got " + std::to_string(points));
    }
    Vector values(static_cast<Eigen::Index>(points));
    for (std::size_t k = 1; k <= points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(points);
        double v = 0.0;
        switch (kind) {
        case Benchmark::Blocks: v = blocks(t); break;
        case Benchmark::HeavySine: v = heavy_sine(t); break;
        case Benchmark::Bumps: v = bumps(t); break;
        }
        values(static_cast<Eigen::Index>(k - 1)) = v;
    }
    return {kind, std::move(values)};
}

Signals Signals::standard(std::size_t points) {
    return Signals{{gen_benchmark(Benchmark::Blocks, points).values, gen_benchmark(Benchmark::HeavySine, points).values,
                    gen_benchmark(Benchmark::Bumps, points).values}};
}

SimConfig SimConfig::standard(NoiseNotation notation, double k7_mean, std::size_t points) {
    SimConfig c;
    c.k_mean.resize(kParameters);
    c.k_mean << 0.2, 1.5, 0.5, 1.0, 0.7, 0.8, k7_mean;
    c.k_var.resize(kParameters);
    c.k_var << 0.08, 0.015, 0.05, 0.01, 0.09, 0.03, 0.06;
    const double sd = notation == NoiseNotation::Variance ? std::sqrt(0.5) : 0.5;
    c.noise_sd = Vector::Constant(kChannels, sd);
    c.points = points;
    c.validate();
    return c;
}

void SimConfig::validate() const {
    if (k_mean.size() != static_cast<Eigen::Index>(kParameters) ||
        k_var.size() != static_cast<Eigen::Index>(kParameters) ||
        noise_sd.size() != static_cast<Eigen::Index>(kChannels)) {
        throw DimensionError("simulation config needs 7 parameter means, 7 variances and 4 noise levels");
    }
    if (!k_mean.allFinite() || !k_var.allFinite() || !noise_sd.allFinite()) {
        throw InvalidArgument("simulation config contains non-finite values");
    }
    if ((k_var.array() < 0.0).any()) {
        throw InvalidArgument("parameter variances must be non-negative");
    }
    if ((noise_sd.array() <= 0.0).any()) {
        throw InvalidArgument("noise standard deviations must be positive");
    }
    if (points < 8) {
        throw InvalidArgument("simulation needs K >= 8");
    }
}

int target_count(int scenario) {
    switch (scenario) {
    case 1:
    case 2:
    case 3: return 3;
    case 4: return 7;
    case 5: return 4;
    default: throw InvalidArgument("fault scenario must be 1..5, got " + std::to_string(scenario));
    }
}

void FaultSpec::validate() const {
    const int targets = target_count(scenario);
    if (target < 1 || target > targets) {
        throw InvalidArgument("scenario " + std::to_string(scenario) + " target must be 1.." +
                              std::to_string(targets) + ", got " + std::to_string(target));
    }
    if (!std::isfinite(delta)) {
        throw InvalidArgument("fault magnitude must be finite");
    }
}

std::array<double, 5> paper_delta_grid(int scenario) {
    target_count(scenario);
    if (scenario <= 3) {
        return {0.01, 0.03, 0.05, 0.07, 0.09};
    }
    return {0.1, 0.3, 0.5, 0.7, 0.9};
}

double signal_sd(const Vector& x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double mean = x.mean();
    return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
}

Vector unit_sine(std::size_t points) {
    Vector y(static_cast<Eigen::Index>(points));
    for (std::size_t k = 1; k <= points; ++k) {
        y(static_cast<Eigen::Index>(k - 1)) =
            0.5 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points));
    }
    return y;
}

Process apply_fault(const SimConfig& config, const Signals& signals, const FaultSpec& spec) {
    spec.validate();
    Process out{config, signals};
    if (spec.delta == 0.0) {
        return out;
    }
    switch (spec.scenario) {
    case 1: {
        auto& x = out.signals(spec.target);
        x.array() += spec.delta * signal_sd(signals(spec.target));
        break;
    }
    case 2: {
        auto& x = out.signals(spec.target);
        x += spec.delta * signal_sd(signals(spec.target)) * unit_sine(static_cast<std::size_t>(x.size()));
        break;
    }
    case 3: {
        auto& x = out.signals(spec.target);
        const auto k_total = static_cast<std::size_t>(x.size());
        for (std::size_t k = 1; k <= k_total; ++k) {
            if (8 * k > 5 * k_total && 8 * k <= 6 * k_total) {
                x(static_cast<Eigen::Index>(k - 1)) -= spec.delta;
            }
        }
        break;
    }
    case 4: out.config.k_mean(spec.target - 1) += spec.delta; break;
    case 5: out.config.noise_sd(spec.target - 1) += spec.delta; break;
    }
    out.config.validate();
    return out;
}

Sample generate_sample(const SimConfig& config, const Signals& signals, Rng& rng) {
    const auto k_len = static_cast<Eigen::Index>(config.points);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<double, SimConfig::kParameters> k{};
    for (std::size_t j = 0; j < SimConfig::kParameters; ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        k[j] = config.k_mean(idx) + std::sqrt(config.k_var(idx)) * normal(rng);
    }
    const auto& x1 = signals(1).array();
    const auto& x2 = signals(2).array();
    const auto& x3 = signals(3).array();
    RowMatrix values(static_cast<Eigen::Index>(SimConfig::kChannels), k_len);
    values.row(0) = (k[0] * x1 + k[1] * x2).matrix().transpose();
    values.row(1) = (k[2] * x1.square() + k[3] * x3).matrix().transpose();
    values.row(2) = (k[4] * x2.square() + k[5] * x3.square()).matrix().transpose();
    values.row(3) = (k[6] * x1 * x2).matrix().transpose();
    for (Eigen::Index c = 0; c < values.rows(); ++c) {
        const double sd = config.noise_sd(c);
        for (Eigen::Index i = 0; i < k_len; ++i) {
            values(c, i) += sd * normal(rng);
        }
    }
    return Sample(std::move(values));
}

TensorBatch generate_batch(const SimConfig& config, const Signals& signals, std::size_t count, std::uint64_t seed) {
    config.validate();
    for (int i = 1; i <= 3; ++i) {
        if (static_cast<std::size_t>(signals(i).size()) != config.points) {
            throw DimensionError("signal length does not match the configured K");
        }
    }
    std::vector<Sample> samples;
    samples.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
        Rng rng = substream(seed, {m});
        samples.push_back(generate_sample(config, signals, rng));
    }
    return TensorBatch(std::move(samples));
}

TensorBatch generate_batch(const SimConfig& config, std::size_t count, std::uint64_t seed) {
    return generate_batch(config, Signals::standard(config.points), count, seed);
}

DatasetFaults default_dataset_faults() {
    DatasetFaults faults;
    for (int s = 1; s <= 5; ++s) {
        faults[static_cast<std::size_t>(s - 1)] = FaultSpec{s, 1, paper_delta_grid(s).back()};
    }
    return faults;
}

std::uint64_t class_seed(std::uint64_t seed, int label) {
    return substream_seed(seed, {0x6c6162656cULL, static_cast<std::uint64_t>(label)});
}

LabeledDataset generate_labeled_dataset(const SimConfig& config, std::size_t per_class, std::uint64_t seed,
                                        const DatasetFaults& faults) {
    if (per_class < 1) {
        throw InvalidArgument("labeled dataset needs at least one sample per class");
    }
    const Signals base = Signals::standard(config.points);
    std::vector<Sample> samples;
    std::vector<int> labels;
    samples.reserve(6 * per_class);
    labels.reserve(6 * per_class);
    for (int label = 0; label <= 5; ++label) {
        Process process{config, base};
        if (label > 0) {
            const auto& spec = faults[static_cast<std::size_t>(label - 1)];
            if (spec.scenario != label) {
                throw InvalidArgument("dataset fault " + std::to_string(label) + " must use scenario " +
                                      std::to_string(label));
            }
            process = apply_fault(config, base, spec);
        }
        auto part = generate_batch(process.config, process.signals, per_class, class_seed(seed, label));
        for (const auto& s : part.samples()) {
            samples.push_back(s);
            labels.push_back(label);
        }
    }
    return LabeledDataset{TensorBatch(std::move(samples), std::move(labels))};
}

} // namespace mcmon

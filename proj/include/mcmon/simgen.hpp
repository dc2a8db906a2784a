#pragma once

#include "mcmon/rng.hpp"
#include "mcmon/tensor.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mcmon {

enum class Benchmark { Blocks, HeavySine, Bumps };

struct BenchmarkSignal {
    Benchmark kind;
    Vector values;
};

// Donoho-Johnstone test signal on the grid t_k = k/K, k = 1..K.
BenchmarkSignal gen_benchmark(Benchmark kind, std::size_t points);

// The three base signals x1 = Blocks, x2 = HeavySine, x3 = Bumps.
struct Signals {
    std::array<Vector, 3> x;

    static Signals standard(std::size_t points);

    // 1-based signal index, as used by fault targets.
    const Vector& operator()(int i) const { return x.at(static_cast<std::size_t>(i - 1)); }
    Vector& operator()(int i) { return x.at(static_cast<std::size_t>(i - 1)); }
};

// How the "N(0, 0.5)" noise term is read: 0.5 as a variance or as a standard deviation.
enum class NoiseNotation { Variance, StdDev };

struct SimConfig {
    Vector k_mean;   // 7 model-parameter means
    Vector k_var;    // 7 model-parameter variances (diagonal covariance)
    Vector noise_sd; // 4 per-channel noise standard deviations
    std::size_t points = 128;

    static constexpr std::size_t kChannels = 4;
    static constexpr std::size_t kParameters = 7;

    // Defaults of the four-channel mixing study. The seventh parameter mean is
    // `k7_mean` since only six means are published.
    static SimConfig standard(NoiseNotation notation = NoiseNotation::Variance, double k7_mean = 1.0,
                              std::size_t points = 128);

    void validate() const;
};

struct FaultSpec {
    int scenario = 1; // 1..5
    int target = 1;   // signal 1..3 (scenarios 1-3), parameter 1..7 (4), channel 1..4 (5)
    double delta = 0.0;

    void validate() const;
};

// Number of legal targets for a scenario: 3, 3, 3, 7, 4.
int target_count(int scenario);

// The five published fault magnitudes for a scenario.
std::array<double, 5> paper_delta_grid(int scenario);

struct Process {
    SimConfig config;
    Signals signals;
};

// Sample standard deviation (n - 1 denominator) of a signal.
double signal_sd(const Vector& x);

// One period of a sine over K points with peak-to-peak 1: 0.5 sin(2 pi k / K), k = 1..K.
Vector unit_sine(std::size_t points);

Process apply_fault(const SimConfig& config, const Signals& signals, const FaultSpec& spec);

// Draws one 4 x K sample from `rng`: parameters first, then channel-major noise.
Sample generate_sample(const SimConfig& config, const Signals& signals, Rng& rng);

// Sample m is drawn from substream (seed, m), so it does not depend on M.
TensorBatch generate_batch(const SimConfig& config, const Signals& signals, std::size_t count, std::uint64_t seed);
TensorBatch generate_batch(const SimConfig& config, std::size_t count, std::uint64_t seed);

// One representative fault per scenario, in scenario order.
using DatasetFaults = std::array<FaultSpec, 5>;

// Target 1 of each scenario at the top of its published delta grid.
DatasetFaults default_dataset_faults();

struct LabeledDataset {
    TensorBatch batch; // labels: 0 = in control, 1..5 = fault scenario

    const std::vector<int>& labels() const { return batch.labels(); }
};

// Seed of the class-`label` sub-batch of a labeled dataset.
std::uint64_t class_seed(std::uint64_t seed, int label);

// 6 * per_class samples; class c > 0 is drawn from the process faulted by faults[c - 1].
LabeledDataset generate_labeled_dataset(const SimConfig& config, std::size_t per_class, std::uint64_t seed,
                                        const DatasetFaults& faults = default_dataset_faults());

} // namespace mcmon

#pragma once

#include "mcmon/chart.hpp"
#include "mcmon/extractor.hpp"
#include "mcmon/simgen.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcmon {

struct RunLength {
    std::size_t length = 0; // 1-based index of the first alarm, or the horizon
    bool censored = false;  // no alarm within the horizon
};

// Run length over a finite stream; the horizon is the stream length.
RunLength run_length(const T2Chart& chart, const Extractor& extractor, std::span<const Sample> stream);

// Run length over a lazily generated stream; `next(i)` yields sample i (0-based).
RunLength run_length(const T2Chart& chart, const Extractor& extractor, const std::function<Sample(std::size_t)>& next,
                     std::size_t horizon);

struct ArlEstimate {
    double mean_rl = 0.0;
    double std_err = 0.0;
    std::size_t replications = 0;
    std::size_t censored = 0;
};

enum class LimitSource {
    Estimated, // Phase I on a fresh in-control batch
    Known,     // exact in-control feature moments of the simulation model, chi-square limit
};

struct ArlOptions {
    LimitSource limits = LimitSource::Estimated;
    LimitConvention convention = LimitConvention::ScaledF;
    std::size_t phase1_samples = 1000;
    std::size_t train_per_class = 200;
    DatasetFaults training_faults = default_dataset_faults();
    TrainOptions train;
};

// A trained extractor paired with its chart.
struct MonitoringSetup {
    Extractor extractor;
    T2Chart chart;
};

// Chart from the exact in-control mean and covariance of the extractor's
// features under `config`, with the chi-square limit.
T2Chart known_parameter_chart(const Extractor& extractor, const SimConfig& config, double alpha);

// Trains `method` on a labeled simulated dataset and builds its chart. When
// `focus` is given, that scenario's training class uses the focus target.
MonitoringSetup build_setup(const SimConfig& base, Method method, std::size_t features, double alpha,
                            std::uint64_t seed, const ArlOptions& options = {},
                            const std::optional<FaultSpec>& focus = std::nullopt);

// Replication r monitors a stream whose sample i comes from substream
// (seed, r, i) of the (optionally faulted) process. Streams therefore match
// across methods and fault magnitudes for a fixed seed.
ArlEstimate run_arl(const MonitoringSetup& setup, const SimConfig& base, const std::optional<FaultSpec>& fault,
                    std::size_t reps, std::size_t horizon, std::uint64_t seed);

ArlEstimate estimate_arl(const SimConfig& base, const std::optional<FaultSpec>& fault, Method method,
                         std::size_t features, double alpha, std::size_t reps, std::size_t horizon, std::uint64_t seed,
                         const ArlOptions& options = {});

struct ArlRow {
    int scenario = 0;
    int target = 0;
    double delta = 0.0;
    Method method = Method::Umlda;
    std::size_t features = 0;
    ArlEstimate estimate;
};

struct SweepRequest {
    std::vector<int> scenarios;
    std::optional<int> target;           // all targets when unset
    std::optional<std::vector<double>> deltas; // published grid when unset
    std::vector<Method> methods;
    std::size_t features = 4;
    double alpha = 0.01;
    std::size_t reps = 1000;
    std::size_t horizon = 10000;
    std::uint64_t seed = 1;
    ArlOptions options;
};

// ARL over scenario x target x delta for each method. One setup is trained
// per (method, scenario, target) and reused for every delta.
std::vector<ArlRow> evaluate_sweep(const SimConfig& base, const SweepRequest& request);

struct ComparisonRow {
    Method method = Method::Umlda;
    std::size_t detected = 0;
    std::size_t total_faulty = 0;
    double mean_monitor_time = 0.0; // seconds per sample
};

// Trains each method on the dataset, fits Phase I on class-0 features and
// counts alarms on every fault-class sample. Timing covers monitoring only.
std::vector<ComparisonRow> compare_methods(const LabeledDataset& dataset, std::span<const Method> methods,
                                           std::size_t features, double alpha,
                                           LimitConvention convention = LimitConvention::ScaledF,
                                           const TrainOptions& train = {});

} // namespace mcmon

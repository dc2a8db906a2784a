#include "mcmon/evalharness.hpp"

#include "mcmon/error.hpp"

#include <chrono>
#include <cmath>

namespace mcmon {

namespace {

// Substream tags under the master seed.
constexpr std::uint64_t kTrainTag = 0x747261696eULL;
constexpr std::uint64_t kPhase1Tag = 0x7068617365ULL;
constexpr std::uint64_t kStreamTag = 0x73747265616dULL;

// Process-space basis tensor multiplied by model parameter j (0-based).
Sample parameter_basis(const Signals& s, std::size_t points, int j) {
    RowMatrix b = RowMatrix::Zero(static_cast<Eigen::Index>(SimConfig::kChannels), static_cast<Eigen::Index>(points));
    const auto x1 = s(1).array();
    const auto x2 = s(2).array();
    const auto x3 = s(3).array();
    switch (j) {
    case 0: b.row(0) = x1.matrix().transpose(); break;
    case 1: b.row(0) = x2.matrix().transpose(); break;
    case 2: b.row(1) = x1.square().matrix().transpose(); break;
    case 3: b.row(1) = x3.matrix().transpose(); break;
    case 4: b.row(2) = x2.square().matrix().transpose(); break;
    case 5: b.row(2) = x3.square().matrix().transpose(); break;
    case 6: b.row(3) = (x1 * x2).matrix().transpose(); break;
    default: break;
    }
    return Sample(std::move(b));
}

} // namespace

RunLength run_length(const T2Chart& chart, const Extractor& extractor, const std::function<Sample(std::size_t)>& next,
                     std::size_t horizon) {
    if (horizon < 1) {
        throw InvalidArgument("run length needs a non-empty stream");
    }
    for (std::size_t i = 0; i < horizon; ++i) {
        if (monitor_sample(chart, extractor, next(i)).status == Status::OutOfControl) {
            return {i + 1, false};
        }
    }
    return {horizon, true};
}

RunLength run_length(const T2Chart& chart, const Extractor& extractor, std::span<const Sample> stream) {
    return run_length(
        chart, extractor, [&](std::size_t i) { return stream[i]; }, stream.size());
}

T2Chart known_parameter_chart(const Extractor& extractor, const SimConfig& config, double alpha) {
    config.validate();
    if (extractor.channels() != SimConfig::kChannels || extractor.points() != config.points) {
        throw DimensionError("extractor shape does not match the simulation config");
    }
    const Signals signals = Signals::standard(config.points);
    const Sample origin = extractor.mean_sample();
    const Vector at_origin = extractor.extract(origin);
    const auto linear = [&](const Sample& direction) {
        return Vector(extractor.extract(Sample(RowMatrix(origin.values() + direction.values()))) - at_origin);
    };

    RowMatrix expected = RowMatrix::Zero(static_cast<Eigen::Index>(SimConfig::kChannels),
                                         static_cast<Eigen::Index>(config.points));
    const auto j_dim = static_cast<Eigen::Index>(extractor.feature_count());
    Matrix cov = Matrix::Zero(j_dim, j_dim);
    for (int j = 0; j < static_cast<int>(SimConfig::kParameters); ++j) {
        const Sample basis = parameter_basis(signals, config.points, j);
        expected += config.k_mean(j) * basis.values();
        const Vector a = linear(basis);
        cov.noalias() += config.k_var(j) * a * a.transpose();
    }
    for (std::size_t c = 0; c < SimConfig::kChannels; ++c) {
        const double var = config.noise_sd(static_cast<Eigen::Index>(c)) * config.noise_sd(static_cast<Eigen::Index>(c));
        for (std::size_t k = 0; k < config.points; ++k) {
            Sample unit(SimConfig::kChannels, config.points);
            RowMatrix e = unit.values();
            e(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = 1.0;
            const Vector a = linear(Sample(std::move(e)));
            cov.noalias() += var * a * a.transpose();
        }
    }
    return T2Chart(extractor.extract(Sample(std::move(expected))), cov, alpha, 0, LimitConvention::ChiSquare);
}

MonitoringSetup build_setup(const SimConfig& base, Method method, std::size_t features, double alpha,
                            std::uint64_t seed, const ArlOptions& options, const std::optional<FaultSpec>& focus) {
    DatasetFaults faults = options.training_faults;
    if (focus) {
        focus->validate();
        faults[static_cast<std::size_t>(focus->scenario - 1)].target = focus->target;
    }
    const auto dataset = generate_labeled_dataset(base, options.train_per_class, substream_seed(seed, {kTrainTag}), faults);
    Extractor extractor = train_extractor(dataset.batch, method, features, options.train);

    if (options.limits == LimitSource::Known) {
        T2Chart chart = known_parameter_chart(extractor, base, alpha);
        return MonitoringSetup{std::move(extractor), std::move(chart)};
    }
    const auto phase1 = generate_batch(base, options.phase1_samples, substream_seed(seed, {kPhase1Tag}));
    std::vector<Vector> rows;
    rows.reserve(phase1.size());
    for (const auto& s : phase1.samples()) {
        rows.push_back(extractor.extract(s));
    }
    T2Chart chart = phase1_fit(stack_rows(rows), alpha, options.convention);
    return MonitoringSetup{std::move(extractor), std::move(chart)};
}

ArlEstimate run_arl(const MonitoringSetup& setup, const SimConfig& base, const std::optional<FaultSpec>& fault,
                    std::size_t reps, std::size_t horizon, std::uint64_t seed) {
    if (reps < 1) {
        throw InvalidArgument("ARL estimation needs at least one replication");
    }
    const Signals signals = Signals::standard(base.points);
    const Process process = fault ? apply_fault(base, signals, *fault) : Process{base, signals};
    const std::uint64_t stream_seed = substream_seed(seed, {kStreamTag});

    double sum = 0.0;
    double sum_sq = 0.0;
    ArlEstimate est;
    est.replications = reps;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto rl = run_length(
            setup.chart, setup.extractor,
            [&](std::size_t i) {
                Rng rng = substream(stream_seed, {r, i});
                return generate_sample(process.config, process.signals, rng);
            },
            horizon);
        const auto len = static_cast<double>(rl.length);
        sum += len;
        sum_sq += len * len;
        est.censored += rl.censored ? 1 : 0;
    }
    const auto n = static_cast<double>(reps);
    est.mean_rl = sum / n;
    if (reps > 1) {
        const double var = std::max(0.0, (sum_sq - n * est.mean_rl * est.mean_rl) / (n - 1.0));
        est.std_err = std::sqrt(var / n);
    }
    return est;
}

ArlEstimate estimate_arl(const SimConfig& base, const std::optional<FaultSpec>& fault, Method method,
                         std::size_t features, double alpha, std::size_t reps, std::size_t horizon, std::uint64_t seed,
                         const ArlOptions& options) {
    const auto setup = build_setup(base, method, features, alpha, seed, options, fault);
    return run_arl(setup, base, fault, reps, horizon, seed);
}

std::vector<ArlRow> evaluate_sweep(const SimConfig& base, const SweepRequest& request) {
    std::vector<ArlRow> rows;
    for (const Method method : request.methods) {
        for (const int scenario : request.scenarios) {
            const int targets = target_count(scenario);
            const int first = request.target.value_or(1);
            const int last = request.target.value_or(targets);
            std::vector<double> deltas;
            if (request.deltas) {
                deltas = *request.deltas;
            } else {
                const auto grid = paper_delta_grid(scenario);
                deltas.assign(grid.begin(), grid.end());
            }
            for (int target = first; target <= last; ++target) {
                const FaultSpec focus{scenario, target, 0.0};
                const auto setup = build_setup(base, method, request.features, request.alpha, request.seed,
                                               request.options, focus);
                for (const double delta : deltas) {
                    const FaultSpec fault{scenario, target, delta};
                    rows.push_back(ArlRow{scenario, target, delta, method, request.features,
                                          run_arl(setup, base, fault, request.reps, request.horizon, request.seed)});
                }
            }
        }
    }
    return rows;
}

std::vector<ComparisonRow> compare_methods(const LabeledDataset& dataset, std::span<const Method> methods,
                                           std::size_t features, double alpha, LimitConvention convention,
                                           const TrainOptions& train) {
    const auto& labels = dataset.labels();
    const TensorBatch in_control = dataset.batch.with_label(0);
    std::vector<const Sample*> faulty;
    for (std::size_t m = 0; m < labels.size(); ++m) {
        if (labels[m] != 0) {
            faulty.push_back(&dataset.batch[m]);
        }
    }

    std::vector<ComparisonRow> out;
    for (const Method method : methods) {
        const Extractor extractor = train_extractor(dataset.batch, method, features, train);
        std::vector<Vector> rows;
        rows.reserve(in_control.size());
        for (const auto& s : in_control.samples()) {
            rows.push_back(extractor.extract(s));
        }
        const T2Chart chart = phase1_fit(stack_rows(rows), alpha, convention);

        ComparisonRow row{method, 0, faulty.size(), 0.0};
        const auto start = std::chrono::steady_clock::now();
        for (const Sample* s : faulty) {
            if (monitor_sample(chart, extractor, *s).status == Status::OutOfControl) {
                ++row.detected;
            }
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        row.mean_monitor_time = faulty.empty() ? 0.0 : elapsed.count() / static_cast<double>(faulty.size());
        out.push_back(row);
    }
    return out;
}

} // namespace mcmon

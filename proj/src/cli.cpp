#include "mcmon/cli.hpp"

#include "mcmon/error.hpp"
#include "mcmon/evalharness.hpp"
#include "mcmon/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <ostream>

namespace mcmon::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stream for "-" or a path; owns the file when one is opened.
class InputSource {
public:
    InputSource(const std::string& path, std::istream& fallback) {
        if (path == "-") {
            stream_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
        if (!*file_) {
            throw InvalidArgument("cannot open input '" + path + "'");
        }
        stream_ = file_.get();
    }
    std::istream& get() { return *stream_; }

private:
    std::unique_ptr<std::ifstream> file_;
    std::istream* stream_ = nullptr;
};

class OutputSink {
public:
    OutputSink(const std::string& path, std::ostream& fallback) {
        if (path == "-") {
            stream_ = &fallback;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_) {
            throw InvalidArgument("cannot open output '" + path + "'");
        }
        stream_ = file_.get();
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_ = nullptr;
};

const std::map<std::string, Method> kMethods{
    {"umlda", Method::Umlda}, {"umpca", Method::Umpca}, {"mpca", Method::Mpca}, {"vpca", Method::Vpca}};
const std::map<std::string, LimitConvention> kConventions{
    {"scaled", LimitConvention::ScaledF}, {"raw", LimitConvention::RawF}, {"chi2", LimitConvention::ChiSquare}};
const std::map<std::string, NoiseNotation> kNotations{{"variance", NoiseNotation::Variance},
                                                      {"sd", NoiseNotation::StdDev}};
const std::map<std::string, LimitSource> kLimitSources{{"estimated", LimitSource::Estimated},
                                                       {"known", LimitSource::Known}};

struct SimFlags {
    NoiseNotation notation = NoiseNotation::Variance;
    double k7_mean = 1.0;
    std::size_t points = 128;

    void add_to(CLI::App& app) {
        app.add_option("--noise-notation", notation, "How the published noise level is read: variance or sd")
            ->transform(CLI::CheckedTransformer(kNotations, CLI::ignore_case));
        app.add_option("--k7-mean", k7_mean, "Mean of the seventh model parameter");
        app.add_option("--points", points, "Points per channel")->check(CLI::Range(std::size_t{8}, std::size_t{1} << 20));
    }
    SimConfig config() const { return SimConfig::standard(notation, k7_mean, points); }
};

template <class F>
auto as_usage(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

// --- simulate ---

struct SimulateArgs {
    int scenario = 0;
    int target = 1;
    std::optional<double> delta;
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    bool labeled = false;
    std::string out = "-";
    SimFlags sim;
};

int run_simulate(const SimulateArgs& a, std::ostream& out_default) {
    const SimConfig config = as_usage([&] {
        auto c = a.sim.config();
        c.validate();
        return c;
    });
    std::optional<TensorBatch> batch;
    if (a.labeled) {
        if (a.scenario != 0 || a.delta) {
            throw UsageError("--labeled draws every scenario at its default fault; drop --scenario/--delta");
        }
        batch = generate_labeled_dataset(config, a.samples, a.seed).batch;
    } else if (a.scenario == 0) {
        batch = generate_batch(config, a.samples, a.seed);
    } else {
        if (!a.delta) {
            throw UsageError("--delta is required for a fault scenario");
        }
        const FaultSpec spec{a.scenario, a.target, *a.delta};
        as_usage([&] {
            spec.validate();
            return 0;
        });
        const Process p = apply_fault(config, Signals::standard(config.points), spec);
        batch = generate_batch(p.config, p.signals, a.samples, a.seed);
    }
    OutputSink sink(a.out, out_default);
    write_samples_csv(sink.get(), *batch);
    sink.get().flush();
    return kExitOk;
}

// --- train ---

struct TrainArgs {
    std::string in;
    std::size_t channels = SimConfig::kChannels;
    Method method = Method::Umlda;
    std::size_t features = 4;
    double alpha = 0.01;
    LimitConvention convention = LimitConvention::ScaledF;
    std::optional<std::string> segment;
    std::optional<std::string> phase1;
    UmldaParams umlda;
    std::optional<std::size_t> mpca_p1;
    std::optional<std::size_t> mpca_p2;
    std::string out;
};

Matrix feature_rows(const Extractor& extractor, const TensorBatch& batch) {
    std::vector<Vector> rows;
    rows.reserve(batch.size());
    for (const auto& s : batch.samples()) {
        rows.push_back(extractor.extract(s));
    }
    return stack_rows(rows);
}

int run_train(const TrainArgs& a, std::istream& in, std::ostream& err) {
    const std::optional<SegmentInterval> segment =
        a.segment ? std::optional(as_usage([&] { return parse_segment(*a.segment); })) : std::nullopt;
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0, 1)");
    }

    InputSource source(a.in, in);
    const SampleTable table = read_samples_csv(source.get(), a.channels);
    if (table.batch.empty()) {
        throw InvalidArgument("training file has no samples");
    }
    const std::size_t raw_points = table.batch.points();
    const TensorBatch train = segment ? slice_segment(table.batch, *segment) : table.batch;

    TrainOptions options;
    options.umlda = a.umlda;
    options.umpca.max_iters = a.umlda.max_iters;
    options.umpca.tol = a.umlda.tol;
    options.mpca_p1 = a.mpca_p1;
    options.mpca_p2 = a.mpca_p2;
    Extractor extractor = train_extractor(train, a.method, a.features, options);

    TensorBatch phase1;
    if (a.phase1) {
        InputSource p1(*a.phase1, in);
        const SampleTable t = read_samples_csv(p1.get(), a.channels);
        if (t.batch.points() != raw_points) {
            throw DimensionError("Phase-I file has " + std::to_string(t.batch.points()) +
                                 " points per channel, training file has " + std::to_string(raw_points));
        }
        phase1 = segment ? slice_segment(t.batch, *segment) : t.batch;
    } else if (train.has_labels()) {
        phase1 = train.with_label(0);
    } else {
        phase1 = train;
    }
    if (phase1.empty()) {
        throw InvalidArgument("no in-control samples for Phase I");
    }
    const auto fit = phase1_fit_detailed(feature_rows(extractor, phase1), a.alpha, a.convention);

    ModelFile model{std::move(extractor), fit.chart, raw_points, segment, std::nullopt};
    save_model(model, a.out);
    err << "trained " << to_string(a.method) << " L=" << model.extractor.feature_count()
        << " ucl=" << format_double(model.chart.ucl()) << " phase1_retained=" << fit.retained.size() << "/"
        << phase1.size() << '\n';
    return kExitOk;
}

// --- monitor ---

struct MonitorArgs {
    std::string model;
    std::string in = "-";
    std::string out = "-";
    std::string control_out = "-";
    bool continue_on_fault = false;
};

int run_monitor(const MonitorArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
    const ModelFile model = load_model(a.model);
    InputSource source(a.in, in);
    OutputSink sink(a.out, out);
    OutputSink control(a.control_out, err);
    const std::size_t channels = model.extractor.channels();
    const std::size_t width = channels * model.raw_points;

    std::optional<std::size_t> first_fault;
    std::size_t index = 0;
    std::string line;
    while (std::getline(source.get(), line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (is_header_line(line)) {
            continue;
        }
        const SampleRecord rec = parse_record(line, width);
        const Sample raw = Sample::from_flat(channels, model.raw_points, rec.values);
        const MonitorVerdict v = monitor_sample(model.chart, model.extractor, prepare_sample(model, raw));
        sink.get() << index << ',' << format_double(v.t2) << ',' << format_double(v.ucl) << ',' << to_string(v.status)
                   << std::endl;
        if (v.action == Action::Stop && !first_fault) {
            first_fault = index;
            control.get() << "STOP " << index << std::endl;
            if (!a.continue_on_fault) {
                return kExitFaultStop;
            }
        }
        ++index;
    }
    return first_fault ? kExitFaultStop : kExitOk;
}

// --- evaluate ---

struct EvaluateArgs {
    std::vector<int> scenarios{1, 2, 3, 4, 5};
    std::optional<int> target;
    std::vector<double> deltas;
    std::string delta_grid;
    std::vector<Method> methods{Method::Umlda};
    std::size_t features = 4;
    double alpha = 0.01;
    std::size_t reps = 1000;
    std::size_t horizon = 10000;
    std::uint64_t seed = 1;
    LimitSource limits = LimitSource::Estimated;
    LimitConvention convention = LimitConvention::ScaledF;
    std::size_t phase1_samples = 1000;
    std::size_t train_per_class = 200;
    std::string out = "-";
    SimFlags sim;
};

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
    if (!a.deltas.empty() && !a.delta_grid.empty()) {
        throw UsageError("--delta and --delta-grid are mutually exclusive");
    }
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0, 1)");
    }
    if (a.target) {
        for (const int s : a.scenarios) {
            as_usage([&] {
                FaultSpec{s, *a.target, 0.0}.validate();
                return 0;
            });
        }
    }
    const SimConfig config = as_usage([&] {
        auto c = a.sim.config();
        c.validate();
        return c;
    });

    SweepRequest req;
    req.scenarios = a.scenarios;
    req.target = a.target;
    if (!a.deltas.empty()) {
        req.deltas = a.deltas;
    }
    req.methods = a.methods;
    req.features = a.features;
    req.alpha = a.alpha;
    req.reps = a.reps;
    req.horizon = a.horizon;
    req.seed = a.seed;
    req.options.limits = a.limits;
    req.options.convention = a.convention;
    req.options.phase1_samples = a.phase1_samples;
    req.options.train_per_class = a.train_per_class;

    const auto rows = evaluate_sweep(config, req);
    OutputSink sink(a.out, out);
    auto& os = sink.get();
    os << "scenario,target,delta,method,L,mean_rl,std_err,censored\n";
    for (const auto& r : rows) {
        os << r.scenario << ',' << r.target << ',' << format_double(r.delta) << ',' << to_string(r.method) << ','
           << r.features << ',' << format_double(r.estimate.mean_rl) << ',' << format_double(r.estimate.std_err)
           << ',' << r.estimate.censored << '\n';
    }
    os.flush();
    return kExitOk;
}

// --- compare ---

struct CompareArgs {
    std::optional<std::string> in;
    std::size_t channels = SimConfig::kChannels;
    std::size_t per_class = 100;
    std::uint64_t seed = 1;
    std::vector<Method> methods{Method::Umlda, Method::Umpca, Method::Mpca, Method::Vpca};
    std::size_t features = 4;
    double alpha = 0.01;
    LimitConvention convention = LimitConvention::ScaledF;
    std::string out = "-";
    SimFlags sim;
};

int run_compare(const CompareArgs& a, std::istream& in, std::ostream& out) {
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
        throw UsageError("--alpha must lie in (0, 1)");
    }
    LabeledDataset dataset;
    if (a.in) {
        InputSource source(*a.in, in);
        auto table = read_samples_csv(source.get(), a.channels);
        if (!table.batch.has_labels()) {
            throw InvalidArgument("compare needs a labeled CSV (label 0 = in control)");
        }
        dataset.batch = std::move(table.batch);
    } else {
        const SimConfig config = as_usage([&] {
            auto c = a.sim.config();
            c.validate();
            return c;
        });
        dataset = generate_labeled_dataset(config, a.per_class, a.seed);
    }
    const auto rows = compare_methods(dataset, a.methods, a.features, a.alpha, a.convention);
    OutputSink sink(a.out, out);
    auto& os = sink.get();
    os << "method,detected,total_faulty,mean_monitor_time\n";
    for (const auto& r : rows) {
        os << to_string(r.method) << ',' << r.detected << ',' << r.total_faulty << ','
           << format_double(r.mean_monitor_time) << '\n';
    }
    os.flush();
    return kExitOk;
}

void add_method(CLI::App& app, Method& m) {
    app.add_option("--method", m, "Feature extractor: umlda, umpca, mpca or vpca")
        ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
}

void add_methods(CLI::App& app, std::vector<Method>& m) {
    app.add_option("--method", m, "Feature extractors (repeat or comma-separate)")
        ->delimiter(',')
        ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
}

void add_convention(CLI::App& app, LimitConvention& c) {
    app.add_option("--limit-convention", c, "Control limit: scaled, raw or chi2")
        ->transform(CLI::CheckedTransformer(kConventions, CLI::ignore_case));
}

} // namespace

int command_dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multichannel profile monitoring with tensor feature extraction and Hotelling T2 charts", "mcmon"};
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Draw samples of the four-channel mixing process as CSV");
    simulate->add_option("--scenario", sim_args.scenario, "0 = in control, 1..5 = fault scenario")
        ->check(CLI::Range(0, 5));
    simulate->add_option("--target", sim_args.target, "Faulted signal, parameter or channel (1-based)");
    simulate->add_option("--delta", sim_args.delta, "Fault magnitude");
    simulate->add_option("--samples", sim_args.samples, "Sample count (per class with --labeled)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_args.seed, "Master seed");
    simulate->add_flag("--labeled", sim_args.labeled, "Emit the six-class labeled training set");
    simulate->add_option("--out", sim_args.out, "Output CSV ('-' = stdout)");
    sim_args.sim.add_to(*simulate);

    TrainArgs train_args;
    std::vector<std::size_t> ranks;
    auto* train = app.add_subcommand("train", "Train an extractor and Phase-I chart, write a model file");
    train->add_option("--in", train_args.in, "Training CSV ('-' = stdin)")->required();
    train->add_option("--channels", train_args.channels, "Channels per sample")->check(CLI::PositiveNumber);
    add_method(*train, train_args.method);
    train->add_option("-L,--features", train_args.features, "Number of features")->check(CLI::PositiveNumber);
    train->add_option("--alpha", train_args.alpha, "False-alarm probability");
    add_convention(*train, train_args.convention);
    train->add_option("--segment", train_args.segment, "1-based inclusive point range lo:hi");
    train->add_option("--phase1", train_args.phase1,
                      "In-control CSV for Phase I (default: label-0 rows of --in, else all rows)");
    train->add_option("--gamma", train_args.umlda.gamma, "UMLDA regularizer scale")->check(CLI::NonNegativeNumber);
    train->add_option("--max-iters", train_args.umlda.max_iters, "Alternation passes per EMP")
        ->check(CLI::PositiveNumber);
    train->add_option("--tol", train_args.umlda.tol, "Relative convergence tolerance")->check(CLI::NonNegativeNumber);
    train->add_option("--mpca-ranks", ranks, "MPCA ranks p1:p2 (default full)")
        ->delimiter(':')
        ->expected(2)
        ->check(CLI::PositiveNumber);
    train->add_option("--out", train_args.out, "Model file to write")->required();

    MonitorArgs mon_args;
    auto* monitor = app.add_subcommand("monitor", "Score samples against a model, stopping at the first alarm");
    monitor->add_option("--model", mon_args.model, "Model file")->required();
    monitor->add_option("--in", mon_args.in, "Sample CSV lines ('-' = stdin)");
    monitor->add_option("--out", mon_args.out, "Verdict lines ('-' = stdout)");
    monitor->add_option("--control-out", mon_args.control_out, "Where the STOP line goes ('-' = stderr)");
    monitor->add_flag("--continue-on-fault", mon_args.continue_on_fault, "Keep scoring after the first alarm");

    EvaluateArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "Estimate average run lengths by simulation");
    evaluate->add_option("--scenario", eval_args.scenarios, "Fault scenarios 1..5")
        ->delimiter(',')
        ->check(CLI::Range(1, 5));
    evaluate->add_option("--target", eval_args.target, "Single target (default: all)");
    evaluate->add_option("--delta", eval_args.deltas, "Fault magnitudes")->delimiter(',');
    evaluate->add_option("--delta-grid", eval_args.delta_grid, "Named magnitude grid")
        ->check(CLI::IsMember({"paper"}));
    add_methods(*evaluate, eval_args.methods);
    evaluate->add_option("-L,--features", eval_args.features, "Number of features")->check(CLI::PositiveNumber);
    evaluate->add_option("--alpha", eval_args.alpha, "False-alarm probability");
    evaluate->add_option("--reps", eval_args.reps, "Replications per cell")->check(CLI::PositiveNumber);
    evaluate->add_option("--horizon", eval_args.horizon, "Censoring horizon")->check(CLI::PositiveNumber);
    evaluate->add_option("--seed", eval_args.seed, "Master seed");
    evaluate->add_option("--limits", eval_args.limits, "Chart parameters: estimated or known")
        ->transform(CLI::CheckedTransformer(kLimitSources, CLI::ignore_case));
    add_convention(*evaluate, eval_args.convention);
    evaluate->add_option("--phase1-samples", eval_args.phase1_samples, "Phase-I batch size")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--train-per-class", eval_args.train_per_class, "Training samples per class")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--out", eval_args.out, "Output CSV ('-' = stdout)");
    eval_args.sim.add_to(*evaluate);

    CompareArgs cmp_args;
    auto* compare = app.add_subcommand("compare", "Detection counts and monitoring time per method");
    compare->add_option("--in", cmp_args.in, "Labeled CSV (default: simulate one)");
    compare->add_option("--channels", cmp_args.channels, "Channels per sample")->check(CLI::PositiveNumber);
    compare->add_option("--per-class", cmp_args.per_class, "Simulated samples per class")->check(CLI::PositiveNumber);
    compare->add_option("--seed", cmp_args.seed, "Master seed");
    add_methods(*compare, cmp_args.methods);
    compare->add_option("-L,--features", cmp_args.features, "Number of features")->check(CLI::PositiveNumber);
    compare->add_option("--alpha", cmp_args.alpha, "False-alarm probability");
    add_convention(*compare, cmp_args.convention);
    compare->add_option("--out", cmp_args.out, "Output CSV ('-' = stdout)");
    cmp_args.sim.add_to(*compare);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_args, out);
        }
        if (train->parsed()) {
            if (!ranks.empty()) {
                train_args.mpca_p1 = ranks[0];
                train_args.mpca_p2 = ranks[1];
            }
            return run_train(train_args, in, err);
        }
        if (monitor->parsed()) {
            return run_monitor(mon_args, in, out, err);
        }
        if (evaluate->parsed()) {
            return run_evaluate(eval_args, out);
        }
        if (compare->parsed()) {
            return run_compare(cmp_args, in, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

} // namespace mcmon::cli

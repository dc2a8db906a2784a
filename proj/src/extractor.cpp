#include "mcmon/extractor.hpp"

#include "mcmon/error.hpp"

namespace mcmon {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::string to_string(Method method) {
    switch (method) {
    case Method::Umlda: return "umlda";
    case Method::Umpca: return "umpca";
    case Method::Mpca: return "mpca";
    case Method::Vpca: return "vpca";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "umlda") return Method::Umlda;
    if (name == "umpca") return Method::Umpca;
    if (name == "mpca") return Method::Mpca;
    if (name == "vpca") return Method::Vpca;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected umlda, umpca, mpca or vpca)");
}

Extractor::Extractor(Model model) : model_(std::move(model)) {
    std::visit(overloaded{
                   [&](const UmldaModel& m) {
                       features_ = m.tvp.size();
                       channels_ = m.mean.channels();
                       points_ = m.mean.points();
                   },
                   [&](const UmpcaModel& m) {
                       features_ = m.tvp.size();
                       channels_ = m.mean.channels();
                       points_ = m.mean.points();
                   },
                   [&](const MpcaModel& m) {
                       features_ = m.feature_index.size();
                       channels_ = m.mean.channels();
                       points_ = m.mean.points();
                   },
                   [&](const VpcaModel& m) {
                       features_ = static_cast<std::size_t>(m.loadings.cols());
                       channels_ = m.channels;
                       points_ = m.points;
                   },
               },
               model_);
    if (features_ < 1) {
        throw InvalidArgument("an extractor must produce at least one feature");
    }
}

Method Extractor::method() const noexcept {
    return static_cast<Method>(model_.index());
}

Vector Extractor::extract(const Sample& sample) const {
    return std::visit(overloaded{
                          [&](const UmldaModel& m) { return umlda_extract(m, sample); },
                          [&](const UmpcaModel& m) { return umpca_extract(m, sample); },
                          [&](const MpcaModel& m) { return mpca_extract(m, sample); },
                          [&](const VpcaModel& m) { return vpca_extract(m, sample); },
                      },
                      model_);
}

Sample Extractor::mean_sample() const {
    return std::visit(overloaded{
                          [](const UmldaModel& m) { return m.mean; },
                          [](const UmpcaModel& m) { return m.mean; },
                          [](const MpcaModel& m) { return m.mean; },
                          [](const VpcaModel& m) {
                              return Sample::from_flat(m.channels, m.points,
                                                       std::vector<double>(m.mean.data(), m.mean.data() + m.mean.size()));
                          },
                      },
                      model_);
}

Extractor train_extractor(const TensorBatch& batch, Method method, std::size_t features, const TrainOptions& options) {
    switch (method) {
    case Method::Umlda: return Extractor(umlda_train(batch, features, options.umlda));
    case Method::Umpca: return Extractor(umpca_train(batch, features, options.umpca));
    case Method::Mpca:
        return Extractor(mpca_train(batch, options.mpca_p1.value_or(batch.channels()),
                                    options.mpca_p2.value_or(batch.points()), features));
    case Method::Vpca: return Extractor(vpca_train(batch, features));
    }
    throw InvalidArgument("unknown method");
}

} // namespace mcmon

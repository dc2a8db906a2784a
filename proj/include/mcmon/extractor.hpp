#pragma once

#include "mcmon/baselines.hpp"
#include "mcmon/tensor.hpp"
#include "mcmon/umlda.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace mcmon {

enum class Method { Umlda, Umpca, Mpca, Vpca };

std::string to_string(Method method);
Method parse_method(std::string_view name);

// Trained feature extractor of any kind, mapping a C x K sample to J features.
class Extractor {
public:
    using Model = std::variant<UmldaModel, UmpcaModel, MpcaModel, VpcaModel>;

    explicit Extractor(Model model);

    Method method() const noexcept;
    std::size_t feature_count() const noexcept { return features_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t points() const noexcept { return points_; }
    const Model& model() const noexcept { return model_; }

    Vector extract(const Sample& sample) const;

    // Training-set mean sample; every extractor maps it to the zero vector.
    Sample mean_sample() const;

private:
    Model model_;
    std::size_t features_ = 0;
    std::size_t channels_ = 0;
    std::size_t points_ = 0;
};

struct TrainOptions {
    UmldaParams umlda;
    UmpcaParams umpca;
    // MPCA ranks; unset means full rank in that mode.
    std::optional<std::size_t> mpca_p1;
    std::optional<std::size_t> mpca_p2;
};

// Trains `method` with J = features. UMLDA requires batch labels; the other
// methods ignore them.
Extractor train_extractor(const TensorBatch& batch, Method method, std::size_t features,
                          const TrainOptions& options = {});

} // namespace mcmon

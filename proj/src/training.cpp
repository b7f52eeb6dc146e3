#include "bsb/training.hpp"

#include <cmath>
#include <set>

#include "bsb/error.hpp"
#include "bsb/rng.hpp"

namespace bsb {

void TrainingConfig::validate() const {
    if (!std::isfinite(lr) || lr <= 0.0) {
        throw PreconditionError("learning rate must be finite and > 0");
    }
    if (!(connectivity > 0.0 && connectivity <= 1.0)) {
        throw PreconditionError("connectivity must lie in (0, 1]");
    }
}

PatternSet::PatternSet(std::vector<BipolarVector> patterns, std::vector<std::string> labels)
    : patterns_(std::move(patterns)), labels_(std::move(labels)) {
    if (patterns_.empty()) {
        throw PreconditionError("pattern set is empty");
    }
    if (!labels_.empty() && labels_.size() != patterns_.size()) {
        throw PreconditionError("pattern set has " + std::to_string(patterns_.size()) +
                                " patterns but " + std::to_string(labels_.size()) + " labels");
    }
    const std::size_t d = patterns_.front().size();
    std::set<std::vector<double>> seen;
    for (std::size_t k = 0; k < patterns_.size(); ++k) {
        const auto& p = patterns_[k];
        if (p.size() != d) {
            throw DimensionError("pattern " + std::to_string(k) + " has dimension " +
                                 std::to_string(p.size()) + ", expected " + std::to_string(d));
        }
        if (!p.saturated()) {
            throw PreconditionError("pattern " + std::to_string(k) + " is not saturated");
        }
        if (!seen.emplace(p.values().begin(), p.values().end()).second) {
            throw PreconditionError("pattern " + std::to_string(k) + " duplicates an earlier one");
        }
    }
}

std::vector<std::uint8_t> connectivity_mask(std::size_t dimension, const TrainingConfig& config) {
    config.validate();
    const std::size_t d = dimension;
    std::vector<std::uint8_t> mask(d * d, 1);
    if (config.connectivity == 1.0) return mask;

    Rng rng(config.mask_seed);
    if (config.symmetric_mask) {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                const std::uint8_t keep = rng.uniform01() < config.connectivity ? 1 : 0;
                mask[i * d + j] = keep;
                mask[j * d + i] = keep;
            }
        }
    } else {
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (i == j) continue;
                mask[i * d + j] = rng.uniform01() < config.connectivity ? 1 : 0;
            }
        }
    }
    return mask;
}

namespace {

void require_saturated(const BipolarVector& pattern) {
    if (!pattern.saturated()) {
        throw PreconditionError("training pattern is not saturated");
    }
}

// w += lr * x x', skipping the diagonal (when zeroed) and masked-out entries.
void accumulate(std::vector<double>& w, const BipolarVector& x, const TrainingConfig& config,
                std::span<const std::uint8_t> mask) {
    const std::size_t d = x.size();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j && config.zero_diagonal) continue;
            if (!mask[i * d + j]) continue;
            w[i * d + j] += config.lr * (x[i] * x[j]);
        }
    }
}

}  // namespace

WeightMatrix train(const PatternSet& set, const TrainingConfig& config) {
    config.validate();
    const std::size_t d = set.dimension();
    const auto mask = connectivity_mask(d, config);
    std::vector<double> w(d * d, 0.0);
    for (const auto& x : set.patterns()) accumulate(w, x, config, mask);
    return WeightMatrix(d, std::move(w), std::vector<double>(d, 0.0));
}

WeightMatrix train_incremental(const WeightMatrix& net, const BipolarVector& pattern,
                               const TrainingConfig& config) {
    config.validate();
    const std::size_t d = net.dimension();
    if (pattern.size() != d) {
        throw DimensionError("pattern has dimension " + std::to_string(pattern.size()) +
                             ", network has " + std::to_string(d));
    }
    require_saturated(pattern);
    const auto mask = connectivity_mask(d, config);
    std::vector<double> w(net.weights().begin(), net.weights().end());
    accumulate(w, pattern, config, mask);
    return WeightMatrix(d, std::move(w), std::vector<double>(net.bias().begin(), net.bias().end()));
}

WeightMatrix set_bias(const WeightMatrix& net, std::span<const double> bias) {
    if (bias.size() != net.dimension()) {
        throw DimensionError("bias has dimension " + std::to_string(bias.size()) +
                             ", network has " + std::to_string(net.dimension()));
    }
    return WeightMatrix(net.dimension(),
                        std::vector<double>(net.weights().begin(), net.weights().end()),
                        std::vector<double>(bias.begin(), bias.end()));
}

std::vector<double> pattern_sum_bias(const PatternSet& set, double eps) {
    if (!std::isfinite(eps)) {
        throw PreconditionError("bias scale must be finite");
    }
    std::vector<double> sum(set.dimension(), 0.0);
    for (const auto& x : set.patterns()) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += x[i];
    }
    for (double& v : sum) v *= eps;
    return sum;
}

}  // namespace bsb

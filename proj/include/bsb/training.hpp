#pragma once

// Outer-product (Hebbian) construction of the connection matrix.
//
//     W = lr * sum_k x_k x_k'      (patterns accumulated in index order)
//
// followed by optional diagonal zeroing and an optional random connectivity
// mask. The mask is drawn from Rng(mask_seed): for a symmetric mask one draw
// per unordered pair (i < j), walking rows in order; otherwise one draw per
// off-diagonal entry in row-major order. A weight is kept iff its draw is
// below `connectivity`. The diagonal is never masked.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bsb/core.hpp"

namespace bsb {

struct TrainingConfig {
    double lr = 1.0;
    bool zero_diagonal = true;
    double connectivity = 1.0;  // fraction of off-diagonal weights retained
    std::uint64_t mask_seed = 0;
    bool symmetric_mask = true;

    // Throws PreconditionError unless lr > 0 and 0 < connectivity <= 1.
    void validate() const;

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

// Non-empty list of distinct saturated patterns of equal dimension.
class PatternSet {
public:
    explicit PatternSet(std::vector<BipolarVector> patterns,
                        std::vector<std::string> labels = {});

    std::size_t size() const noexcept { return patterns_.size(); }
    std::size_t dimension() const noexcept { return patterns_.front().size(); }
    const std::vector<BipolarVector>& patterns() const noexcept { return patterns_; }
    const BipolarVector& operator[](std::size_t k) const noexcept { return patterns_[k]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<BipolarVector> patterns_;
    std::vector<std::string> labels_;
};

// Row-major 0/1 mask over d x d entries; diagonal entries are always 1.
std::vector<std::uint8_t> connectivity_mask(std::size_t dimension, const TrainingConfig& config);

WeightMatrix train(const PatternSet& set, const TrainingConfig& config);

// Adds lr * x x' to `net` under the same diagonal and mask policy as train().
// Bias is carried over unchanged.
WeightMatrix train_incremental(const WeightMatrix& net, const BipolarVector& pattern,
                               const TrainingConfig& config);

WeightMatrix set_bias(const WeightMatrix& net, std::span<const double> bias);

// Customary bias scale relative to the learning rate: eps = 0.3 * lr.
inline constexpr double kSuppressionEpsFactor = 0.3;

// b = eps * sum_k x_k. Breaks the x / -x symmetry of the dynamics; whether the
// negatives actually lose their fixed-point status depends on eps relative to
// the local fields (see the analyzer's census).
std::vector<double> pattern_sum_bias(const PatternSet& set, double eps);

}  // namespace bsb

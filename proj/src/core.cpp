#include "bsb/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsb/error.hpp"

namespace bsb {

BipolarVector::BipolarVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw PreconditionError("bipolar vector must have dimension >= 1");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!(v >= -1.0 && v <= 1.0)) {
            throw PreconditionError("bipolar vector element " + std::to_string(i) +
                                    " outside [-1, 1]");
        }
    }
}

BipolarVector BipolarVector::from_signs(std::span<const int> signs) {
    std::vector<double> values(signs.size());
    std::transform(signs.begin(), signs.end(), values.begin(),
                   [](int s) { return s > 0 ? 1.0 : -1.0; });
    return BipolarVector(std::move(values));
}

bool BipolarVector::saturated() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v == 1.0 || v == -1.0; });
}

BipolarVector BipolarVector::negated() const {
    std::vector<double> values(values_.size());
    std::transform(values_.begin(), values_.end(), values.begin(), [](double v) { return -v; });
    return BipolarVector(std::move(values));
}

WeightMatrix::WeightMatrix(std::size_t dimension)
    : WeightMatrix(dimension, std::vector<double>(dimension * dimension, 0.0),
                   std::vector<double>(dimension, 0.0)) {}

WeightMatrix::WeightMatrix(std::size_t dimension, std::vector<double> weights,
                           std::vector<double> bias)
    : dimension_(dimension), weights_(std::move(weights)), bias_(std::move(bias)) {
    if (dimension_ == 0) {
        throw PreconditionError("weight matrix dimension must be >= 1");
    }
    if (weights_.size() != dimension_ * dimension_) {
        throw DimensionError("weight matrix needs " + std::to_string(dimension_ * dimension_) +
                             " entries, got " + std::to_string(weights_.size()));
    }
    if (bias_.size() != dimension_) {
        throw DimensionError("bias needs " + std::to_string(dimension_) + " entries, got " +
                             std::to_string(bias_.size()));
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(weights_.begin(), weights_.end(), finite) ||
        !std::all_of(bias_.begin(), bias_.end(), finite)) {
        throw PreconditionError("weight matrix contains non-finite values");
    }
}

bool WeightMatrix::is_symmetric() const noexcept {
    for (std::size_t i = 0; i < dimension_; ++i) {
        for (std::size_t j = i + 1; j < dimension_; ++j) {
            if (at(i, j) != at(j, i)) return false;
        }
    }
    return true;
}

double WeightMatrix::row_sum_norm() const noexcept {
    double norm = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i) {
        double sum = 0.0;
        for (double w : row(i)) sum += std::abs(w);
        norm = std::max(norm, sum);
    }
    return norm;
}

void BsbParams::validate() const {
    auto gain_ok = [](double g) { return std::isfinite(g) && g >= 0.0; };
    if (!gain_ok(gamma) || !gain_ok(eta) || !gain_ok(theta)) {
        throw PreconditionError("gamma, eta and theta must be finite and >= 0");
    }
    if (gamma == 0.0 && eta == 0.0 && theta == 0.0) {
        throw PreconditionError("gamma, eta and theta cannot all be zero");
    }
    if (max_iters < 1) {
        throw PreconditionError("max_iters must be >= 1");
    }
    if (!std::isfinite(convergence_tol) || convergence_tol < 0.0) {
        throw PreconditionError("convergence_tol must be finite and >= 0");
    }
}

double threshold(double x) {
    if (!std::isfinite(x)) {
        throw DivergenceError("non-finite activation reached the threshold function");
    }
    if (x < -1.0) return -1.0;
    if (x > 1.0) return 1.0;
    return x;
}

namespace {

void require_dimension(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw DimensionError(std::string(what) + " has dimension " + std::to_string(got) +
                             ", network has " + std::to_string(want));
    }
}

}  // namespace

BipolarVector step(const BipolarVector& state, const BipolarVector& probe, const WeightMatrix& net,
                   const BsbParams& params) {
    const std::size_t d = net.dimension();
    require_dimension(state.size(), d, "state");
    require_dimension(probe.size(), d, "probe");

    const auto s = state.values();
    const auto bias = net.bias();
    std::vector<double> next(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto w = net.row(i);
        double field = 0.0;
        for (std::size_t j = 0; j < d; ++j) field += w[j] * s[j];
        const double u = params.gamma * s[i] + params.eta * (field + bias[i]) +
                         params.theta * probe[i];
        next[i] = threshold(u);
    }
    return BipolarVector(std::move(next));
}

double max_norm_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("max_norm_distance: length mismatch");
    }
    double dist = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dist = std::max(dist, std::abs(a[i] - b[i]));
    return dist;
}

RecallTrace recall(const BipolarVector& probe, const WeightMatrix& net, const BsbParams& params,
                   const RecallOptions& options) {
    params.validate();
    require_dimension(probe.size(), net.dimension(), "probe");

    RecallTrace trace{probe, 0, false, {}};
    if (options.record_energy) trace.energy_series.reserve(params.max_iters);

    for (std::size_t iter = 1; iter <= params.max_iters; ++iter) {
        BipolarVector next = step(trace.final_state, probe, net, params);
        const double change = max_norm_distance(next.values(), trace.final_state.values());
        trace.final_state = std::move(next);
        trace.iterations_used = iter;
        if (options.record_energy) trace.energy_series.push_back(energy(trace.final_state, net));
        if (change <= params.convergence_tol) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

double energy(const BipolarVector& state, const WeightMatrix& net) {
    const std::size_t d = net.dimension();
    require_dimension(state.size(), d, "state");
    const auto x = state.values();
    const auto bias = net.bias();
    double quad = 0.0;
    double linear = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const auto w = net.row(i);
        double field = 0.0;
        for (std::size_t j = 0; j < d; ++j) field += w[j] * x[j];
        quad += x[i] * field;
        linear += bias[i] * x[i];
    }
    return -0.5 * quad - linear;
}

}  // namespace bsb

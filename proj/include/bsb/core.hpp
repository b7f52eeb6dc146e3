#pragma once

// Brain-State-in-a-Box dynamics.
//
// The state lives in the hypercube [-1,1]^d. One synchronous update is
//
//     x[n+1] = f(gamma * x[n] + eta * (W x[n] + b) + theta * probe)
//
// where f clamps each coordinate to [-1,1] and `probe` is the original input,
// held fixed for the whole trajectory. The classic form
// x + step * (W x + b) is the special case gamma = 1, eta = step, theta = 0.
//
// For symmetric W the quadratic E(x) = -1/2 x'Wx - b'x is non-increasing along
// trajectories when gamma = 1, theta = 0 and eta <= 1 / ||W||_inf (the update
// is then a projected gradient step with a step size below 2/L).

#include <cstddef>
#include <span>
#include <vector>

namespace bsb {

class BipolarVector {
public:
    // Throws PreconditionError on an empty vector or any element outside
    // [-1, 1] (including NaN).
    explicit BipolarVector(std::vector<double> values);

    // Saturated vector from signs: +1 where the entry is > 0, else -1.
    static BipolarVector from_signs(std::span<const int> signs);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    // Every element is exactly -1 or +1.
    bool saturated() const noexcept;

    BipolarVector negated() const;

    friend bool operator==(const BipolarVector&, const BipolarVector&) = default;

private:
    std::vector<double> values_;
};

// Square connection matrix W (row-major) with bias vector b. Immutable once
// built; all "modifying" operations return a new matrix.
class WeightMatrix {
public:
    // Zero weights and zero bias.
    explicit WeightMatrix(std::size_t dimension);
    WeightMatrix(std::size_t dimension, std::vector<double> weights, std::vector<double> bias);

    std::size_t dimension() const noexcept { return dimension_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> bias() const noexcept { return bias_; }
    std::span<const double> row(std::size_t i) const noexcept {
        return std::span<const double>(weights_).subspan(i * dimension_, dimension_);
    }
    double at(std::size_t i, std::size_t j) const noexcept { return weights_[i * dimension_ + j]; }

    // Bitwise w_ij == w_ji.
    bool is_symmetric() const noexcept;
    // Maximum absolute row sum, ||W||_inf.
    double row_sum_norm() const noexcept;

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

private:
    std::size_t dimension_;
    std::vector<double> weights_;
    std::vector<double> bias_;
};

struct BsbParams {
    double gamma = 1.0;   // feedback gain on the evolving state
    double eta = 0.1;     // gain on W x + b
    double theta = 0.0;   // persistence of the original probe
    std::size_t max_iters = 200;
    double convergence_tol = 1e-9;  // max-norm change between consecutive states

    // Throws PreconditionError on negative/non-finite gains, all gains zero,
    // max_iters == 0 or a negative tolerance.
    void validate() const;

    friend bool operator==(const BsbParams&, const BsbParams&) = default;
};

struct RecallTrace {
    BipolarVector final_state;
    std::size_t iterations_used = 0;
    bool converged = false;
    // Energy of the state after each iteration; empty unless requested.
    std::vector<double> energy_series;
};

struct RecallOptions {
    bool record_energy = false;
};

// Piecewise-linear saturation: clamp to [-1, 1]. Throws DivergenceError on a
// non-finite argument.
double threshold(double x);

// One synchronous update of every unit.
BipolarVector step(const BipolarVector& state, const BipolarVector& probe, const WeightMatrix& net,
                   const BsbParams& params);

// Iterates step() from the probe until the max-norm change is within
// convergence_tol or max_iters is reached. Non-convergence is reported through
// the trace; non-finite values throw DivergenceError.
RecallTrace recall(const BipolarVector& probe, const WeightMatrix& net, const BsbParams& params,
                   const RecallOptions& options = {});

// E(x) = -1/2 x'Wx - b'x.
double energy(const BipolarVector& state, const WeightMatrix& net);

// Max-norm distance between two vectors of equal length.
double max_norm_distance(std::span<const double> a, std::span<const double> b);

}  // namespace bsb

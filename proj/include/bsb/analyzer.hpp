#pragma once

// Brute-force ground truth for small networks: every saturated state of
// {-1,+1}^d is visited, so the results do not depend on the recall dynamics
// reaching a particular attractor.
//
// Saturated states are identified by a code k in [0, 2^d): element i is +1 iff
// bit i of k is set.

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "bsb/core.hpp"
#include "bsb/digest.hpp"
#include "bsb/training.hpp"

namespace bsb {

inline constexpr std::size_t kMaxEnumerationDim = 24;
inline constexpr std::size_t kMaxBasinDim = 20;
inline constexpr std::size_t kMaxCyclePeriod = 8;

enum class AttractorClass { stored, negative_of_stored, spurious };

const char* to_string(AttractorClass cls) noexcept;

BipolarVector state_from_code(std::uint32_t code, std::size_t dimension);
std::uint32_t code_from_state(const BipolarVector& state);

// Classifies saturated states against stored patterns by digest, so a saved
// network can be analysed without its plaintext patterns.
class PatternIndex {
public:
    explicit PatternIndex(const PatternSet& set);
    explicit PatternIndex(std::vector<Digest> digests);

    std::size_t pattern_count() const noexcept { return count_; }
    // A state equal to a pattern is `stored` even if it is also the negative
    // of another one.
    AttractorClass classify(const BipolarVector& state) const;

private:
    std::set<Digest> digests_;
    std::size_t count_;
};

struct Attractor {
    std::uint32_t code = 0;
    AttractorClass cls = AttractorClass::spurious;
    std::size_t basin_size = 0;  // 0 when basins were not computed
};

struct AttractorCensus {
    std::size_t dimension = 0;
    std::size_t pattern_count = 0;
    BsbParams params;
    std::vector<Attractor> fixed_points;  // ascending code
    bool basins_computed = false;
    std::size_t unconverged_count = 0;   // probes that hit max_iters
    std::size_t nonsaturated_count = 0;  // probes converging to an interior/face point

    std::size_t count(AttractorClass cls) const noexcept;
    std::size_t total_probes() const noexcept { return std::size_t{1} << dimension; }
    BipolarVector state(const Attractor& a) const { return state_from_code(a.code, dimension); }
    bool contains(const BipolarVector& state) const;
};

struct AnalysisOptions {
    unsigned workers = 0;  // 0: hardware concurrency
};

// Tests each saturated s with probe = s against the fixed-point condition
// s_i * (gamma s_i + eta ((W s)_i + b_i) + theta s_i) >= 1 for all i.
// Throws EnumerationBoundError for d > max_dim (max_dim capped at
// kMaxEnumerationDim).
AttractorCensus enumerate_fixed_points(const WeightMatrix& net, const BsbParams& params,
                                       const PatternIndex& index, const AnalysisOptions& options = {},
                                       std::size_t max_dim = kMaxEnumerationDim);
AttractorCensus enumerate_fixed_points(const WeightMatrix& net, const BsbParams& params,
                                       const PatternSet& set, const AnalysisOptions& options = {});

// Runs recall() from every saturated probe and tallies where it ends.
// Throws EnumerationBoundError for d > max_dim (capped at kMaxBasinDim).
AttractorCensus basin_map(const WeightMatrix& net, const BsbParams& params, const PatternIndex& index,
                          const AnalysisOptions& options = {}, std::size_t max_dim = kMaxBasinDim);
AttractorCensus basin_map(const WeightMatrix& net, const BsbParams& params, const PatternSet& set,
                          const AnalysisOptions& options = {});

struct SampleStats {
    std::size_t samples = 0;
    std::size_t successes = 0;  // converged exactly onto the source pattern
    std::size_t converged = 0;
    double success_fraction = 0.0;

    friend bool operator==(const SampleStats&, const SampleStats&) = default;
};

// Sample k corrupts pattern (k mod m) by flipping `noise_flips` distinct,
// uniformly chosen positions, then recalls. Deterministic in `seed`.
SampleStats sample_basins(const WeightMatrix& net, const BsbParams& params, const PatternSet& set,
                          std::size_t samples, std::size_t noise_flips, std::uint64_t seed);

struct TrajectoryReport {
    std::size_t trial = 0;
    BipolarVector start;
    bool converged = false;
    std::size_t iterations = 0;
    // Smallest p in [2, kMaxCyclePeriod] with x[n] == x[n-p] exactly, first
    // time one is seen; 0 if none.
    std::size_t cycle_period = 0;
    // E never rose by more than 1e-9 in one step.
    bool energy_monotone = true;
};

// Runs the dynamics from `start` (also used as the probe) for up to max_iters.
TrajectoryReport trace_trajectory(const BipolarVector& start, const WeightMatrix& net,
                                  const BsbParams& params);

struct StabilityReport {
    std::size_t trials = 0;
    // Trajectories that hit max_iters with a detected cycle or a rise in
    // energy. An empty list does not prove global stability.
    std::vector<TrajectoryReport> flagged;
    // Trajectories that hit max_iters with neither symptom.
    std::size_t slow_unconverged = 0;

    bool empty() const noexcept { return flagged.empty(); }
    bool oscillation_detected() const noexcept;
};

// Starts from `trials` uniform random interior states. trials must be >= 1.
StabilityReport check_global_stability(const WeightMatrix& net, const BsbParams& params,
                                       std::size_t trials, std::uint64_t seed);

// "key value" lines followed by one "fixed_point" line per attractor.
std::string census_to_text(const AttractorCensus& census);
// JSON object with keys dimension, pattern_count, fixed_point_count,
// stored_count, spurious_count, negative_count, basin_sizes, unconverged,
// nonsaturated, fixed_points, params.
std::string census_to_json(const AttractorCensus& census);

}  // namespace bsb

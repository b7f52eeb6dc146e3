#include "bsb/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"

#include "bsb/codec.hpp"
#include "bsb/error.hpp"
#include "bsb/rng.hpp"

namespace bsb {

const char* to_string(AttractorClass cls) noexcept {
    switch (cls) {
        case AttractorClass::stored: return "stored";
        case AttractorClass::negative_of_stored: return "negative";
        case AttractorClass::spurious: return "spurious";
    }
    return "unknown";
}

BipolarVector state_from_code(std::uint32_t code, std::size_t dimension) {
    std::vector<double> values(dimension);
    for (std::size_t i = 0; i < dimension; ++i) values[i] = (code >> i) & 1U ? 1.0 : -1.0;
    return BipolarVector(std::move(values));
}

std::uint32_t code_from_state(const BipolarVector& state) {
    if (state.size() > 32 || !state.saturated()) {
        throw PreconditionError("state codes exist only for saturated states with d <= 32");
    }
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state[i] > 0) code |= std::uint32_t{1} << i;
    }
    return code;
}

PatternIndex::PatternIndex(const PatternSet& set) : count_(set.size()) {
    for (const auto& p : set.patterns()) digests_.insert(pattern_digest(p));
}

PatternIndex::PatternIndex(std::vector<Digest> digests)
    : digests_(digests.begin(), digests.end()), count_(digests.size()) {}

AttractorClass PatternIndex::classify(const BipolarVector& state) const {
    if (digests_.contains(pattern_digest(state))) return AttractorClass::stored;
    if (digests_.contains(pattern_digest(state.negated()))) return AttractorClass::negative_of_stored;
    return AttractorClass::spurious;
}

std::size_t AttractorCensus::count(AttractorClass cls) const noexcept {
    return static_cast<std::size_t>(std::count_if(
        fixed_points.begin(), fixed_points.end(), [cls](const Attractor& a) { return a.cls == cls; }));
}

bool AttractorCensus::contains(const BipolarVector& state) const {
    if (state.size() != dimension || !state.saturated()) return false;
    const auto code = code_from_state(state);
    return std::binary_search(fixed_points.begin(), fixed_points.end(), Attractor{code},
                              [](const Attractor& a, const Attractor& b) { return a.code < b.code; });
}

namespace {

unsigned worker_count(const AnalysisOptions& options, std::uint64_t work) {
    unsigned n = options.workers ? options.workers : std::thread::hardware_concurrency();
    n = std::max(1U, n);
    return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(1, work / 1024)));
}

// Calls body(worker, begin, end) on contiguous slices of [0, total).
template <typename Body>
void parallel_ranges(std::uint64_t total, unsigned workers, Body body) {
    if (workers <= 1) {
        body(0U, std::uint64_t{0}, total);
        return;
    }
    std::vector<std::thread> threads;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = std::min(total, w * chunk);
        const std::uint64_t end = std::min(total, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            try {
                body(w, begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

void check_bound(std::size_t d, std::size_t max_dim, std::size_t hard_cap, const char* what) {
    const std::size_t bound = std::min(max_dim, hard_cap);
    if (d > bound) {
        throw EnumerationBoundError(std::string(what) + " refused: dimension " + std::to_string(d) +
                                    " exceeds the enumeration bound " + std::to_string(bound) +
                                    "; use sample_basins for larger networks");
    }
}

void check_same_dimension(const WeightMatrix& net, const PatternSet& set) {
    if (set.dimension() != net.dimension()) {
        throw DimensionError("pattern set and network dimensions differ");
    }
}

AttractorCensus empty_census(const WeightMatrix& net, const BsbParams& params,
                             const PatternIndex& index) {
    AttractorCensus census;
    census.dimension = net.dimension();
    census.pattern_count = index.pattern_count();
    census.params = params;
    return census;
}

}  // namespace

AttractorCensus enumerate_fixed_points(const WeightMatrix& net, const BsbParams& params,
                                       const PatternIndex& index, const AnalysisOptions& options,
                                       std::size_t max_dim) {
    params.validate();
    const std::size_t d = net.dimension();
    check_bound(d, max_dim, kMaxEnumerationDim, "fixed-point enumeration");

    const std::uint64_t total = std::uint64_t{1} << d;
    const unsigned workers = worker_count(options, total);
    std::vector<std::vector<std::uint32_t>> found(workers);
    const auto bias = net.bias();

    parallel_ranges(total, workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        std::vector<double> s(d);
        for (std::uint64_t code = begin; code < end; ++code) {
            for (std::size_t i = 0; i < d; ++i) s[i] = (code >> i) & 1U ? 1.0 : -1.0;
            bool fixed = true;
            for (std::size_t i = 0; i < d && fixed; ++i) {
                const auto row = net.row(i);
                double field = 0.0;
                for (std::size_t j = 0; j < d; ++j) field += row[j] * s[j];
                const double u = params.gamma * s[i] + params.eta * (field + bias[i]) +
                                 params.theta * s[i];
                if (!std::isfinite(u)) throw DivergenceError("non-finite activation in enumeration");
                fixed = s[i] * u >= 1.0;
            }
            if (fixed) found[w].push_back(static_cast<std::uint32_t>(code));
        }
    });

    AttractorCensus census = empty_census(net, params, index);
    for (const auto& part : found) {
        for (auto code : part) census.fixed_points.push_back({code, AttractorClass::spurious, 0});
    }
    std::sort(census.fixed_points.begin(), census.fixed_points.end(),
              [](const Attractor& a, const Attractor& b) { return a.code < b.code; });
    for (auto& a : census.fixed_points) a.cls = index.classify(census.state(a));
    return census;
}

AttractorCensus enumerate_fixed_points(const WeightMatrix& net, const BsbParams& params,
                                       const PatternSet& set, const AnalysisOptions& options) {
    check_same_dimension(net, set);
    return enumerate_fixed_points(net, params, PatternIndex(set), options);
}

AttractorCensus basin_map(const WeightMatrix& net, const BsbParams& params, const PatternIndex& index,
                          const AnalysisOptions& options, std::size_t max_dim) {
    params.validate();
    const std::size_t d = net.dimension();
    check_bound(d, max_dim, kMaxBasinDim, "basin map");

    struct Tally {
        std::unordered_map<std::uint32_t, std::size_t> basins;
        std::size_t unconverged = 0;
        std::size_t nonsaturated = 0;
    };
    const std::uint64_t total = std::uint64_t{1} << d;
    const unsigned workers = worker_count(options, total);
    std::vector<Tally> tallies(workers);

    parallel_ranges(total, workers, [&](unsigned w, std::uint64_t begin, std::uint64_t end) {
        Tally& tally = tallies[w];
        for (std::uint64_t code = begin; code < end; ++code) {
            const auto trace =
                recall(state_from_code(static_cast<std::uint32_t>(code), d), net, params);
            if (!trace.converged) {
                ++tally.unconverged;
            } else if (!trace.final_state.saturated()) {
                ++tally.nonsaturated;
            } else {
                ++tally.basins[code_from_state(trace.final_state)];
            }
        }
    });

    std::map<std::uint32_t, std::size_t> merged;
    AttractorCensus census = empty_census(net, params, index);
    census.basins_computed = true;
    for (const auto& tally : tallies) {
        for (const auto& [code, size] : tally.basins) merged[code] += size;
        census.unconverged_count += tally.unconverged;
        census.nonsaturated_count += tally.nonsaturated;
    }
    for (const auto& [code, size] : merged) {
        Attractor a{code, AttractorClass::spurious, size};
        a.cls = index.classify(census.state(a));
        census.fixed_points.push_back(a);
    }
    return census;
}

AttractorCensus basin_map(const WeightMatrix& net, const BsbParams& params, const PatternSet& set,
                          const AnalysisOptions& options) {
    check_same_dimension(net, set);
    return basin_map(net, params, PatternIndex(set), options);
}

SampleStats sample_basins(const WeightMatrix& net, const BsbParams& params, const PatternSet& set,
                          std::size_t samples, std::size_t noise_flips, std::uint64_t seed) {
    check_same_dimension(net, set);
    const std::size_t d = set.dimension();
    if (samples == 0) {
        throw PreconditionError("sample_basins needs at least one sample");
    }
    if (noise_flips > d) {
        throw PreconditionError("noise_flips exceeds the dimension");
    }

    Rng rng(seed);
    SampleStats stats;
    stats.samples = samples;
    std::vector<std::size_t> positions(d);
    for (std::size_t k = 0; k < samples; ++k) {
        const BipolarVector& source = set[k % set.size()];
        std::vector<double> probe(source.values().begin(), source.values().end());
        for (std::size_t i = 0; i < d; ++i) positions[i] = i;
        // Partial Fisher-Yates: the first noise_flips slots are a uniform subset.
        for (std::size_t f = 0; f < noise_flips; ++f) {
            const std::size_t pick = f + static_cast<std::size_t>(rng.below(d - f));
            std::swap(positions[f], positions[pick]);
            probe[positions[f]] = -probe[positions[f]];
        }
        const auto trace = recall(BipolarVector(std::move(probe)), net, params);
        if (trace.converged) ++stats.converged;
        if (trace.converged && trace.final_state == source) ++stats.successes;
    }
    stats.success_fraction = static_cast<double>(stats.successes) / static_cast<double>(samples);
    return stats;
}

TrajectoryReport trace_trajectory(const BipolarVector& start, const WeightMatrix& net,
                                  const BsbParams& params) {
    params.validate();
    TrajectoryReport report{0, start, false, 0, 0, true};
    constexpr double kEnergySlack = 1e-9;

    std::deque<BipolarVector> history{start};
    BipolarVector state = start;
    double e = energy(state, net);
    for (std::size_t iter = 1; iter <= params.max_iters; ++iter) {
        BipolarVector next = step(state, start, net, params);
        const double change = max_norm_distance(next.values(), state.values());
        const double e_next = energy(next, net);
        if (e_next > e + kEnergySlack) report.energy_monotone = false;
        e = e_next;
        state = std::move(next);
        report.iterations = iter;
        if (change <= params.convergence_tol) {
            report.converged = true;
            break;
        }
        history.push_front(state);
        if (history.size() > kMaxCyclePeriod + 1) history.pop_back();
        if (report.cycle_period == 0) {
            for (std::size_t p = 2; p < history.size(); ++p) {
                if (history[p] == state) {
                    report.cycle_period = p;
                    break;
                }
            }
        }
    }
    return report;
}

bool StabilityReport::oscillation_detected() const noexcept {
    return std::any_of(flagged.begin(), flagged.end(),
                       [](const TrajectoryReport& r) { return r.cycle_period > 0; });
}

StabilityReport check_global_stability(const WeightMatrix& net, const BsbParams& params,
                                       std::size_t trials, std::uint64_t seed) {
    if (trials == 0) {
        throw PreconditionError("check_global_stability needs trials >= 1");
    }
    params.validate();
    Rng rng(seed);
    StabilityReport report;
    report.trials = trials;
    const std::size_t d = net.dimension();
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> start(d);
        for (double& v : start) v = 2.0 * rng.uniform01() - 1.0;
        auto traj = trace_trajectory(BipolarVector(std::move(start)), net, params);
        traj.trial = t;
        if (traj.converged) continue;
        if (traj.cycle_period > 0 || !traj.energy_monotone) {
            report.flagged.push_back(std::move(traj));
        } else {
            ++report.slow_unconverged;
        }
    }
    return report;
}

namespace {

std::string signs(const BipolarVector& v) {
    std::string out(v.size(), '-');
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > 0) out[i] = '+';
    }
    return out;
}

}  // namespace

std::string census_to_text(const AttractorCensus& census) {
    std::ostringstream out;
    out << "dimension " << census.dimension << '\n'
        << "pattern_count " << census.pattern_count << '\n'
        << "fixed_point_count " << census.fixed_points.size() << '\n'
        << "stored_count " << census.count(AttractorClass::stored) << '\n'
        << "negative_count " << census.count(AttractorClass::negative_of_stored) << '\n'
        << "spurious_count " << census.count(AttractorClass::spurious) << '\n';
    if (census.basins_computed) {
        out << "unconverged " << census.unconverged_count << '\n'
            << "nonsaturated " << census.nonsaturated_count << '\n';
    }
    for (const auto& a : census.fixed_points) {
        out << "fixed_point " << signs(census.state(a)) << ' ' << to_string(a.cls);
        if (census.basins_computed) out << " basin " << a.basin_size;
        out << '\n';
    }
    return out.str();
}

std::string census_to_json(const AttractorCensus& census) {
    nlohmann::json doc;
    doc["dimension"] = census.dimension;
    doc["pattern_count"] = census.pattern_count;
    doc["fixed_point_count"] = census.fixed_points.size();
    doc["stored_count"] = census.count(AttractorClass::stored);
    doc["negative_count"] = census.count(AttractorClass::negative_of_stored);
    doc["spurious_count"] = census.count(AttractorClass::spurious);
    doc["basins_computed"] = census.basins_computed;
    doc["unconverged"] = census.unconverged_count;
    doc["nonsaturated"] = census.nonsaturated_count;
    auto basins = nlohmann::json::array();
    auto points = nlohmann::json::array();
    for (const auto& a : census.fixed_points) {
        if (census.basins_computed) basins.push_back(a.basin_size);
        points.push_back({{"state", signs(census.state(a))}, {"class", to_string(a.cls)}});
    }
    doc["basin_sizes"] = std::move(basins);
    doc["fixed_points"] = std::move(points);
    doc["params"] = {{"gamma", census.params.gamma},
                     {"eta", census.params.eta},
                     {"theta", census.params.theta},
                     {"max_iters", census.params.max_iters},
                     {"convergence_tol", census.params.convergence_tol}};
    return doc.dump(2);
}

}  // namespace bsb

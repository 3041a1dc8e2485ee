#pragma once

#include <cstdint>
#include <string>

#include "mtsref/error.hpp"
#include "mtsref/system.hpp"

namespace mtsref {

/// SplitMix64 stream. `below` draws by rejection so results do not depend on
/// the platform's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    /// True with probability num/den.
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
    /// Independent stream derived from this one's seed and `key`.
    Rng split(std::uint64_t key) const;

private:
    std::uint64_t state_;
};

enum class Topology { TreeNoise, Clusters };

struct GenConfig {
    SystemKind kind = SystemKind::BMTS;
    std::size_t numStates = 25;
    std::size_t alphabetSize = 2;
    std::size_t branchingDegree = 2;
    std::size_t numParams = 0;
    Topology topology = Topology::TreeNoise;
    std::size_t clusterSize = 5;
    std::size_t interfaceCount = 1;
    std::size_t formulaDepth = 3;
    std::uint64_t seed = 1;
    std::string name = "G";
    std::string statePrefix = "s";
};

const char* topologyName(Topology t);

/// Random system of the requested kind; every state has out-degree
/// `branchingDegree` and is locally consistent. Throws GenFailure when the
/// redraw budget is exhausted or the configuration is infeasible.
TransitionSystem generate(const GenConfig& cfg, const Limits& limits = {});

/// Small irregular systems for property tests.
struct RandomSystemConfig {
    SystemKind kind = SystemKind::BMTS;
    std::size_t maxStates = 4;
    std::size_t maxActions = 2;
    std::size_t maxOutDegree = 3;
    std::size_t maxParams = 0;  // PMTS only
    std::size_t minParams = 0;
    bool acyclic = false;
    bool consistent = true;  // redraw locally inconsistent obligations
    std::size_t formulaDepth = 3;
    std::string name = "M";
    std::string statePrefix = "s";
};

TransitionSystem randomSystem(const RandomSystemConfig& cfg, Rng& rng);

}  // namespace mtsref

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtsref/error.hpp"
#include "mtsref/gen.hpp"

namespace mtsref {

enum class Checker { Direct, QbfInternal, QbfExternal };

const char* checkerName(Checker c);  // DIRECT, QBF_INTERNAL, QBF_EXTERNAL
std::optional<Checker> parseChecker(std::string_view name);

struct BenchOptions {
    std::size_t pairsPerCell = 5;
    std::vector<Checker> checkers{Checker::Direct};
    double timeoutSecs = 60;
    std::size_t workers = 1;
    std::string externalCommand;  // for QBF_EXTERNAL
    Limits limits;
};

struct BenchRow {
    GenConfig cell;          // the cell's configuration
    std::uint64_t seed = 0;  // pair seed; both systems derive from it
    Checker checker = Checker::Direct;
    std::string verdict;  // HOLDS, DOES-NOT-HOLD, TIMEOUT or ERROR:<code>
    double wallMillis = 0;
    bool timedOut = false;
};

/// Left and right system of pair `index` of a cell.
std::pair<TransitionSystem, TransitionSystem> benchPair(const GenConfig& cell, std::uint64_t pairSeed,
                                                        const Limits& limits = {});
std::uint64_t benchPairSeed(const GenConfig& cell, std::size_t index);

/// Rows ordered by cell, then pair, then checker, whatever the worker count.
std::vector<BenchRow> runBench(const std::vector<GenConfig>& matrix, const BenchOptions& options);

std::string benchCsv(const std::vector<BenchRow>& rows);

struct BenchMatrix {
    std::vector<GenConfig> cells;
    BenchOptions options;
};

/// JSON matrix: {"pairsPerCell", "timeoutSecs", "workers", "checkers",
/// "cells": [{"kind", "states", "alphabet", "branching", "params",
/// "topology", "clusterSize", "interfaceCount", "formulaDepth", "seed"}]}.
/// "states" and "params" may be arrays; cells expand over their product.
/// Throws InvalidArgument on malformed input.
BenchMatrix parseBenchMatrix(std::string_view json);

}  // namespace mtsref

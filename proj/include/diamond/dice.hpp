#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diamond/core.hpp"
#include "diamond/cube.hpp"

namespace diamond {

/// Per-dimension map from attribute id to the current sigma of its slice.
/// An id is live iff its slice met its threshold at preprocessing and has not
/// fallen below it since; totals only decrease during a run.
struct SliceStatsTable {
    std::vector<std::vector<double>> sigma;
    std::vector<std::vector<char>> live;
    std::vector<std::size_t> live_count;

    void init(const std::vector<std::size_t>& shape);
    bool is_live(std::size_t dim, std::uint32_t v) const { return live[dim][v] != 0; }
    double value(std::size_t dim, std::uint32_t v) const { return sigma[dim][v]; }
};

struct TraceEntry {
    int pass = 0;
    std::uint64_t cells_written = 0;
    std::uint64_t rows_dropped = 0;
};

struct Eviction {
    int pass = 0;
    std::uint32_t dim = 0;
    std::uint32_t value = 0;
};

/// Everything a dice run reports besides the diamond itself. Values detected
/// below threshold during preprocessing count as pass-1 evictions.
struct DiceLog {
    int passes = 0;
    std::vector<TraceEntry> trace;
    std::vector<Eviction> evictions;
    bool converged = true;
    std::vector<std::uint64_t> retained;  // surviving attribute values per dimension
    std::uint64_t cells = 0;
    double total_sum = 0.0;

    int deleting_passes() const;  // passes that evicted at least one value
    double diamond_volume() const;
    double diamond_density() const;
};

struct DiamondResult {
    Cube diamond;
    DiceLog log;
};

struct DiceOptions {
    double epsilon = 0.0;              // survive iff sigma >= k_i - epsilon
    bool allow_nonmonotone_sum = false;
    int threads = 1;                   // >1: partitioned passes with merged tallies
};

/// Multi-pass pruning to the unique maximal subcube in which every order-1
/// slice of dimension i aggregates to at least k_i. A dropped row decrements
/// the slice totals of its values in every dimension where the value is still
/// live; a value is evicted the moment its total falls below its threshold,
/// affecting later rows in the same pass. The run ends after the first pass
/// that drops nothing. An empty diamond is a valid result.
DiamondResult dice(const Cube& cube, const CaratVector& carats, Aggregator agg,
                   const DiceOptions& opts = {});

bool verify_carats(const Cube& cube, const CaratVector& carats, Aggregator agg,
                   double epsilon = 0.0);

/// Streaming variant: fact CSV in, diamond CSV out, pass files ping-ponged on
/// disk, memory bounded by the dictionaries and slice tables. Assumes the
/// input is already rolled up (one row per cell), as ingest and the
/// generators produce.
struct FileDiceSpec {
    std::string input_path;
    CsvSchema schema;
    std::string output_path;
    std::string run_dir;  // created if missing; removed after a clean run
};

DiceLog dice_file(const FileDiceSpec& spec, const CaratVector& carats, Aggregator agg,
                  const DiceOptions& opts = {});

}  // namespace diamond

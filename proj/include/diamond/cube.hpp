#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "diamond/core.hpp"

namespace diamond {

/// One dimension: a bijection between attribute strings and dense ids 0..n-1.
struct Dimension {
    std::string name;
    std::vector<std::string> values;                    // id -> string
    std::unordered_map<std::string, std::uint32_t> index;  // string -> id

    std::uint32_t intern(const std::string& v);
    std::optional<std::uint32_t> find(const std::string& v) const;
    const std::string& value(std::uint32_t id) const;
    std::size_t size() const { return values.size(); }
};

/// Immutable fact table: d dimensions of interned attribute values plus a set
/// of allocated cells with real measures. Cells are stored in first-appearance
/// order; duplicate coordinates are merged at construction by summing their
/// measures. Safe to share across concurrent readers once built.
struct Cube {
    std::vector<Dimension> dims;
    std::vector<std::uint32_t> coords;  // cell_count * d, row-major
    std::vector<double> measures;
    bool has_negative_measure = false;
    bool all_integer_measures = true;
    std::string measure_column = "measure";  // empty: no measure column on export

    std::size_t dim_count() const { return dims.size(); }
    std::size_t cell_count() const { return measures.size(); }

    std::span<const std::uint32_t> cell(std::size_t i) const {
        return {coords.data() + i * dims.size(), dims.size()};
    }
    double measure(std::size_t i) const { return measures[i]; }

    std::vector<std::size_t> shape() const;
};

struct CubeStats {
    std::size_t cell_count = 0;
    std::vector<std::size_t> shape;
    double volume = 0.0;
    double density = 0.0;
    double total_sum = 0.0;
};

CubeStats stats(const Cube& cube);

/// Accumulates rows into a cube, rolling up duplicate coordinates.
class CubeBuilder {
public:
    explicit CubeBuilder(std::vector<std::string> dim_names, std::string measure_column = "measure");

    void add(const std::vector<std::string>& attrs, double measure = 1.0);
    void add_ids(std::span<const std::uint32_t> ids, double measure);

    Cube& cube() { return cube_; }
    Cube build();

private:
    Cube cube_;
    std::unordered_map<std::string, std::size_t> cell_of_;  // packed coords -> cell
};

// ---- fact-table CSV --------------------------------------------------------

/// Column selection for ingestion. Entries may be header names or 0-based
/// column indices written as digits. An empty dim list means "all columns
/// except the measure". Absent measure column implies measure 1 per row.
struct CsvSchema {
    std::vector<std::string> dim_columns;
    std::optional<std::string> measure_column;
};

struct ResolvedSchema {
    std::vector<std::size_t> dim_cols;
    std::optional<std::size_t> measure_col;
    std::vector<std::string> dim_names;
    std::string measure_name;
    std::size_t header_width = 0;
};

ResolvedSchema resolve_schema(const std::vector<std::string>& header, const CsvSchema& schema);

Cube ingest_csv(std::istream& in, const CsvSchema& schema);
Cube ingest_csv_file(const std::string& path, const CsvSchema& schema);

void write_csv(const Cube& cube, std::ostream& out);
void write_csv_file(const Cube& cube, const std::string& path);

// ---- cube algebra ----------------------------------------------------------

double slice_sigma(const Cube& cube, std::size_t dim, std::uint32_t value, Aggregator agg);

/// Keeps exactly the cells whose every coordinate is in the per-dimension
/// keep set; the result's dimensions are the keep sets themselves.
Cube restrict_cube(const Cube& cube, const std::vector<std::vector<std::uint32_t>>& keep);

/// Name-based convenience over restrict_cube.
Cube restrict_by_names(const Cube& cube, const std::vector<std::vector<std::string>>& keep);

/// Union of two restrictions of a common parent: per-dimension attribute sets
/// are unioned and a cell is present when it is present in either operand.
Cube union_cubes(const Cube& a, const Cube& b);

bool contains(const Cube& outer, const Cube& inner);

/// Equality up to attribute-id order: same dimension names, same value sets,
/// same cell->measure map.
bool cube_equal(const Cube& a, const Cube& b);

}  // namespace diamond

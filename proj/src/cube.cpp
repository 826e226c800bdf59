#include "diamond/cube.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "diamond/csv.hpp"

namespace diamond {

std::uint32_t Dimension::intern(const std::string& v) {
    auto it = index.find(v);
    if (it != index.end()) return it->second;
    auto id = static_cast<std::uint32_t>(values.size());
    values.push_back(v);
    index.emplace(v, id);
    return id;
}

std::optional<std::uint32_t> Dimension::find(const std::string& v) const {
    auto it = index.find(v);
    if (it == index.end()) return std::nullopt;
    return it->second;
}

const std::string& Dimension::value(std::uint32_t id) const {
    if (id >= values.size())
        throw LookupError("attribute id " + std::to_string(id) + " out of range for dimension " + name);
    return values[id];
}

std::vector<std::size_t> Cube::shape() const {
    std::vector<std::size_t> s;
    s.reserve(dims.size());
    for (const auto& d : dims) s.push_back(d.size());
    return s;
}

CubeStats stats(const Cube& cube) {
    CubeStats st;
    st.cell_count = cube.cell_count();
    st.shape = cube.shape();
    st.volume = 1.0;
    for (std::size_t n : st.shape) st.volume *= static_cast<double>(n);
    st.density = st.volume > 0.0 ? static_cast<double>(st.cell_count) / st.volume : 0.0;
    for (double m : cube.measures) st.total_sum += m;
    return st;
}

static std::string pack_key(std::span<const std::uint32_t> ids) {
    std::string key(ids.size() * sizeof(std::uint32_t), '\0');
    std::memcpy(key.data(), ids.data(), key.size());
    return key;
}

static bool integral_measure(double m) {
    return std::abs(m) < 9007199254740992.0 && m == std::floor(m);
}

CubeBuilder::CubeBuilder(std::vector<std::string> dim_names, std::string measure_column) {
    if (dim_names.empty()) throw DomainError("a cube needs at least one dimension");
    cube_.dims.resize(dim_names.size());
    for (std::size_t i = 0; i < dim_names.size(); ++i) cube_.dims[i].name = std::move(dim_names[i]);
    cube_.measure_column = std::move(measure_column);
}

void CubeBuilder::add(const std::vector<std::string>& attrs, double measure) {
    if (attrs.size() != cube_.dims.size())
        throw IngestError("row has " + std::to_string(attrs.size()) + " attributes, expected " +
                          std::to_string(cube_.dims.size()));
    std::vector<std::uint32_t> ids(attrs.size());
    for (std::size_t i = 0; i < attrs.size(); ++i) ids[i] = cube_.dims[i].intern(attrs[i]);
    add_ids(ids, measure);
}

void CubeBuilder::add_ids(std::span<const std::uint32_t> ids, double measure) {
    auto key = pack_key(ids);
    auto [it, inserted] = cell_of_.try_emplace(key, cube_.measures.size());
    if (inserted) {
        cube_.coords.insert(cube_.coords.end(), ids.begin(), ids.end());
        cube_.measures.push_back(measure);
    } else {
        cube_.measures[it->second] += measure;
    }
    if (measure < 0.0) cube_.has_negative_measure = true;
    if (!integral_measure(measure)) cube_.all_integer_measures = false;
}

Cube CubeBuilder::build() {
    cell_of_.clear();
    return std::move(cube_);
}

// ---- CSV -------------------------------------------------------------------

static std::size_t resolve_column(const std::vector<std::string>& header, const std::string& sel) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == sel) return i;
    // fall back to a 0-based index
    if (!sel.empty() && sel.find_first_not_of("0123456789") == std::string::npos) {
        std::size_t idx = std::stoul(sel);
        if (idx < header.size()) return idx;
    }
    throw IngestError("no column '" + sel + "' in header");
}

ResolvedSchema resolve_schema(const std::vector<std::string>& header, const CsvSchema& schema) {
    ResolvedSchema r;
    r.header_width = header.size();
    if (schema.measure_column) {
        r.measure_col = resolve_column(header, *schema.measure_column);
        r.measure_name = header[*r.measure_col];
    }
    if (schema.dim_columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (!r.measure_col || i != *r.measure_col) r.dim_cols.push_back(i);
    } else {
        for (const auto& sel : schema.dim_columns) {
            std::size_t col = resolve_column(header, sel);
            if (r.measure_col && col == *r.measure_col)
                throw IngestError("column '" + sel + "' selected as both dimension and measure");
            r.dim_cols.push_back(col);
        }
    }
    if (r.dim_cols.empty()) throw IngestError("no dimension columns selected");
    for (std::size_t c : r.dim_cols) r.dim_names.push_back(header[c]);
    return r;
}

Cube ingest_csv(std::istream& in, const CsvSchema& schema) {
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw IngestError("empty input: no header row");
    ResolvedSchema rs = resolve_schema(fields, schema);

    CubeBuilder builder(rs.dim_names, rs.measure_col ? rs.measure_name : std::string());
    std::vector<std::string> attrs(rs.dim_cols.size());
    while (reader.next(fields)) {
        if (fields.size() != rs.header_width)
            throw IngestError("record " + std::to_string(reader.record_number()) + " has " +
                              std::to_string(fields.size()) + " fields, header has " +
                              std::to_string(rs.header_width));
        for (std::size_t i = 0; i < rs.dim_cols.size(); ++i) attrs[i] = fields[rs.dim_cols[i]];
        double m = 1.0;
        if (rs.measure_col)
            m = csv::parse_double(fields[*rs.measure_col], reader.record_number(), rs.measure_name);
        builder.add(attrs, m);
    }
    return builder.build();
}

Cube ingest_csv_file(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path);
    return ingest_csv(in, schema);
}

void write_csv(const Cube& cube, std::ostream& out) {
    std::vector<std::string> fields;
    for (const auto& d : cube.dims) fields.push_back(d.name);
    bool with_measure = !cube.measure_column.empty();
    if (with_measure) fields.push_back(cube.measure_column);
    csv::write_record(out, fields);

    const std::size_t d = cube.dim_count();
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        fields.clear();
        auto cell = cube.cell(i);
        for (std::size_t j = 0; j < d; ++j) fields.push_back(cube.dims[j].values[cell[j]]);
        if (with_measure) fields.push_back(csv::format_double(cube.measures[i]));
        csv::write_record(out, fields);
    }
}

void write_csv_file(const Cube& cube, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RunError("cannot write " + path);
    write_csv(cube, out);
    out.flush();
    if (!out) throw RunError("write failed for " + path);
}

// ---- algebra ---------------------------------------------------------------

double slice_sigma(const Cube& cube, std::size_t dim, std::uint32_t value, Aggregator agg) {
    if (dim >= cube.dim_count()) throw LookupError("dimension index out of range");
    if (value >= cube.dims[dim].size())
        throw LookupError("attribute id " + std::to_string(value) + " out of range for dimension " +
                          cube.dims[dim].name);
    double total = 0.0;
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        if (cube.cell(i)[dim] == value) total += agg == Aggregator::Count ? 1.0 : cube.measures[i];
    }
    return total;
}

Cube restrict_cube(const Cube& cube, const std::vector<std::vector<std::uint32_t>>& keep) {
    if (keep.size() != cube.dim_count()) throw DomainError("keep sets must match dimension count");
    const std::size_t d = cube.dim_count();

    // new dimensions: kept values in original id order
    std::vector<std::vector<char>> kept(d);
    Cube out;
    out.dims.resize(d);
    std::vector<std::vector<std::uint32_t>> remap(d);
    for (std::size_t j = 0; j < d; ++j) {
        kept[j].assign(cube.dims[j].size(), 0);
        for (std::uint32_t id : keep[j]) {
            if (id >= cube.dims[j].size())
                throw LookupError("keep set for dimension " + cube.dims[j].name +
                                  " references unknown id " + std::to_string(id));
            kept[j][id] = 1;
        }
        out.dims[j].name = cube.dims[j].name;
        remap[j].assign(cube.dims[j].size(), 0);
        for (std::uint32_t id = 0; id < cube.dims[j].size(); ++id)
            if (kept[j][id]) remap[j][id] = out.dims[j].intern(cube.dims[j].values[id]);
    }
    out.measure_column = cube.measure_column;

    out.all_integer_measures = true;
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        auto cell = cube.cell(i);
        bool keep_cell = true;
        for (std::size_t j = 0; j < d && keep_cell; ++j) keep_cell = kept[j][cell[j]];
        if (!keep_cell) continue;
        for (std::size_t j = 0; j < d; ++j) out.coords.push_back(remap[j][cell[j]]);
        out.measures.push_back(cube.measures[i]);
        if (cube.measures[i] < 0.0) out.has_negative_measure = true;
        if (!integral_measure(cube.measures[i])) out.all_integer_measures = false;
    }
    return out;
}

Cube restrict_by_names(const Cube& cube, const std::vector<std::vector<std::string>>& keep) {
    std::vector<std::vector<std::uint32_t>> ids(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j)
        for (const auto& name : keep[j]) {
            auto id = cube.dims[j].find(name);
            if (!id) throw LookupError("no attribute '" + name + "' in dimension " + cube.dims[j].name);
            ids[j].push_back(*id);
        }
    return restrict_cube(cube, ids);
}

static void check_same_dims(const Cube& a, const Cube& b, const char* what) {
    if (a.dim_count() != b.dim_count())
        throw DomainError(std::string(what) + ": dimension counts differ");
    for (std::size_t j = 0; j < a.dim_count(); ++j)
        if (a.dims[j].name != b.dims[j].name)
            throw DomainError(std::string(what) + ": dimension names differ at position " +
                              std::to_string(j));
}

Cube union_cubes(const Cube& a, const Cube& b) {
    check_same_dims(a, b, "union");
    const std::size_t d = a.dim_count();

    Cube out;
    out.dims.resize(d);
    out.measure_column = a.measure_column;
    for (std::size_t j = 0; j < d; ++j) {
        out.dims[j].name = a.dims[j].name;
        for (const auto& v : a.dims[j].values) out.dims[j].intern(v);
        for (const auto& v : b.dims[j].values) out.dims[j].intern(v);
    }

    std::unordered_map<std::string, std::size_t> where;
    std::vector<std::uint32_t> ids(d);
    auto absorb = [&](const Cube& src) {
        for (std::size_t i = 0; i < src.cell_count(); ++i) {
            auto cell = src.cell(i);
            for (std::size_t j = 0; j < d; ++j)
                ids[j] = *out.dims[j].find(src.dims[j].values[cell[j]]);
            auto key = pack_key(ids);
            auto [it, inserted] = where.try_emplace(key, out.measures.size());
            if (inserted) {
                out.coords.insert(out.coords.end(), ids.begin(), ids.end());
                out.measures.push_back(src.measures[i]);
                if (src.measures[i] < 0.0) out.has_negative_measure = true;
                if (!integral_measure(src.measures[i])) out.all_integer_measures = false;
            } else if (out.measures[it->second] != src.measures[i]) {
                throw IncompatibleRestriction(
                    "union: operands disagree on a shared cell's measure (" +
                    csv::format_double(out.measures[it->second]) + " vs " +
                    csv::format_double(src.measures[i]) + ")");
            }
        }
    };
    absorb(a);
    absorb(b);
    return out;
}

bool contains(const Cube& outer, const Cube& inner) {
    check_same_dims(outer, inner, "contains");
    const std::size_t d = outer.dim_count();
    for (std::size_t j = 0; j < d; ++j)
        for (const auto& v : inner.dims[j].values)
            if (!outer.dims[j].find(v)) return false;

    std::unordered_map<std::string, double> cells;
    std::vector<std::uint32_t> ids(d);
    for (std::size_t i = 0; i < outer.cell_count(); ++i) {
        auto cell = outer.cell(i);
        cells.emplace(pack_key(cell), outer.measures[i]);
    }
    for (std::size_t i = 0; i < inner.cell_count(); ++i) {
        auto cell = inner.cell(i);
        for (std::size_t j = 0; j < d; ++j)
            ids[j] = *outer.dims[j].find(inner.dims[j].values[cell[j]]);
        auto it = cells.find(pack_key(ids));
        if (it == cells.end() || it->second != inner.measures[i]) return false;
    }
    return true;
}

bool cube_equal(const Cube& a, const Cube& b) {
    if (a.dim_count() != b.dim_count() || a.cell_count() != b.cell_count()) return false;
    for (std::size_t j = 0; j < a.dim_count(); ++j) {
        if (a.dims[j].name != b.dims[j].name) return false;
        if (a.dims[j].size() != b.dims[j].size()) return false;
        for (const auto& v : a.dims[j].values)
            if (!b.dims[j].find(v)) return false;
    }
    // cell maps keyed by attribute strings
    std::map<std::vector<std::string>, double> ca, cb;
    auto collect = [](const Cube& c, std::map<std::vector<std::string>, double>& into) {
        for (std::size_t i = 0; i < c.cell_count(); ++i) {
            auto cell = c.cell(i);
            std::vector<std::string> key;
            key.reserve(c.dim_count());
            for (std::size_t j = 0; j < c.dim_count(); ++j) key.push_back(c.dims[j].values[cell[j]]);
            into[std::move(key)] = c.measures[i];
        }
    };
    collect(a, ca);
    collect(b, cb);
    return ca == cb;
}

// ---- CaratVector -----------------------------------------------------------

double CaratVector::max() const {
    double m = 0.0;
    for (double v : k) m = std::max(m, v);
    return m;
}

bool CaratVector::all_zero() const {
    for (double v : k)
        if (v != 0.0) return false;
    return true;
}

bool CaratVector::integral() const {
    for (double v : k)
        if (v != std::floor(v)) return false;
    return true;
}

void CaratVector::validate() const {
    for (double v : k)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("carats must be finite and >= 0");
}

void CaratVector::validate_for(Aggregator agg) const {
    validate();
    if (agg == Aggregator::Count && !integral())
        throw DomainError("COUNT carats must be integers");
}

}  // namespace diamond

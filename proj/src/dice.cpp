#include "diamond/dice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "diamond/csv.hpp"

namespace diamond {

namespace fs = std::filesystem;

void SliceStatsTable::init(const std::vector<std::size_t>& shape) {
    sigma.assign(shape.size(), {});
    live.assign(shape.size(), {});
    live_count.assign(shape.size(), 0);
    for (std::size_t j = 0; j < shape.size(); ++j) {
        sigma[j].assign(shape[j], 0.0);
        live[j].assign(shape[j], 0);
    }
}

int DiceLog::deleting_passes() const {
    std::vector<char> seen(static_cast<std::size_t>(passes) + 1, 0);
    for (const auto& e : evictions)
        if (e.pass >= 1 && e.pass <= passes) seen[static_cast<std::size_t>(e.pass)] = 1;
    int n = 0;
    for (char c : seen) n += c;
    return n;
}

double DiceLog::diamond_volume() const {
    double v = 1.0;
    for (auto n : retained) v *= static_cast<double>(n);
    return v;
}

double DiceLog::diamond_density() const {
    double v = diamond_volume();
    return v > 0.0 ? static_cast<double>(cells) / v : 0.0;
}

namespace {

// Shared pruning state: thresholds, live slice totals, eviction log.
struct Pruner {
    const CaratVector& carats;
    Aggregator agg;
    double eps;
    SliceStatsTable table;
    DiceLog log;
    std::size_t d;

    Pruner(const CaratVector& k, Aggregator a, double epsilon, std::size_t dims)
        : carats(k), agg(a), eps(epsilon), d(dims) {}

    double row_sigma(double measure) const { return agg == Aggregator::Count ? 1.0 : measure; }

    bool meets(double total, std::size_t dim) const { return total >= carats[dim] - eps; }

    // Fills slice totals, then marks live exactly the values whose full-cube
    // slice meets its threshold. Below-threshold values are pass-1 evictions.
    void seed(const std::vector<std::size_t>& shape,
              const std::vector<std::vector<double>>& full_sums) {
        table.init(shape);
        for (std::size_t j = 0; j < d; ++j) {
            table.sigma[j] = full_sums[j];
            for (std::uint32_t v = 0; v < shape[j]; ++v) {
                if (meets(table.sigma[j][v], j)) {
                    table.live[j][v] = 1;
                    ++table.live_count[j];
                } else {
                    log.evictions.push_back({1, static_cast<std::uint32_t>(j), v});
                }
            }
        }
    }

    bool row_lives(std::span<const std::uint32_t> cell) const {
        for (std::size_t j = 0; j < d; ++j)
            if (!table.live[j][cell[j]]) return false;
        return true;
    }

    // Removes a dropped row's contribution from every still-live slice it
    // touches, evicting values that fall below threshold.
    void drop(std::span<const std::uint32_t> cell, double measure, int pass) {
        const double s = row_sigma(measure);
        for (std::size_t j = 0; j < d; ++j) {
            std::uint32_t v = cell[j];
            if (!table.live[j][v]) continue;
            table.sigma[j][v] -= s;
            if (!meets(table.sigma[j][v], j)) {
                table.live[j][v] = 0;
                --table.live_count[j];
                log.evictions.push_back({pass, static_cast<std::uint32_t>(j), v});
            }
        }
    }

    void finish() {
        log.passes = static_cast<int>(log.trace.size());
        log.retained.assign(d, 0);
        for (std::size_t j = 0; j < d; ++j) log.retained[j] = table.live_count[j];
        log.cells = log.trace.empty() ? 0 : log.trace.back().cells_written;
    }
};

void check_preconditions(const Cube& cube, const CaratVector& carats, Aggregator agg,
                         const DiceOptions& opts) {
    carats.validate_for(agg);
    if (carats.size() != cube.dim_count())
        throw DomainError("carat vector has " + std::to_string(carats.size()) +
                          " entries for a " + std::to_string(cube.dim_count()) +
                          "-dimensional cube");
    if (agg == Aggregator::Sum && cube.has_negative_measure && !opts.allow_nonmonotone_sum)
        throw DomainError(
            "SUM dicing over negative measures has no unique diamond; "
            "set allow_nonmonotone_sum to proceed anyway");
}

std::vector<std::vector<double>> full_slice_sums(const Cube& cube, Aggregator agg) {
    std::vector<std::vector<double>> sums(cube.dim_count());
    for (std::size_t j = 0; j < cube.dim_count(); ++j) sums[j].assign(cube.dims[j].size(), 0.0);
    for (std::size_t i = 0; i < cube.cell_count(); ++i) {
        auto cell = cube.cell(i);
        double s = agg == Aggregator::Count ? 1.0 : cube.measures[i];
        for (std::size_t j = 0; j < cube.dim_count(); ++j) sums[j][cell[j]] += s;
    }
    return sums;
}

// One partitioned pass: each worker scans a chunk against a snapshot of the
// live sets and tallies decrements locally; tallies are merged and evictions
// applied at the pass boundary. Converges to the same diamond (it only ever
// removes values whose true remaining sigma is below threshold), though pass
// counts may differ from the sequential schedule.
std::uint64_t parallel_pass(Pruner& p, const Cube& cube, std::vector<std::uint32_t>& rows,
                            std::vector<std::uint32_t>& next, int pass, int threads) {
    const std::size_t n = rows.size();
    const std::size_t t_count = std::max<std::size_t>(1, static_cast<std::size_t>(threads));
    const std::size_t chunk = (n + t_count - 1) / t_count;

    struct Local {
        std::vector<std::uint32_t> survivors;
        std::vector<std::vector<double>> delta;
        std::uint64_t dropped = 0;
    };
    std::vector<Local> locals(t_count);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < t_count; ++t) {
        workers.emplace_back([&, t] {
            Local& loc = locals[t];
            loc.delta.resize(p.d);
            for (std::size_t j = 0; j < p.d; ++j) loc.delta[j].assign(p.table.sigma[j].size(), 0.0);
            const std::size_t lo = std::min(n, t * chunk);
            const std::size_t hi = std::min(n, lo + chunk);
            for (std::size_t i = lo; i < hi; ++i) {
                auto cell = cube.cell(rows[i]);
                if (p.row_lives(cell)) {
                    loc.survivors.push_back(rows[i]);
                } else {
                    ++loc.dropped;
                    double s = p.row_sigma(cube.measures[rows[i]]);
                    for (std::size_t j = 0; j < p.d; ++j)
                        if (p.table.live[j][cell[j]]) loc.delta[j][cell[j]] += s;
                }
            }
        });
    }
    for (auto& w : workers) w.join();

    std::uint64_t dropped = 0;
    next.clear();
    for (auto& loc : locals) {
        dropped += loc.dropped;
        next.insert(next.end(), loc.survivors.begin(), loc.survivors.end());
    }
    // apply merged tallies in thread order, then evict at the boundary
    for (std::size_t j = 0; j < p.d; ++j) {
        for (auto& loc : locals)
            for (std::uint32_t v = 0; v < p.table.sigma[j].size(); ++v)
                p.table.sigma[j][v] -= loc.delta[j][v];
        for (std::uint32_t v = 0; v < p.table.sigma[j].size(); ++v) {
            if (p.table.live[j][v] && !p.meets(p.table.sigma[j][v], j)) {
                p.table.live[j][v] = 0;
                --p.table.live_count[j];
                p.log.evictions.push_back({pass, static_cast<std::uint32_t>(j), v});
            }
        }
    }
    return dropped;
}

Cube materialize_diamond(const Cube& cube, const Pruner& p,
                         const std::vector<std::uint32_t>& survivors) {
    Cube out;
    out.dims.resize(cube.dim_count());
    out.measure_column = cube.measure_column;
    std::vector<std::vector<std::uint32_t>> remap(cube.dim_count());
    for (std::size_t j = 0; j < cube.dim_count(); ++j) {
        out.dims[j].name = cube.dims[j].name;
        remap[j].assign(cube.dims[j].size(), 0);
        for (std::uint32_t v = 0; v < cube.dims[j].size(); ++v)
            if (p.table.live[j][v]) remap[j][v] = out.dims[j].intern(cube.dims[j].values[v]);
    }
    out.all_integer_measures = true;
    for (std::uint32_t idx : survivors) {
        auto cell = cube.cell(idx);
        for (std::size_t j = 0; j < cube.dim_count(); ++j) out.coords.push_back(remap[j][cell[j]]);
        double m = cube.measures[idx];
        out.measures.push_back(m);
        if (m < 0.0) out.has_negative_measure = true;
        if (m != std::floor(m)) out.all_integer_measures = false;
    }
    return out;
}

}  // namespace

DiamondResult dice(const Cube& cube, const CaratVector& carats, Aggregator agg,
                   const DiceOptions& opts) {
    check_preconditions(cube, carats, agg, opts);
    Pruner p(carats, agg, opts.epsilon, cube.dim_count());
    p.seed(cube.shape(), full_slice_sums(cube, agg));

    std::vector<std::uint32_t> rows(cube.cell_count());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> next;
    next.reserve(rows.size());

    int pass = 0;
    for (;;) {
        ++pass;
        std::uint64_t dropped = 0;
        if (opts.threads > 1) {
            dropped = parallel_pass(p, cube, rows, next, pass, opts.threads);
        } else {
            next.clear();
            for (std::uint32_t idx : rows) {
                auto cell = cube.cell(idx);
                if (p.row_lives(cell)) {
                    next.push_back(idx);
                } else {
                    ++dropped;
                    p.drop(cell, cube.measures[idx], pass);
                }
            }
        }
        p.log.trace.push_back({pass, next.size(), dropped});
        rows.swap(next);
        if (dropped == 0) break;
    }

    p.finish();
    DiamondResult result{materialize_diamond(cube, p, rows), std::move(p.log)};
    for (double m : result.diamond.measures) result.log.total_sum += m;
    return result;
}

bool verify_carats(const Cube& cube, const CaratVector& carats, Aggregator agg, double epsilon) {
    carats.validate_for(agg);
    if (carats.size() != cube.dim_count())
        throw DomainError("carat vector length must equal dimension count");
    if (cube.cell_count() == 0) return true;  // vacuous
    auto sums = full_slice_sums(cube, agg);
    for (std::size_t j = 0; j < cube.dim_count(); ++j)
        for (double s : sums[j])
            if (s < carats[j] - epsilon) return false;
    return true;
}

// ---- streaming file mode ----------------------------------------------------

namespace {

// Fixed-width binary row: d * u32 ids + f64 measure. Pass files are private
// to one run on one machine, so native byte order is fine.
class BinWriter {
public:
    explicit BinWriter(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw RunError("cannot create pass file " + path.string());
        path_ = path.string();
    }
    void put(const std::uint32_t* ids, std::size_t d, double m) {
        out_.write(reinterpret_cast<const char*>(ids),
                   static_cast<std::streamsize>(d * sizeof(std::uint32_t)));
        out_.write(reinterpret_cast<const char*>(&m), sizeof m);
    }
    void close() {
        out_.flush();
        if (!out_) throw RunError("write failed for pass file " + path_);
        out_.close();
    }

private:
    std::ofstream out_;
    std::string path_;
};

class BinReader {
public:
    BinReader(const fs::path& path, std::size_t d) : in_(path, std::ios::binary), d_(d) {
        if (!in_) throw RunError("cannot open pass file " + path.string());
    }
    bool next(std::uint32_t* ids, double& m) {
        in_.read(reinterpret_cast<char*>(ids),
                 static_cast<std::streamsize>(d_ * sizeof(std::uint32_t)));
        if (in_.gcount() == 0) return false;
        if (static_cast<std::size_t>(in_.gcount()) != d_ * sizeof(std::uint32_t))
            throw RunError("truncated pass file record");
        in_.read(reinterpret_cast<char*>(&m), sizeof m);
        if (static_cast<std::size_t>(in_.gcount()) != sizeof m)
            throw RunError("truncated pass file record");
        return true;
    }

private:
    std::ifstream in_;
    std::size_t d_;
};

}  // namespace

DiceLog dice_file(const FileDiceSpec& spec, const CaratVector& carats, Aggregator agg,
                  const DiceOptions& opts) {
    carats.validate_for(agg);

    std::ifstream in(spec.input_path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + spec.input_path);
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw IngestError("empty input: no header row");
    ResolvedSchema rs = resolve_schema(fields, spec.schema);
    const std::size_t d = rs.dim_cols.size();
    if (carats.size() != d)
        throw DomainError("carat vector has " + std::to_string(carats.size()) +
                          " entries for a " + std::to_string(d) + "-dimensional input");

    fs::path run_dir(spec.run_dir);
    std::error_code ec;
    fs::create_directories(run_dir, ec);
    if (ec) throw RunError("cannot create run directory " + run_dir.string());

    std::vector<Dimension> dims(d);
    for (std::size_t j = 0; j < d; ++j) dims[j].name = rs.dim_names[j];
    std::vector<std::vector<double>> sums(d);

    // preprocessing scan: intern attributes, accumulate slice sigmas, spill
    // interned rows to the first pass file
    fs::path ping = run_dir / "pass-a.bin";
    fs::path pong = run_dir / "pass-b.bin";
    std::uint64_t input_rows = 0;
    {
        BinWriter w(ping);
        std::vector<std::uint32_t> ids(d);
        while (reader.next(fields)) {
            if (fields.size() != rs.header_width)
                throw IngestError("record " + std::to_string(reader.record_number()) + " has " +
                                  std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(rs.header_width));
            double m = 1.0;
            if (rs.measure_col)
                m = csv::parse_double(fields[*rs.measure_col], reader.record_number(),
                                      rs.measure_name);
            if (m < 0.0 && agg == Aggregator::Sum && !opts.allow_nonmonotone_sum)
                throw DomainError("record " + std::to_string(reader.record_number()) +
                                  ": negative measure under SUM; set allow_nonmonotone_sum "
                                  "to proceed anyway");
            double s = agg == Aggregator::Count ? 1.0 : m;
            for (std::size_t j = 0; j < d; ++j) {
                std::uint32_t v = dims[j].intern(fields[rs.dim_cols[j]]);
                ids[j] = v;
                if (v >= sums[j].size()) sums[j].resize(v + 1, 0.0);
                sums[j][v] += s;
            }
            w.put(ids.data(), d, m);
            ++input_rows;
        }
        w.close();
    }

    Pruner p(carats, agg, opts.epsilon, d);
    std::vector<std::size_t> shape(d);
    for (std::size_t j = 0; j < d; ++j) shape[j] = dims[j].size();
    p.seed(shape, sums);

    fs::path cur = ping;
    fs::path nxt = pong;
    std::vector<std::uint32_t> ids(d);
    int pass = 0;
    for (;;) {
        ++pass;
        std::uint64_t written = 0, dropped = 0;
        try {
            BinReader r(cur, d);
            BinWriter w(nxt);
            double m;
            while (r.next(ids.data(), m)) {
                if (p.row_lives({ids.data(), d})) {
                    w.put(ids.data(), d, m);
                    ++written;
                } else {
                    ++dropped;
                    p.drop({ids.data(), d}, m, pass);
                }
            }
            w.close();
        } catch (const RunError& e) {
            throw RunError("pass " + std::to_string(pass) + ": " + e.what());
        }
        p.log.trace.push_back({pass, written, dropped});
        std::swap(cur, nxt);
        if (dropped == 0) break;
    }
    p.finish();

    // survivors -> diamond CSV, atomically
    fs::path tmp_out = fs::path(spec.output_path).concat(".tmp");
    {
        std::ofstream out(tmp_out, std::ios::binary);
        if (!out) throw RunError("cannot write " + tmp_out.string());
        std::vector<std::string> row;
        for (std::size_t j = 0; j < d; ++j) row.push_back(dims[j].name);
        if (rs.measure_col) row.push_back(rs.measure_name);
        csv::write_record(out, row);
        BinReader r(cur, d);
        double m;
        while (r.next(ids.data(), m)) {
            row.clear();
            for (std::size_t j = 0; j < d; ++j) row.push_back(dims[j].values[ids[j]]);
            if (rs.measure_col) row.push_back(csv::format_double(m));
            csv::write_record(out, row);
            p.log.total_sum += m;
        }
        out.flush();
        if (!out) throw RunError("write failed for " + tmp_out.string());
    }
    fs::rename(tmp_out, spec.output_path);

    fs::remove(ping, ec);
    fs::remove(pong, ec);
    fs::remove(run_dir, ec);  // succeeds only if now empty; harmless otherwise
    return std::move(p.log);
}

}  // namespace diamond

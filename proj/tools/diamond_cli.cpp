// diamond: command-line toolkit for diamond dicing of fact tables.
//
// Subcommands: ingest, dice, kappa, dcld, bounds, gen, perturb, robustness.
// Every run writes a manifest JSON describing inputs, resolved flags and
// outputs. Exit codes: 0 success (an empty diamond is a result, not an
// error), 2 usage or input error, 3 runtime error (I/O, budget).

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "diamond/bounds.hpp"
#include "diamond/csv.hpp"
#include "diamond/cube.hpp"
#include "diamond/datagen.hpp"
#include "diamond/dcld.hpp"
#include "diamond/dice.hpp"
#include "diamond/kappa.hpp"
#include "diamond/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace diamond;

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    fs::path tmp = fs::path(path).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw RunError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw RunError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw DomainError("empty list: '" + text + "'");
    return out;
}

CaratVector carats_for(const std::string& text, std::size_t d) {
    std::vector<double> vals = parse_list(text);
    if (vals.size() == 1) return CaratVector::uniform(d, vals[0]);
    if (vals.size() != d)
        throw DomainError("carats list has " + std::to_string(vals.size()) + " entries for " +
                          std::to_string(d) + " dimensions");
    return CaratVector(vals);
}

Aggregator agg_from(const std::string& name) {
    if (name == "count") return Aggregator::Count;
    if (name == "sum") return Aggregator::Sum;
    throw DomainError("aggregator must be count or sum");
}

// Shared per-run bookkeeping for the manifest.
struct Run {
    std::string subcommand;
    json flags = json::object();
    json inputs = json::object();
    std::vector<std::string> outputs;
    json counters = json::object();
    Clock::time_point started = Clock::now();
    std::string manifest_path;

    void input(const std::string& path) { inputs[path] = hex64(fnv1a64_file(path)); }
    void output(const std::string& path) { outputs.push_back(path); }

    void finish(const std::string& summary) {
        json m{{"subcommand", subcommand},
               {"flags", flags},
               {"inputs", inputs},
               {"outputs", outputs},
               {"counters", counters},
               {"wall_clock_ms",
                std::chrono::duration<double, std::milli>(Clock::now() - started).count()}};
        if (manifest_path.empty()) manifest_path = subcommand + ".manifest.json";
        atomic_write(manifest_path, m.dump(2) + "\n");
        std::cout << summary << "\n" << "manifest: " << manifest_path << "\n";
    }
};

std::string default_manifest(const std::string& output, const std::string& sub) {
    return output.empty() ? sub + ".manifest.json" : output + ".manifest.json";
}

std::string run_dir_for(const std::string& output) {
    if (const char* env = std::getenv("DIAMOND_TMPDIR"); env && *env)
        return (fs::path(env) / (fs::path(output).filename().string() + ".run")).string();
    return output + ".run";
}

json stats_json(const DiceLog& log, const std::vector<std::string>& dim_names) {
    json retained = json::object();
    for (std::size_t j = 0; j < dim_names.size(); ++j)
        retained[dim_names[j]] = log.retained.size() > j ? log.retained[j] : 0;
    return json{{"passes", log.passes},
                {"deleting_passes", log.deleting_passes()},
                {"cells", log.cells},
                {"density", log.diamond_density()},
                {"total_sum", log.total_sum},
                {"retained", retained}};
}

std::string trace_csv(const DiceLog& log) {
    std::ostringstream out;
    out << "pass,cells_remaining\n";
    for (const auto& t : log.trace) out << t.pass << "," << t.cells_written << "\n";
    return out.str();
}

json kappa_json(const KappaResult& r) {
    json probes = json::array();
    for (const auto& p : r.probes)
        probes.push_back({{"k", p.k}, {"nonempty", p.nonempty}, {"passes", p.passes}});
    json shape = json::object();
    for (const auto& d : r.diamond.dims) shape[d.name] = d.size();
    return json{{"kappa", r.kappa},
                {"exact", r.exact},
                {"method", r.method == KappaMethod::Binary ? "binary" : "sequential"},
                {"tolerance", r.tolerance},
                {"lower_bound", r.lower_bound},
                {"upper_bound", r.upper_bound},
                {"galloped", r.galloped},
                {"dice_count", r.dice_count()},
                {"probes", probes},
                {"diamond", {{"cells", r.diamond.cell_count()}, {"shape", shape}}}};
}

struct IoFlags {
    std::string input, output, dims, measure;
    CsvSchema schema() const {
        CsvSchema s;
        if (!dims.empty()) {
            std::stringstream ss(dims);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) s.dim_columns.push_back(item);
        }
        if (!measure.empty()) s.measure_column = measure;
        return s;
    }
};

void add_io(CLI::App* sub, IoFlags& io, bool with_output = true) {
    sub->add_option("--input", io.input, "fact-table CSV")->required();
    if (with_output) sub->add_option("--output", io.output, "output CSV")->required();
    sub->add_option("--dims", io.dims, "comma-separated dimension columns (default: all non-measure)");
    sub->add_option("--measure", io.measure, "measure column name or index (default: none, measure 1)");
}

int dispatch(CLI::App& app, int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diamond dicing toolkit"};
    app.require_subcommand(1);
    try {
        return dispatch(app, argc, argv);
    } catch (const IngestError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const LookupError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

namespace {

int dispatch(CLI::App& app, int argc, char** argv) {
    // ---- ingest ----
    auto* ingest_cmd = app.add_subcommand("ingest", "roll up a fact table to one row per cell");
    IoFlags ingest_io;
    std::string ingest_stats;
    add_io(ingest_cmd, ingest_io);
    ingest_cmd->add_option("--stats", ingest_stats, "write cube stats JSON here");

    // ---- dice ----
    auto* dice_cmd = app.add_subcommand("dice", "extract the k1..kd-carat diamond");
    IoFlags dice_io;
    std::string dice_carats, dice_agg = "count", dice_trace, dice_stats;
    double dice_eps = 0.0;
    int dice_threads = 1;
    bool dice_oracle = false, dice_allow_neg = false;
    add_io(dice_cmd, dice_io);
    dice_cmd->add_option("--carats", dice_carats, "threshold per dimension, or one value for all")
        ->required();
    dice_cmd->add_option("--agg", dice_agg, "count|sum");
    dice_cmd->add_option("--trace", dice_trace, "write per-pass trace CSV here");
    dice_cmd->add_option("--stats", dice_stats, "write stats JSON here");
    dice_cmd->add_option("--tolerance", dice_eps, "threshold comparison tolerance");
    dice_cmd->add_option("--threads", dice_threads, "partitioned passes (in-memory mode)");
    dice_cmd->add_flag("--oracle", dice_oracle, "cross-check against the brute-force oracle");
    dice_cmd->add_flag("--allow-negative", dice_allow_neg,
                       "permit SUM over negative measures (diamond no longer unique)");

    // ---- kappa ----
    auto* kappa_cmd = app.add_subcommand("kappa", "largest k with a nonempty diamond");
    IoFlags kappa_io;
    std::string kappa_agg = "count", kappa_method = "binary", kappa_json_path, kappa_diamond_out;
    double kappa_tol = 0.0;
    add_io(kappa_cmd, kappa_io, false);
    kappa_cmd->add_option("--agg", kappa_agg, "count|sum");
    kappa_cmd->add_option("--method", kappa_method, "binary|sequential");
    kappa_cmd->add_option("--tolerance", kappa_tol, "convergence tolerance for non-integer SUM");
    kappa_cmd->add_option("--json", kappa_json_path, "write the result JSON here (also printed)");
    kappa_cmd->add_option("--output", kappa_diamond_out, "write the kappa-diamond CSV here");

    // ---- dcld ----
    auto* dcld_cmd = app.add_subcommand("dcld", "densest/heaviest cube with limited dimensions");
    IoFlags dcld_io;
    std::string dcld_p, dcld_agg = "count", dcld_method = "diamond", dcld_json_path;
    bool dcld_oracle = false;
    add_io(dcld_cmd, dcld_io);
    dcld_cmd->add_option("--p", dcld_p, "attribute budget per dimension, or one value for all")
        ->required();
    dcld_cmd->add_option("--agg", dcld_agg, "count|sum");
    dcld_cmd->add_option("--method", dcld_method, "diamond|local");
    dcld_cmd->add_option("--json", dcld_json_path, "write the result JSON here");
    dcld_cmd->add_flag("--oracle", dcld_oracle, "cross-check against exhaustive enumeration");

    // ---- bounds ----
    auto* bounds_cmd = app.add_subcommand("bounds", "closed-form bound calculators");
    std::string b_which, b_shape, b_carats, b_agg = "count";
    double b_cells = 0, b_sum = 0, b_k = 0, b_s = 0;
    std::size_t b_p = 1;
    int b_trunc = 64;
    bounds_cmd
        ->add_option("--which", b_which,
                     "min-size | max-cells | max-sum | kappa-lower | kappa-upper | "
                     "dcld-threshold | marked-fraction")
        ->required();
    bounds_cmd->add_option("--shape", b_shape, "dimension cardinalities n1,..,nd");
    bounds_cmd->add_option("--carats", b_carats, "carat vector (broadcasts a single value)");
    bounds_cmd->add_option("--cells", b_cells, "|C| for kappa bounds");
    bounds_cmd->add_option("--sum", b_sum, "total sum for kappa bounds");
    bounds_cmd->add_option("--agg", b_agg, "count|sum");
    bounds_cmd->add_option("--p", b_p, "shape limit for dcld-threshold");
    bounds_cmd->add_option("--k", b_k, "carats for dcld-threshold");
    bounds_cmd->add_option("--s", b_s, "zeta skew for marked-fraction");
    bounds_cmd->add_option("--truncation", b_trunc, "zeta truncation for marked-fraction");

    // ---- gen ----
    auto* gen_cmd = app.add_subcommand("gen", "synthetic cube generators");
    std::string gen_kind, gen_output, gen_shape;
    double gen_skew = 1.0;
    std::size_t gen_target = 0, gen_n = 0, gen_d = 0;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--kind", gen_kind, "power | chain | binary")->required();
    gen_cmd->add_option("--output", gen_output, "output CSV")->required();
    gen_cmd->add_option("--shape", gen_shape, "power: cardinalities n1,..,nd");
    gen_cmd->add_option("--skew", gen_skew, "power: skew a > 0 (1 = uniform)");
    gen_cmd->add_option("--target", gen_target, "power: distinct facts to generate");
    gen_cmd->add_option("--seed", gen_seed, "power: RNG seed");
    gen_cmd->add_option("--n", gen_n, "chain: side length");
    gen_cmd->add_option("--d", gen_d, "binary: dimension count");

    // ---- perturb ----
    auto* pert_cmd = app.add_subcommand("perturb", "deallocate cells at random");
    IoFlags pert_io;
    double pert_p = 0.0;
    std::uint64_t pert_seed = 0;
    add_io(pert_cmd, pert_io);
    pert_cmd->add_option("--p-missing", pert_p, "independent drop probability")->required();
    pert_cmd->add_option("--seed", pert_seed, "RNG seed");

    // ---- robustness ----
    auto* rob_cmd = app.add_subcommand("robustness", "kappa histogram under random missing data");
    IoFlags rob_io;
    std::string rob_probs = "0.01,0.02,0.03,0.04,0.05", rob_agg = "count", rob_json_path;
    int rob_trials = 30;
    std::uint64_t rob_seed = 0;
    add_io(rob_cmd, rob_io);
    rob_cmd->add_option("--probs", rob_probs, "deallocation probabilities");
    rob_cmd->add_option("--trials", rob_trials, "trials per probability");
    rob_cmd->add_option("--seed", rob_seed, "RNG seed");
    rob_cmd->add_option("--agg", rob_agg, "count|sum");
    rob_cmd->add_option("--json", rob_json_path, "write the result JSON here");

    std::string manifest_flag;
    app.add_option("--manifest", manifest_flag, "manifest path (default: <output>.manifest.json)");
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Run run;
    run.manifest_path = manifest_flag;

    if (ingest_cmd->parsed()) {
        run.subcommand = "ingest";
        run.flags = {{"input", ingest_io.input}, {"output", ingest_io.output},
                     {"dims", ingest_io.dims},   {"measure", ingest_io.measure}};
        run.input(ingest_io.input);
        Cube cube = ingest_csv_file(ingest_io.input, ingest_io.schema());
        std::ostringstream body;
        write_csv(cube, body);
        atomic_write(ingest_io.output, body.str());
        run.output(ingest_io.output);
        CubeStats st = stats(cube);
        json stj{{"cells", st.cell_count},
                 {"shape", st.shape},
                 {"volume", st.volume},
                 {"density", st.density},
                 {"total_sum", st.total_sum}};
        if (!ingest_stats.empty()) {
            atomic_write(ingest_stats, stj.dump(2) + "\n");
            run.output(ingest_stats);
        }
        run.counters = stj;
        if (run.manifest_path.empty()) run.manifest_path = default_manifest(ingest_io.output, "ingest");
        run.finish("ingested " + std::to_string(st.cell_count) + " cells -> " + ingest_io.output);
        return 0;
    }

    if (dice_cmd->parsed()) {
        run.subcommand = "dice";
        run.flags = {{"input", dice_io.input},   {"output", dice_io.output},
                     {"dims", dice_io.dims},     {"measure", dice_io.measure},
                     {"carats", dice_carats},    {"agg", dice_agg},
                     {"tolerance", dice_eps},    {"threads", dice_threads},
                     {"oracle", dice_oracle},    {"allow_negative", dice_allow_neg}};
        run.input(dice_io.input);
        Aggregator agg = agg_from(dice_agg);
        DiceOptions opts;
        opts.epsilon = dice_eps;
        opts.allow_nonmonotone_sum = dice_allow_neg;
        opts.threads = dice_threads;

        DiceLog log;
        std::vector<std::string> dim_names;
        if (dice_threads > 1 || dice_oracle) {
            // in-memory path (also used when the oracle needs the cube)
            Cube cube = ingest_csv_file(dice_io.input, dice_io.schema());
            for (const auto& d : cube.dims) dim_names.push_back(d.name);
            CaratVector carats = carats_for(dice_carats, cube.dim_count());
            DiamondResult r = dice(cube, carats, agg, opts);
            if (dice_oracle) {
                Cube expect = oracle::brute_force_diamond(cube, carats, agg);
                bool match = cube_equal(expect, r.diamond);
                run.counters["oracle_match"] = match;
                if (!match) throw RunError("oracle disagreement: dice result is not the diamond");
            }
            std::ostringstream body;
            write_csv(r.diamond, body);
            atomic_write(dice_io.output, body.str());
            log = std::move(r.log);
        } else {
            FileDiceSpec spec{dice_io.input, dice_io.schema(), dice_io.output,
                              run_dir_for(dice_io.output)};
            // resolve dimension names for the stats sidecar
            {
                std::ifstream in(dice_io.input, std::ios::binary);
                if (!in) throw IngestError("cannot open " + dice_io.input);
                csv::Reader rd(in);
                std::vector<std::string> header;
                if (!rd.next(header)) throw IngestError("empty input: no header row");
                dim_names = resolve_schema(header, spec.schema).dim_names;
            }
            CaratVector carats = carats_for(dice_carats, dim_names.size());
            log = dice_file(spec, carats, agg, opts);
        }
        run.output(dice_io.output);
        if (!dice_trace.empty()) {
            atomic_write(dice_trace, trace_csv(log));
            run.output(dice_trace);
        }
        json stj = stats_json(log, dim_names);
        if (!dice_stats.empty()) {
            atomic_write(dice_stats, stj.dump(2) + "\n");
            run.output(dice_stats);
        }
        run.counters = stj;
        if (run.manifest_path.empty()) run.manifest_path = default_manifest(dice_io.output, "dice");
        run.finish("diamond: " + std::to_string(log.cells) + " cells after " +
                   std::to_string(log.passes) + " passes -> " + dice_io.output);
        return 0;
    }

    if (kappa_cmd->parsed()) {
        run.subcommand = "kappa";
        run.flags = {{"input", kappa_io.input}, {"dims", kappa_io.dims},
                     {"measure", kappa_io.measure}, {"agg", kappa_agg},
                     {"method", kappa_method}, {"tolerance", kappa_tol}};
        run.input(kappa_io.input);
        Cube cube = ingest_csv_file(kappa_io.input, kappa_io.schema());
        Aggregator agg = agg_from(kappa_agg);
        KappaResult r;
        if (kappa_method == "sequential")
            r = kappa_sequential(cube, agg);
        else if (kappa_method == "binary")
            r = kappa_binary(cube, agg, kappa_tol);
        else
            throw DomainError("method must be binary or sequential");
        json out = kappa_json(r);
        std::cout << out.dump(2) << "\n";
        if (!kappa_json_path.empty()) {
            atomic_write(kappa_json_path, out.dump(2) + "\n");
            run.output(kappa_json_path);
        }
        if (!kappa_diamond_out.empty()) {
            std::ostringstream body;
            write_csv(r.diamond, body);
            atomic_write(kappa_diamond_out, body.str());
            run.output(kappa_diamond_out);
        }
        run.counters = {{"kappa", r.kappa}, {"dice_count", r.dice_count()}};
        if (run.manifest_path.empty())
            run.manifest_path = default_manifest(kappa_json_path, "kappa");
        run.finish("kappa = " + csv::format_double(r.kappa) + " (" + kappa_method + ", " +
                   std::to_string(r.dice_count()) + " dices)");
        return 0;
    }

    if (dcld_cmd->parsed()) {
        run.subcommand = "dcld";
        run.flags = {{"input", dcld_io.input}, {"output", dcld_io.output},
                     {"dims", dcld_io.dims},   {"measure", dcld_io.measure},
                     {"p", dcld_p},            {"agg", dcld_agg},
                     {"method", dcld_method},  {"oracle", dcld_oracle}};
        run.input(dcld_io.input);
        Cube cube = ingest_csv_file(dcld_io.input, dcld_io.schema());
        Aggregator agg = agg_from(dcld_agg);
        std::vector<double> pvals = parse_list(dcld_p);
        ShapeLimit limit;
        if (pvals.size() == 1)
            limit = ShapeLimit::uniform(cube.dim_count(), static_cast<std::size_t>(pvals[0]));
        else {
            for (double v : pvals) limit.p.push_back(static_cast<std::size_t>(v));
        }
        DcldResult r;
        if (dcld_method == "diamond")
            r = dcld_diamond_heuristic(cube, limit, agg);
        else if (dcld_method == "local")
            r = dcld_local_search(cube, limit, agg);
        else
            throw DomainError("method must be diamond or local");

        json out{{"method", dcld_method},
                 {"objective", r.objective},
                 {"total_sum", r.total_sum},
                 {"average", r.average},
                 {"cells", r.subcube.cell_count()},
                 {"fallback_whole_cube", r.fallback_whole_cube},
                 {"seed_carats", r.seed_carats},
                 {"work",
                  {{"slice_deletions", r.work.slice_deletions},
                   {"swap_evals", r.work.swap_evals},
                   {"swaps_applied", r.work.swaps_applied},
                   {"dice_probes", r.work.dice_probes}}}};
        if (dcld_oracle) {
            auto opt = oracle::brute_force_dcld(cube, limit.effective(cube), agg);
            out["oracle_objective"] = opt.objective;
            out["matches_oracle"] = r.objective == opt.objective;
        }
        std::ostringstream body;
        write_csv(r.subcube, body);
        atomic_write(dcld_io.output, body.str());
        run.output(dcld_io.output);
        std::cout << out.dump(2) << "\n";
        if (!dcld_json_path.empty()) {
            atomic_write(dcld_json_path, out.dump(2) + "\n");
            run.output(dcld_json_path);
        }
        run.counters = out;
        if (run.manifest_path.empty()) run.manifest_path = default_manifest(dcld_io.output, "dcld");
        run.finish("dcld " + dcld_method + ": objective " + csv::format_double(r.objective) +
                   " -> " + dcld_io.output);
        return 0;
    }

    if (bounds_cmd->parsed()) {
        run.subcommand = "bounds";
        run.flags = {{"which", b_which}, {"shape", b_shape}, {"carats", b_carats},
                     {"cells", b_cells}, {"sum", b_sum},     {"agg", b_agg},
                     {"p", b_p},         {"k", b_k},         {"s", b_s}};
        std::vector<std::size_t> shape;
        if (!b_shape.empty())
            for (double v : parse_list(b_shape)) shape.push_back(static_cast<std::size_t>(v));
        auto carats = [&] { return carats_for(b_carats, shape.size()); };
        CubeStats st;
        st.cell_count = static_cast<std::size_t>(b_cells);
        st.shape = shape;
        st.total_sum = b_sum;

        json report;
        if (b_which == "min-size") {
            report = {{"name", "min_size_for_carats"},
                      {"value", min_size_for_carats(carats(), shape)},
                      {"kind", "lower"},
                      {"guarantee", "existence"}};
        } else if (b_which == "max-cells") {
            report = {{"name", "max_cells_without_diamond"},
                      {"value", max_cells_without_diamond(shape, carats())},
                      {"kind", "upper"},
                      {"guarantee", "non-existence"}};
        } else if (b_which == "max-sum") {
            report = {{"name", "max_sum_without_diamond"},
                      {"value", max_sum_without_diamond(shape, carats())},
                      {"kind", "upper"},
                      {"guarantee", "non-existence"},
                      {"average_threshold", hcld_average_threshold(shape, carats())}};
        } else if (b_which == "kappa-lower") {
            report = {{"name", "kappa_lower_bound"},
                      {"value", kappa_lower_bound(st)},
                      {"paper_expression", kappa_lower_bound_paper(st)},
                      {"sum_bound", kappa_lower_bound_sum(st)},
                      {"kind", "lower"},
                      {"guarantee", "existence"}};
        } else if (b_which == "kappa-upper") {
            report = {{"name", "kappa_upper_bound"},
                      {"value", kappa_upper_bound(st, agg_from(b_agg))},
                      {"kind", "upper"},
                      {"guarantee", "non-existence"}};
        } else if (b_which == "dcld-threshold") {
            report = {{"name", "dcld_density_threshold"},
                      {"value", dcld_density_threshold(shape, b_p, b_k)},
                      {"kind", "upper"},
                      {"guarantee", "existence"}};
        } else if (b_which == "marked-fraction") {
            report = {{"name", "expected_marked_fraction"},
                      {"value", expected_marked_fraction(shape, carats(), b_s, b_trunc)},
                      {"kind", "upper"},
                      {"guarantee", "existence"}};
        } else {
            throw DomainError("unknown bound: " + b_which);
        }
        report["inputs"] = run.flags;
        std::cout << report.dump(2) << "\n";
        run.counters = report;
        run.finish("bounds " + b_which + " = " + csv::format_double(report["value"].get<double>()));
        return 0;
    }

    if (gen_cmd->parsed()) {
        run.subcommand = "gen";
        run.flags = {{"kind", gen_kind},     {"output", gen_output}, {"shape", gen_shape},
                     {"skew", gen_skew},     {"target", gen_target}, {"seed", gen_seed},
                     {"n", gen_n},           {"d", gen_d}};
        Cube cube;
        if (gen_kind == "power") {
            PowerGenSpec spec;
            for (double v : parse_list(gen_shape)) spec.shape.push_back(static_cast<std::size_t>(v));
            spec.skew = gen_skew;
            spec.target = gen_target;
            spec.seed = gen_seed;
            cube = gen_power_cube(spec);
        } else if (gen_kind == "chain") {
            cube = gen_adversarial_chain(gen_n);
        } else if (gen_kind == "binary") {
            cube = gen_full_binary_cube(gen_d);
        } else {
            throw DomainError("kind must be power, chain or binary");
        }
        std::ostringstream body;
        write_csv(cube, body);
        atomic_write(gen_output, body.str());
        run.output(gen_output);
        CubeStats st = stats(cube);
        json echo = run.flags;
        echo["cells"] = st.cell_count;
        echo["shape_observed"] = st.shape;
        atomic_write(gen_output + ".spec.json", echo.dump(2) + "\n");
        run.output(gen_output + ".spec.json");
        run.counters = {{"cells", st.cell_count}};
        if (run.manifest_path.empty()) run.manifest_path = default_manifest(gen_output, "gen");
        run.finish("generated " + std::to_string(st.cell_count) + " cells -> " + gen_output);
        return 0;
    }

    if (pert_cmd->parsed()) {
        run.subcommand = "perturb";
        run.flags = {{"input", pert_io.input}, {"output", pert_io.output},
                     {"dims", pert_io.dims},   {"measure", pert_io.measure},
                     {"p_missing", pert_p},    {"seed", pert_seed}};
        run.input(pert_io.input);
        Cube cube = ingest_csv_file(pert_io.input, pert_io.schema());
        Cube out = perturb_missing(cube, {pert_p, pert_seed});
        std::ostringstream body;
        write_csv(out, body);
        atomic_write(pert_io.output, body.str());
        run.output(pert_io.output);
        json echo = run.flags;
        echo["cells_before"] = cube.cell_count();
        echo["cells_after"] = out.cell_count();
        atomic_write(pert_io.output + ".spec.json", echo.dump(2) + "\n");
        run.output(pert_io.output + ".spec.json");
        run.counters = echo;
        if (run.manifest_path.empty()) run.manifest_path = default_manifest(pert_io.output, "perturb");
        run.finish("kept " + std::to_string(out.cell_count()) + " of " +
                   std::to_string(cube.cell_count()) + " cells -> " + pert_io.output);
        return 0;
    }

    if (rob_cmd->parsed()) {
        run.subcommand = "robustness";
        run.flags = {{"input", rob_io.input}, {"output", rob_io.output},
                     {"dims", rob_io.dims},   {"measure", rob_io.measure},
                     {"probs", rob_probs},    {"trials", rob_trials},
                     {"seed", rob_seed},      {"agg", rob_agg}};
        run.input(rob_io.input);
        Cube cube = ingest_csv_file(rob_io.input, rob_io.schema());
        RobustnessTable table =
            robustness_experiment(cube, parse_list(rob_probs), rob_trials, rob_seed,
                                  agg_from(rob_agg));
        atomic_write(rob_io.output, table.to_csv());
        run.output(rob_io.output);
        json hist = json::object();
        for (const auto& [kappa, row] : table.histogram) hist[csv::format_double(kappa)] = row;
        json out{{"probs", table.probs},
                 {"trials", table.trials},
                 {"unperturbed_kappa", table.unperturbed_kappa},
                 {"histogram", hist}};
        std::cout << out.dump(2) << "\n";
        if (!rob_json_path.empty()) {
            atomic_write(rob_json_path, out.dump(2) + "\n");
            run.output(rob_json_path);
        }
        run.counters = out;
        if (run.manifest_path.empty())
            run.manifest_path = default_manifest(rob_io.output, "robustness");
        run.finish("robustness table -> " + rob_io.output);
        return 0;
    }

    return 2;
}

}  // namespace

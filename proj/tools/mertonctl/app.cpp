#include "app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "merton/config.hpp"
#include "merton/errors.hpp"
#include "merton/market_data.hpp"
#include "merton/stress.hpp"
#include "merton/surface.hpp"
#include "merton/surface_io.hpp"
#include "merton/synthetic.hpp"

namespace mertonctl {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) noexcept {
    std::uint64_t h = seed;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

using namespace merton;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr const char* kOutDirEnv = "MERTON_OUT_DIR";
constexpr std::string_view kPathKeys[] = {"chain", "closes", "rates", "calendar", "out_dir", "asset_vol_surface"};

struct Globals {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned threads = 0;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

RunConfig load_config(const Globals& g) {
    RunConfig config = g.config_path.empty() ? RunConfig{} : RunConfig::load(g.config_path);
    for (const auto& item : g.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        // Paths given on the command line are relative to the working directory.
        if (!value.empty() && std::find(std::begin(kPathKeys), std::end(kPathKeys), key) != std::end(kPathKeys))
            value = fs::absolute(value).lexically_normal().string();
        config.set(key, std::move(value));
    }
    return config;
}

fs::path resolve_out_dir(const Globals& g, const RunConfig& config) {
    fs::path dir;
    if (!g.out_dir.empty()) {
        dir = g.out_dir;
    } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        dir = env;
    } else {
        dir = config.path("out_dir");
    }
    if (dir.empty()) dir = "out";
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

/// Input digest, config echo and timings of one command.
class Manifest {
public:
    explicit Manifest(std::string command) : command_(std::move(command)) {}

    void add_input(const std::string& name, const fs::path& path) {
        const std::string content = read_file(path);
        inputs_.push_back({name, path.string(), fnv1a(content)});
    }
    void add_timing(const std::string& name, double ms) { timings_.emplace_back(name, ms); }
    void add_output(const fs::path& path) { outputs_.push_back(path.filename().string()); }

    std::string digest(const RunConfig& config) const {
        std::uint64_t h = fnv1a(command_);
        for (const auto& in : inputs_) {
            h = fnv1a(in.name, h);
            h = fnv1a(hex64(in.digest), h);
        }
        return hex64(fnv1a(config.echo(), h));
    }

    void write(const fs::path& path, const RunConfig& config) const {
        std::ostringstream os;
        os << "command=" << command_ << '\n';
        os << "inputs_digest=" << digest(config) << '\n';
        for (const auto& in : inputs_) os << "input." << in.name << '=' << in.path << ' ' << hex64(in.digest) << '\n';
        for (const auto& out : outputs_) os << "output=" << out << '\n';
        std::istringstream echo(config.echo());
        for (std::string line; std::getline(echo, line);) os << "config." << line << '\n';
        for (const auto& [name, ms] : timings_) os << "timing." << name << "_ms=" << ms << '\n';
        write_text_file(path, os.str());
    }

private:
    struct Input {
        std::string name;
        std::string path;
        std::uint64_t digest;
    };
    std::string command_;
    std::vector<Input> inputs_;
    std::vector<std::pair<std::string, double>> timings_;
    std::vector<std::string> outputs_;
};

void attach_config(SurfaceGrid& grid, const RunConfig& config) {
    std::istringstream echo(config.echo());
    for (std::string line; std::getline(echo, line);) {
        const auto eq = line.find('=');
        grid.set_meta("config." + line.substr(0, eq), line.substr(eq + 1));
    }
}

std::string base_name(SurfaceKind kind) {
    std::string name(to_string(kind));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return name;
}

void write_surface(const SurfaceGrid& grid, const fs::path& dir, bool heatmap, Manifest& manifest) {
    const std::string name = base_name(grid.kind);
    std::vector<ExportFormat> formats{ExportFormat::GridText, ExportFormat::RecordsText};
    if (heatmap) formats.push_back(ExportFormat::HeatmapSvg);
    for (const auto format : formats) {
        const fs::path path = dir / (name + std::string(file_suffix(format)));
        export_surface(grid, format, path);
        manifest.add_output(path);
    }
}

SurfaceGrid require_surface(const fs::path& path, const std::string& what) {
    if (!fs::exists(path))
        throw DependencyError(what + " surface not found at '" + path.string() + "'; run the step that produces it first");
    return import_records(path);
}

MarketSnapshot load_snapshot(const RunConfig& config, Manifest& manifest) {
    const SnapshotSources sources = snapshot_sources(config);
    const SnapshotConfig snap_config = snapshot_config(config);
    if (!sources.chain.empty()) manifest.add_input("chain", sources.chain);
    manifest.add_input("closes", sources.closes);
    manifest.add_input("rates", sources.rates);
    if (!sources.calendar.empty()) manifest.add_input("calendar", sources.calendar);
    return build_snapshot(sources, snap_config);
}

void print_stats(std::ostream& out, const SurfaceGrid& grid) {
    const SurfaceStats s = summarize(grid);
    out << to_string(grid.kind) << ": " << grid.rows() << "x" << grid.cols() << " cells, " << s.flagged
        << " flagged";
    if (s.used > 0) out << ", unflagged range [" << s.min << ", " << s.max << "], mean " << s.mean;
    out << '\n';
}

// --- commands -------------------------------------------------------------

struct SynthesizeArgs {
    std::uint64_t seed = 0;
    std::string dir;
    int history_days = 420;
    int window_length = 400;
};

int cmd_synthesize(const Globals& g, const SynthesizeArgs& a, std::ostream& out) {
    const RunConfig config = load_config(g);
    const fs::path dir = a.dir.empty() ? resolve_out_dir(g, config) : fs::path(a.dir);
    SynthesisOptions options;
    options.seed = a.seed;
    options.history_days = a.history_days;
    options.window_length = a.window_length;
    for (const auto& path : write_fixture(options, dir)) out << "wrote " << path.string() << '\n';
    return 0;
}

int cmd_ingest(const Globals& g, std::ostream& out) {
    const RunConfig config = load_config(g);
    config.validate();
    const fs::path dir = resolve_out_dir(g, config);
    Manifest manifest("ingest");
    const auto t0 = Clock::now();
    const MarketSnapshot snap = load_snapshot(config, manifest);
    manifest.add_timing("ingest", elapsed_ms(t0));

    std::ostringstream os;
    std::istringstream echo(config.echo());
    for (std::string line; std::getline(echo, line);) os << "# config." << line << '\n';
    const CleaningReport& c = snap.cleaning;
    os << "as_of=" << format_iso_date(snap.as_of) << '\n'
       << "equity_close=" << std::setprecision(15) << snap.equity_close << '\n'
       << "window_start=" << format_iso_date(snap.close_history.front().date) << '\n'
       << "window_length=" << snap.close_history.size() << '\n'
       << "as_of_rate=" << snap.as_of_rate() << '\n'
       << "quotes_read=" << c.input_count << '\n'
       << "quotes_kept=" << c.kept.size() << '\n'
       << "dropped_low_bid=" << c.dropped_low_bid << '\n'
       << "dropped_long_maturity=" << c.dropped_long_maturity << '\n'
       << "dropped_strike_band=" << c.dropped_strike_band << '\n'
       << "winsorized=" << c.winsorized << '\n'
       << "expiries_snapped=" << c.snapped << '\n';
    if (c.winsor_cap) os << "winsor_cap=" << *c.winsor_cap << '\n';
    for (const auto& r : snap.chain_rejects)
        os << "rejected_row=" << r.row << ' ' << r.rule << ' ' << r.value << '\n';
    for (const Date d : snap.excluded_close_dates) os << "excluded_close=" << format_iso_date(d) << '\n';
    for (const auto& imp : snap.rates.imputations)
        os << "rate_imputed=" << format_iso_date(imp.filled) << " from " << format_iso_date(imp.source) << ' '
           << imp.value << '\n';
    for (const auto& w : snap.warnings) os << "warning=" << w << '\n';

    const fs::path report = dir / "ingest_report.txt";
    write_text_file(report, os.str());
    manifest.add_output(report);
    manifest.write(dir / "manifest_ingest.txt", config);

    out << "as of " << format_iso_date(snap.as_of) << ": S_0 = " << snap.equity_close << ", " << c.kept.size()
        << " of " << c.input_count << " quotes kept, " << snap.chain_rejects.size() << " rows rejected, "
        << snap.rates.imputations.size() << " rates imputed\n";
    for (const auto& w : snap.warnings) out << "warning: " << w << '\n';
    return 0;
}

int cmd_calibrate(const Globals& g, const std::string& task_name, std::ostream& out) {
    const CalibrationTask task = parse_calibration_task(task_name);
    const RunConfig config = load_config(g);
    config.validate();
    const fs::path dir = resolve_out_dir(g, config);
    Manifest manifest("calibrate " + task_name);
    const SurfaceBuildConfig build = surface_build_config(config, g.threads);

    std::optional<SurfaceGrid> asset_vol;
    const bool tree_task = task == CalibrationTask::Drift || task == CalibrationTask::UpProb;
    if (tree_task && !build.sigma_override) {
        const fs::path path =
            config.is_set("asset_vol_surface") ? config.path("asset_vol_surface") : dir / "asset_vol.records.csv";
        asset_vol = require_surface(path, "asset-vol");
        if (asset_vol->kind != SurfaceKind::AssetVol)
            throw DependencyError("'" + path.string() + "' is not an ASSET_VOL surface");
        manifest.add_input("asset_vol_surface", path);
    }

    auto t0 = Clock::now();
    const MarketSnapshot snap = load_snapshot(config, manifest);
    const SurfaceAxes axes = surface_axes(config, task, snap);
    manifest.add_timing("load", elapsed_ms(t0));

    t0 = Clock::now();
    SurfaceGrid grid = build_surface(snap, axes, task, build, asset_vol ? &*asset_vol : nullptr);
    manifest.add_timing("calibrate", elapsed_ms(t0));
    attach_config(grid, config);

    const bool heatmap = config.flag("heatmap");
    t0 = Clock::now();
    write_surface(grid, dir, heatmap, manifest);
    print_stats(out, grid);
    if (task == CalibrationTask::UpProb) {
        const SurfaceGrid downside = downside_surface(grid);
        write_surface(downside, dir, heatmap, manifest);
        print_stats(out, downside);
    }
    manifest.add_timing("export", elapsed_ms(t0));
    manifest.write(dir / ("manifest_calibrate_" + task_name + ".txt"), config);
    out << "inputs digest " << manifest.digest(config) << '\n';

    const bool all_infeasible = std::all_of(grid.flags.begin(), grid.flags.end(),
                                            [](std::uint8_t f) { return (f & kFlagInfeasible) != 0; });
    if (all_infeasible) throw CalibrationInfeasible("every cell of the surface is infeasible");
    return 0;
}

struct SurfaceArgs {
    std::string op;
    std::string a;
    std::string b;
};

int cmd_surface(const Globals& g, const SurfaceArgs& args, std::ostream& out) {
    const RunConfig config = load_config(g);
    const fs::path dir = resolve_out_dir(g, config);
    Manifest manifest("surface " + args.op);
    const fs::path a = args.a.empty() ? dir / "asset_vol.records.csv" : fs::path(args.a);
    const fs::path b = args.b.empty() ? dir / "equity_vol.records.csv" : fs::path(args.b);
    const SurfaceGrid sa = require_surface(a, "first");
    const SurfaceGrid sb = require_surface(b, "second");
    manifest.add_input("a", a);
    manifest.add_input("b", b);
    SurfaceGrid result = args.op == "diff" ? diff_surface(sa, sb) : relative_diff_surface(sa, sb);
    attach_config(result, config);
    write_surface(result, dir, config.flag("heatmap"), manifest);
    manifest.write(dir / ("manifest_surface_" + args.op + ".txt"), config);
    print_stats(out, result);
    return 0;
}

int cmd_stress(const Globals& g, const std::vector<std::string>& surface_args, std::ostream& out) {
    const RunConfig config = load_config(g);
    const fs::path dir = resolve_out_dir(g, config);
    Manifest manifest("stress");
    const StressCoordinate coordinate = stress_coordinate(config);

    std::vector<fs::path> paths;
    for (const auto& s : surface_args) paths.emplace_back(s);
    if (paths.empty() && config.is_set("stress_surfaces")) {
        std::istringstream list(config.raw("stress_surfaces"));
        for (std::string item; std::getline(list, item, ',');) {
            fs::path p(item);
            if (p.is_relative() && !config.base_dir().empty()) p = config.base_dir() / p;
            paths.push_back(p);
        }
    }
    if (paths.empty()) paths.push_back(dir / "downside_prob.records.csv");

    std::vector<std::pair<Date, SurfaceGrid>> dated;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        SurfaceGrid grid = require_surface(paths[i], "downside-probability");
        const auto as_of = grid.meta("as_of");
        if (!as_of) throw DataError("'" + paths[i].string() + "' carries no as_of date");
        const auto date = parse_iso_date(*as_of);
        if (!date) throw DataError("'" + paths[i].string() + "' has a malformed as_of date");
        manifest.add_input("surface" + std::to_string(i), paths[i]);
        dated.emplace_back(*date, std::move(grid));
    }
    const auto series = signal_series(std::move(dated), coordinate);

    std::ostringstream os;
    std::istringstream echo(config.echo());
    for (std::string line; std::getline(echo, line);) os << "# config." << line << '\n';
    for (const auto& s : series) {
        os << "# " << format_iso_date(s.as_of) << " read M=" << s.reading.used.moneyness
           << " T=" << s.reading.used.maturity_days << (s.reading.nearest ? " (nearest cell)" : "") << '\n';
    }
    os << to_signal_text(series);
    const fs::path file = dir / "signals.csv";
    write_text_file(file, os.str());
    manifest.add_output(file);
    manifest.write(dir / "manifest_stress.txt", config);

    for (const auto& s : series) {
        out << format_iso_date(s.as_of) << ' ' << s.downside_probability << ' ' << to_string(s.action)
            << (s.reading.reliable ? "" : " (unreliable)") << (s.reading.nearest ? " (nearest cell)" : "") << '\n';
    }
    return 0;
}

struct ExportArgs {
    std::string input;
    std::string format = "grid";
    std::string output;
};

int cmd_export(const Globals& g, const ExportArgs& args, std::ostream& out) {
    const ExportFormat format = parse_export_format(args.format);
    const SurfaceGrid grid = require_surface(args.input, "input");
    fs::path target(args.output);
    if (target.empty()) {
        const RunConfig config = load_config(g);
        target = resolve_out_dir(g, config) / (base_name(grid.kind) + std::string(file_suffix(format)));
    }
    export_surface(grid, format, target);
    out << "wrote " << target.string() << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Merton structural credit toolkit: ingestion, calibration surfaces and stress signals", "mertonctl"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("-c,--config", g.config_path, "key = value run configuration");
    app.add_option("-s,--set", g.overrides, "override a config key (key=value), repeatable");
    app.add_option("-o,--out-dir", g.out_dir, std::string("output directory (overrides ") + kOutDirEnv + ")");
    app.add_option("-j,--threads", g.threads, "worker threads for surface cells (0: all cores)");

    SynthesizeArgs syn;
    auto* synthesize = app.add_subcommand("synthesize", "write a seeded synthetic fixture");
    synthesize->add_option("--seed", syn.seed, "random seed")->required();
    synthesize->add_option("--dir", syn.dir, "fixture directory (default: output directory)");
    synthesize->add_option("--history-days", syn.history_days, "weekday closes to generate");
    synthesize->add_option("--window-length", syn.window_length, "window length written into the configs");

    auto* ingest = app.add_subcommand("ingest", "load, clean and align market data; write a report");

    std::string task;
    auto* calibrate = app.add_subcommand("calibrate", "calibrate a surface");
    calibrate->add_option("task", task, "asset-vol | equity-vol | drift | prob")
        ->required()
        ->check(CLI::IsMember({"asset-vol", "equity-vol", "drift", "prob"}));

    SurfaceArgs surf;
    auto* surface = app.add_subcommand("surface", "combine two volatility surfaces");
    surface->add_option("op", surf.op, "diff | reldiff")->required()->check(CLI::IsMember({"diff", "reldiff"}));
    surface->add_option("--a", surf.a, "minuend records (default: asset_vol.records.csv)");
    surface->add_option("--b", surf.b, "subtrahend records (default: equity_vol.records.csv)");

    std::vector<std::string> stress_surfaces;
    auto* stress = app.add_subcommand("stress", "downside-probability signals at the monitor coordinate");
    stress->add_option("--surface", stress_surfaces, "dated DOWNSIDE_PROB records, repeatable");

    ExportArgs exp;
    auto* export_cmd = app.add_subcommand("export", "re-encode a records file");
    export_cmd->add_option("input", exp.input, "surface records file")->required();
    export_cmd->add_option("-f,--format", exp.format, "grid | records | heatmap");
    export_cmd->add_option("--output", exp.output, "destination file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ErrorCategory::Usage);
    }

    try {
        if (*synthesize) return cmd_synthesize(g, syn, out);
        if (*ingest) return cmd_ingest(g, out);
        if (*calibrate) return cmd_calibrate(g, task, out);
        if (*surface) return cmd_surface(g, surf, out);
        if (*stress) return cmd_stress(g, stress_surfaces, out);
        if (*export_cmd) return cmd_export(g, exp, out);
    } catch (const Error& e) {
        err << "error[" << to_string(e.category()) << "]: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const fs::filesystem_error& e) {
        err << "error[io]: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::Io);
    } catch (const std::exception& e) {
        err << "error[numerical]: " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::Numerical);
    }
    return static_cast<int>(ErrorCategory::Usage);
}

}  // namespace mertonctl

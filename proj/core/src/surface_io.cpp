#include "merton/surface_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "merton/errors.hpp"

namespace merton {

namespace {

constexpr std::string_view kRecordsHeader = "maturity_days,moneyness,value,residual,flags";

std::string fmt(double x, int digits) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

void write_metadata(std::ostringstream& os, const SurfaceGrid& s) {
    os << "# kind=" << to_string(s.kind) << '\n';
    for (const auto& [key, value] : s.metadata) {
        std::string clean = value;
        std::replace(clean.begin(), clean.end(), '\n', ' ');
        os << "# " << key << '=' << clean << '\n';
    }
}

double parse_cell(const std::string& text, std::size_t line_no) {
    if (text == "nan" || text == "-nan") return std::numeric_limits<double>::quiet_NaN();
    const auto v = csv::parse_double(text);
    if (!v) throw DataError("records line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return *v;
}

}  // namespace

std::string_view to_string(ExportFormat format) noexcept {
    switch (format) {
        case ExportFormat::GridText: return "grid";
        case ExportFormat::RecordsText: return "records";
        case ExportFormat::HeatmapSvg: return "heatmap";
    }
    return "unknown";
}

ExportFormat parse_export_format(std::string_view text) {
    for (auto f : {ExportFormat::GridText, ExportFormat::RecordsText, ExportFormat::HeatmapSvg})
        if (to_string(f) == text) return f;
    throw UsageError("unknown export format '" + std::string(text) + "' (grid|records|heatmap)");
}

std::string_view file_suffix(ExportFormat format) noexcept {
    switch (format) {
        case ExportFormat::GridText: return ".grid.csv";
        case ExportFormat::RecordsText: return ".records.csv";
        case ExportFormat::HeatmapSvg: return ".svg";
    }
    return "";
}

std::string to_grid_text(const SurfaceGrid& surface) {
    surface.validate();
    std::ostringstream os;
    write_metadata(os, surface);
    os << "maturity_days\\moneyness";
    for (const double m : surface.moneyness) os << ',' << fmt(m, 10);
    os << '\n';
    for (std::size_t r = 0; r < surface.rows(); ++r) {
        os << surface.maturity_days[r];
        for (std::size_t c = 0; c < surface.cols(); ++c) os << ',' << fmt(surface.value(r, c), 10);
        os << '\n';
    }
    return os.str();
}

std::string to_records_text(const SurfaceGrid& surface) {
    surface.validate();
    std::ostringstream os;
    write_metadata(os, surface);
    os << kRecordsHeader << '\n';
    for (std::size_t r = 0; r < surface.rows(); ++r) {
        for (std::size_t c = 0; c < surface.cols(); ++c) {
            const std::size_t i = surface.index(r, c);
            os << surface.maturity_days[r] << ',' << fmt(surface.moneyness[c], 17) << ','
               << fmt(surface.values[i], 17) << ',' << fmt(surface.residuals[i], 17) << ','
               << flag_codes(surface.flags[i]) << '\n';
        }
    }
    return os.str();
}

SurfaceGrid parse_records_text(std::istream& in) {
    struct Record {
        double value;
        double residual;
        std::uint8_t flags;
    };
    std::vector<std::pair<std::string, std::string>> metadata;
    std::optional<SurfaceKind> kind;
    std::map<std::pair<int, double>, Record> cells;
    bool header_seen = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = csv::trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            const std::string_view body = csv::trim(text.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            std::string key(body.substr(0, eq));
            std::string value(body.substr(eq + 1));
            if (key == "kind")
                kind = parse_surface_kind(value);
            else
                metadata.emplace_back(std::move(key), std::move(value));
            continue;
        }
        if (!header_seen) {
            if (text != kRecordsHeader) throw SchemaError("maturity_days", "records file has an unexpected header");
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(text);
        if (fields.size() != 5)
            throw DataError("records line " + std::to_string(line_no) + ": expected 5 fields");
        int maturity = 0;
        try {
            std::size_t used = 0;
            maturity = std::stoi(fields[0], &used);
            if (used != fields[0].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DataError("records line " + std::to_string(line_no) + ": bad maturity '" + fields[0] + "'");
        }
        const double m = parse_cell(fields[1], line_no);
        const Record rec{parse_cell(fields[2], line_no), parse_cell(fields[3], line_no), parse_flag_codes(fields[4])};
        if (!cells.emplace(std::make_pair(maturity, m), rec).second)
            throw DataError("records line " + std::to_string(line_no) + ": duplicate cell");
    }
    if (!header_seen) throw SchemaError("maturity_days", "records file has no header row");
    if (!kind) throw DataError("records file does not declare its kind");

    std::vector<int> maturities;
    std::vector<double> moneyness;
    for (const auto& [key, rec] : cells) {
        maturities.push_back(key.first);
        moneyness.push_back(key.second);
    }
    std::sort(maturities.begin(), maturities.end());
    maturities.erase(std::unique(maturities.begin(), maturities.end()), maturities.end());
    std::sort(moneyness.begin(), moneyness.end());
    moneyness.erase(std::unique(moneyness.begin(), moneyness.end()), moneyness.end());
    if (cells.size() != maturities.size() * moneyness.size())
        throw DataError("records file does not cover a full grid");

    SurfaceGrid grid = SurfaceGrid::blank(*kind, moneyness, maturities);
    for (const auto& [key, rec] : cells) {
        const auto r = static_cast<std::size_t>(
            std::lower_bound(maturities.begin(), maturities.end(), key.first) - maturities.begin());
        const auto c = static_cast<std::size_t>(
            std::lower_bound(moneyness.begin(), moneyness.end(), key.second) - moneyness.begin());
        const std::size_t i = grid.index(r, c);
        grid.values[i] = rec.value;
        grid.residuals[i] = rec.residual;
        grid.flags[i] = rec.flags;
    }
    grid.metadata = std::move(metadata);
    grid.validate();
    return grid;
}

SurfaceGrid import_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open surface records '" + path.string() + "'");
    return parse_records_text(in);
}

namespace {

struct Rgb {
    double r, g, b;
};

Rgb viridis(double t) {
    static constexpr std::array<Rgb, 9> kStops{{
        {0x44, 0x01, 0x54}, {0x47, 0x2d, 0x7b}, {0x3b, 0x52, 0x8b}, {0x2c, 0x72, 0x8e}, {0x21, 0x91, 0x8c},
        {0x28, 0xae, 0x80}, {0x5e, 0xc9, 0x62}, {0xad, 0xdc, 0x30}, {0xfd, 0xe7, 0x25},
    }};
    t = std::clamp(t, 0.0, 1.0) * (kStops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), kStops.size() - 2);
    const double f = t - static_cast<double>(i);
    const Rgb& a = kStops[i];
    const Rgb& b = kStops[i + 1];
    return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

std::string hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

std::string escape_xml(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_heatmap_svg(const SurfaceGrid& surface) {
    surface.validate();
    const SurfaceStats stats = summarize(surface);
    const double lo = stats.used ? stats.min : 0.0;
    const double hi = stats.used ? stats.max : 1.0;

    constexpr double left = 80, top = 50, plot_w = 720, bar_gap = 30, bar_w = 20;
    const double cell_w = plot_w / static_cast<double>(surface.cols());
    const double cell_h = std::max(12.0, 360.0 / static_cast<double>(surface.rows()));
    const double plot_h = cell_h * static_cast<double>(surface.rows());
    const double width = left + plot_w + bar_gap + bar_w + 90;
    const double height = top + plot_h + 70;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::string title(to_string(surface.kind));
    if (const auto as_of = surface.meta("as_of")) title += " as of " + *as_of;
    os << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << escape_xml(title) << "</text>\n";

    for (std::size_t r = 0; r < surface.rows(); ++r) {
        for (std::size_t c = 0; c < surface.cols(); ++c) {
            const std::size_t i = surface.index(r, c);
            const double v = surface.values[i];
            const bool usable = surface.flags[i] == kFlagNone && std::isfinite(v);
            const std::string fill = usable ? hex(viridis(hi > lo ? (v - lo) / (hi - lo) : 0.5)) : "#d0d0d0";
            os << "<rect x=\"" << fmt(left + c * cell_w, 6) << "\" y=\"" << fmt(top + r * cell_h, 6)
               << "\" width=\"" << fmt(cell_w, 6) << "\" height=\"" << fmt(cell_h, 6) << "\" fill=\"" << fill
               << "\"><title>T=" << surface.maturity_days[r] << " M=" << fmt(surface.moneyness[c], 6)
               << " value=" << fmt(v, 6) << " flags=" << escape_xml(flag_codes(surface.flags[i]))
               << "</title></rect>\n";
        }
    }

    // Axis ticks: every row, and about ten moneyness labels.
    for (std::size_t r = 0; r < surface.rows(); ++r)
        os << "<text x=\"" << left - 6 << "\" y=\"" << fmt(top + (r + 0.5) * cell_h + 4, 6)
           << "\" text-anchor=\"end\">" << surface.maturity_days[r] << "</text>\n";
    const std::size_t stride = std::max<std::size_t>(1, (surface.cols() + 9) / 10);
    for (std::size_t c = 0; c < surface.cols(); c += stride)
        os << "<text x=\"" << fmt(left + (c + 0.5) * cell_w, 6) << "\" y=\"" << fmt(top + plot_h + 16, 6)
           << "\" text-anchor=\"middle\">" << fmt(surface.moneyness[c], 4) << "</text>\n";
    const bool equity = surface.kind == SurfaceKind::EquityVol;
    os << "<text x=\"" << fmt(left + plot_w / 2, 6) << "\" y=\"" << fmt(top + plot_h + 40, 6)
       << "\" text-anchor=\"middle\">moneyness (M = " << (equity ? "K/S_0" : "K/V_0") << ")</text>\n";
    os << "<text transform=\"translate(20," << fmt(top + plot_h / 2, 6)
       << ") rotate(-90)\" text-anchor=\"middle\">maturity (days)</text>\n";

    // Color bar, high values on top.
    const double bar_x = left + plot_w + bar_gap;
    constexpr int kBarSteps = 64;
    for (int k = 0; k < kBarSteps; ++k) {
        const double t = 1.0 - (k + 0.5) / kBarSteps;
        os << "<rect x=\"" << bar_x << "\" y=\"" << fmt(top + k * plot_h / kBarSteps, 6) << "\" width=\"" << bar_w
           << "\" height=\"" << fmt(plot_h / kBarSteps + 0.5, 6) << "\" fill=\"" << hex(viridis(t)) << "\"/>\n";
    }
    os << "<text x=\"" << bar_x + bar_w + 4 << "\" y=\"" << top + 10 << "\">" << fmt(hi, 4) << "</text>\n";
    os << "<text x=\"" << bar_x + bar_w + 4 << "\" y=\"" << fmt(top + plot_h, 6) << "\">" << fmt(lo, 4)
       << "</text>\n";
    os << "<text x=\"" << left << "\" y=\"" << fmt(height - 8, 6) << "\" fill=\"#555\">grey: flagged or missing ("
       << stats.flagged << " of " << stats.cells << " cells)</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

void export_surface(const SurfaceGrid& surface, ExportFormat format, const std::filesystem::path& path) {
    switch (format) {
        case ExportFormat::GridText: write_text_file(path, to_grid_text(surface)); return;
        case ExportFormat::RecordsText: write_text_file(path, to_records_text(surface)); return;
        case ExportFormat::HeatmapSvg: write_text_file(path, to_heatmap_svg(surface)); return;
    }
}

}  // namespace merton

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "experiments.hpp"
#include "grid.hpp"
#include "hypotheses.hpp"

namespace anisolevy {

// ---------------------------------------------------------------------------
// Atomic file output: write to <path>.tmp in the same directory, then rename.
// Readers never observe a half-written file.
// ---------------------------------------------------------------------------

inline void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path() && !target.parent_path().empty()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) fail(errc::io, "cannot create directory " + target.parent_path().string());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), errc::io, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        require(out.good(), errc::io, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) fail(errc::io, "rename failed for " + target.string() + ": " + ec.message());
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), errc::io, "cannot open " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    require(!in.bad(), errc::io, "read failed for " + path);
    return content;
}

// ---------------------------------------------------------------------------
// CSV: comma separator, '.' decimal point, LF line endings, %.17g values.
// ---------------------------------------------------------------------------

inline std::string to_csv(const std::vector<std::string>& columns,
                          const std::vector<std::vector<double>>& rows) {
    require(!columns.empty(), errc::invalid_argument, "to_csv: no columns");
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        require(row.size() == columns.size(), errc::invalid_argument,
                "to_csv: row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::string report_to_csv(const experiment_report& rep) {
    return to_csv(rep.columns, rep.rows);
}

// ---------------------------------------------------------------------------
// JSON views of the report types.
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const experiment_report& rep) {
    nlohmann::json j;
    j["id"] = rep.id;
    j["version"] = rep.version;
    j["seed"] = rep.seed;
    j["replicas"] = rep.replicas;
    j["batch"] = rep.batch;
    j["params"] = rep.params;
    j["fitted"] = rep.fitted;
    j["pass"] = rep.pass;
    j["verdict"] = rep.verdict;
    j["columns"] = rep.columns;
    j["rows"] = rep.rows;
    return j;
}

inline nlohmann::json condition_report_to_json(const condition_report& rep) {
    nlohmann::json j;
    j["rule"] = rep.rule;
    j["params"] = rep.params;
    j["satisfied"] = rep.satisfied;
    if (!rep.note.empty()) j["note"] = rep.note;
    j["inequalities"] = nlohmann::json::array();
    for (const auto& iq : rep.inequalities) {
        j["inequalities"].push_back({{"name", iq.name},
                                     {"lhs", iq.lhs},
                                     {"rhs", iq.rhs},
                                     {"margin", iq.margin},
                                     {"satisfied", iq.satisfied}});
    }
    return j;
}

inline nlohmann::json plan_to_json(const regularity_plan& plan) {
    nlohmann::json j;
    j["feasible"] = plan.feasible;
    j["eta"] = plan.eta;
    j["c"] = plan.c;
    j["lambda"] = plan.lambda;
    j["b_cap"] = plan.b_cap;
    j["flow_terms"] = plan.flow_terms;
    j["window_terms"] = plan.window_terms;
    j["coupling_terms"] = plan.coupling_terms;
    if (!plan.note.empty()) j["note"] = plan.note;
    return j;
}

// ---------------------------------------------------------------------------
// Binary formats. Both carry a 16-byte header: 8-byte magic, then two
// little-endian uint32 fields, followed by row-major float64 payload.
//   ALVSMP01  d, n        n x d sample matrix
//   ALVGRD01  d, nodes    grid values; sidecar <path>.json carries the axes
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

inline std::uint32_t get_u32(const std::string& s, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    return v;
}

inline void put_f64(std::string& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    for (int i = 0; i < 8; ++i) out += static_cast<char>((bits >> (8 * i)) & 0xff);
}

inline double get_f64(const std::string& s, std::size_t off) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

}  // namespace detail

inline void write_samples(const std::string& path, std::size_t dim,
                          const std::vector<double>& points) {
    require(dim > 0 && points.size() % dim == 0, errc::invalid_argument,
            "write_samples: bad sample matrix");
    const std::size_t n = points.size() / dim;
    require(n <= 0xffffffffULL && dim <= 0xffffffffULL, errc::invalid_argument,
            "write_samples: too large for the format");
    std::string out;
    out.reserve(16 + points.size() * 8);
    out += "ALVSMP01";
    detail::put_u32(out, static_cast<std::uint32_t>(dim));
    detail::put_u32(out, static_cast<std::uint32_t>(n));
    for (double x : points) detail::put_f64(out, x);
    write_file_atomic(path, out);
}

struct sample_matrix {
    std::size_t dim = 0;
    std::vector<double> points;  // row-major n x dim
    std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }
};

inline sample_matrix read_samples(const std::string& path) {
    const std::string s = read_file(path);
    require(s.size() >= 16 && s.compare(0, 8, "ALVSMP01") == 0, errc::io,
            "read_samples: bad header in " + path);
    sample_matrix m;
    m.dim = detail::get_u32(s, 8);
    const std::size_t n = detail::get_u32(s, 12);
    require(m.dim > 0, errc::io, "read_samples: zero dimension");
    require(s.size() == 16 + 8 * n * m.dim, errc::io, "read_samples: truncated payload");
    m.points.resize(n * m.dim);
    for (std::size_t i = 0; i < m.points.size(); ++i)
        m.points[i] = detail::get_f64(s, 16 + 8 * i);
    return m;
}

inline void write_grid(const std::string& path, const grid_density& g) {
    g.grid.validate();
    require(g.values.size() == g.grid.node_count(), errc::invalid_argument,
            "write_grid: value count mismatch");
    require(g.values.size() <= 0xffffffffULL, errc::invalid_argument,
            "write_grid: too large for the format");
    std::string out;
    out.reserve(16 + g.values.size() * 8);
    out += "ALVGRD01";
    detail::put_u32(out, static_cast<std::uint32_t>(g.grid.rank()));
    detail::put_u32(out, static_cast<std::uint32_t>(g.values.size()));
    for (double v : g.values) detail::put_f64(out, v);
    write_file_atomic(path, out);

    nlohmann::json side;
    side["origin"] = g.grid.origin;
    side["step"] = g.grid.step;
    side["shape"] = g.grid.shape;
    side["meta"] = g.meta;
    write_file_atomic(path + ".json", side.dump(2) + "\n");
}

inline grid_density read_grid(const std::string& path) {
    const std::string s = read_file(path);
    require(s.size() >= 16 && s.compare(0, 8, "ALVGRD01") == 0, errc::io,
            "read_grid: bad header in " + path);
    const std::size_t d = detail::get_u32(s, 8);
    const std::size_t nodes = detail::get_u32(s, 12);
    require(s.size() == 16 + 8 * nodes, errc::io, "read_grid: truncated payload");

    grid_density g;
    const nlohmann::json side = nlohmann::json::parse(read_file(path + ".json"));
    g.grid.origin = side.at("origin").get<std::vector<double>>();
    g.grid.step = side.at("step").get<std::vector<double>>();
    g.grid.shape = side.at("shape").get<std::vector<std::size_t>>();
    if (side.contains("meta"))
        g.meta = side.at("meta").get<std::map<std::string, double>>();
    require(g.grid.rank() == d && g.grid.node_count() == nodes, errc::io,
            "read_grid: sidecar does not match payload");
    g.values.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) g.values[i] = detail::get_f64(s, 16 + 8 * i);
    return g;
}

// ---------------------------------------------------------------------------
// Minimal self-contained SVG log-log plot (decade grid, one polyline per
// series, optional power-law guide through the first point of the first
// series).
// ---------------------------------------------------------------------------

struct plot_series {
    std::string name;
    std::vector<double> xs, ys;
};

inline std::string loglog_svg(const std::string& title, const std::string& xlabel,
                              const std::string& ylabel, const std::vector<plot_series>& series,
                              double guide_slope = 0.0, bool draw_guide = false) {
    require(!series.empty(), errc::invalid_argument, "loglog_svg: no series");
    double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
    for (const auto& s : series) {
        require(s.xs.size() == s.ys.size() && !s.xs.empty(), errc::invalid_argument,
                "loglog_svg: bad series " + s.name);
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            require(s.xs[i] > 0.0 && s.ys[i] > 0.0, errc::invalid_argument,
                    "loglog_svg: log axes need positive data");
            lx0 = std::min(lx0, std::log10(s.xs[i]));
            lx1 = std::max(lx1, std::log10(s.xs[i]));
            ly0 = std::min(ly0, std::log10(s.ys[i]));
            ly1 = std::max(ly1, std::log10(s.ys[i]));
        }
    }
    if (lx1 - lx0 < 1e-9) { lx0 -= 0.5; lx1 += 0.5; }
    if (ly1 - ly0 < 1e-9) { ly0 -= 0.5; ly1 += 0.5; }
    const double padx = 0.05 * (lx1 - lx0), pady = 0.08 * (ly1 - ly0);
    lx0 -= padx; lx1 += padx; ly0 -= pady; ly1 += pady;

    const double W = 720, H = 520, ml = 70, mr = 20, mt = 40, mb = 55;
    auto X = [&](double lx) { return ml + (lx - lx0) / (lx1 - lx0) * (W - ml - mr); };
    auto Y = [&](double ly) { return H - mb - (ly - ly0) / (ly1 - ly0) * (H - mb - mt); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_double(W) +
           "\" height=\"" + fmt_double(H) + "\" viewBox=\"0 0 " + fmt_double(W) + " " +
           fmt_double(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt_double(W / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

    // decade grid
    for (int e = static_cast<int>(std::ceil(lx0)); e <= static_cast<int>(std::floor(lx1)); ++e) {
        const double x = X(e);
        svg += "<line x1=\"" + fmt_double(x) + "\" y1=\"" + fmt_double(mt) + "\" x2=\"" +
               fmt_double(x) + "\" y2=\"" + fmt_double(H - mb) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(H - mb + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(e) + "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(ly0)); e <= static_cast<int>(std::floor(ly1)); ++e) {
        const double y = Y(e);
        svg += "<line x1=\"" + fmt_double(ml) + "\" y1=\"" + fmt_double(y) + "\" x2=\"" +
               fmt_double(W - mr) + "\" y2=\"" + fmt_double(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_double(ml - 6) + "\" y=\"" + fmt_double(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" +
               std::to_string(e) + "</text>\n";
    }
    svg += "<rect x=\"" + fmt_double(ml) + "\" y=\"" + fmt_double(mt) + "\" width=\"" +
           fmt_double(W - ml - mr) + "\" height=\"" + fmt_double(H - mt - mb) +
           "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + fmt_double((ml + W - mr) / 2) + "\" y=\"" + fmt_double(H - 14) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + xlabel +
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt_double((mt + H - mb) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + fmt_double((mt + H - mb) / 2) + ")\">" + ylabel +
           "</text>\n";

    if (draw_guide) {
        const double gx0 = series[0].xs.front(), gy0 = series[0].ys.front();
        const double la = std::log10(gy0) - guide_slope * std::log10(gx0);
        svg += "<line x1=\"" + fmt_double(X(lx0)) + "\" y1=\"" +
               fmt_double(Y(guide_slope * lx0 + la)) + "\" x2=\"" + fmt_double(X(lx1)) +
               "\" y2=\"" + fmt_double(Y(guide_slope * lx1 + la)) +
               "\" stroke=\"#999999\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    }

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* col = palette[si % 5];
        std::string pts;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            pts += fmt_double(X(std::log10(s.xs[i]))) + "," +
                   fmt_double(Y(std::log10(s.ys[i]))) + " ";
            svg += "<circle cx=\"" + fmt_double(X(std::log10(s.xs[i]))) + "\" cy=\"" +
                   fmt_double(Y(std::log10(s.ys[i]))) + "\" r=\"3\" fill=\"" + col + "\"/>\n";
        }
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + std::string(col) +
               "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + fmt_double(W - mr - 8) + "\" y=\"" +
               fmt_double(mt + 18 + 16 * static_cast<double>(si)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
               col + "\">" + s.name + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace anisolevy

/*
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "fdb/hammer.h"

namespace fdb::hammer {

std::vector<Summary> aggregate(const std::vector<BenchRecord>& records, const std::string& backend,
                               const std::string& pattern) {
    if (records.empty()) throw std::invalid_argument("no benchmark records to aggregate");

    struct Group {
        std::uint64_t minStart = ~0ull;
        std::uint64_t maxEnd = 0;
        Summary summary;
    };
    // Keyed by (phase, role); map iteration keeps output order deterministic.
    std::map<std::pair<std::string, std::string>, Group> groups;
    for (const auto& r : records) {
        if (r.failed) throw std::invalid_argument("cannot aggregate a failed worker record");
        auto& g = groups[{r.phase, r.role}];
        g.summary.backend = backend;
        g.summary.pattern = pattern;
        g.summary.phase = r.phase;
        g.summary.role = r.role;
        g.summary.processes += 1;
        g.summary.fields += r.fields;
        g.summary.bytes += r.bytes;
        g.minStart = std::min(g.minStart, r.startNanos);
        g.maxEnd = std::max(g.maxEnd, r.endNanos);
        for (int c = 0; c < kProfCategories; ++c) {
            g.summary.categoryNanos[c] += r.categoryNanos[c];
            g.summary.categoryOps[c] += r.categoryOps[c];
        }
    }

    std::vector<Summary> out;
    for (auto& [key, g] : groups) {
        if (g.maxEnd > g.minStart) {
            g.summary.seconds = double(g.maxEnd - g.minStart) / 1e9;
            g.summary.bandwidthBytesPerSec = double(g.summary.bytes) / g.summary.seconds;
        }
        if (pattern == "contention" && key.first == "main")
            g.summary.valid = contentionOverlaps(records);
        out.push_back(g.summary);
    }
    return out;
}

bool contentionOverlaps(const std::vector<BenchRecord>& records) {
    std::uint64_t wStart = ~0ull, wEnd = 0, rStart = ~0ull, rEnd = 0;
    for (const auto& r : records) {
        if (r.phase != "main") continue;
        if (r.role == "writer") {
            wStart = std::min(wStart, r.startNanos);
            wEnd = std::max(wEnd, r.endNanos);
        } else if (r.role == "reader") {
            rStart = std::min(rStart, r.startNanos);
            rEnd = std::max(rEnd, r.endNanos);
        }
    }
    if (wEnd == 0 || rEnd == 0) return false;
    return wStart < rEnd && rStart < wEnd;
}

std::string formatMiBps(double bytesPerSec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", bytesPerSec / (1024.0 * 1024.0));
    return buf;
}

void writeCsv(const std::vector<Summary>& summaries, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "backend,pattern,phase,role,processes,fields,bytes,seconds,bandwidth_bytes_per_s,valid";
    for (int c = 0; c < kProfCategories; ++c)
        out << "," << profCategoryName(static_cast<ProfCategory>(c)) << "_nanos";
    out << "\n";
    for (const auto& s : summaries) {
        char nums[128];
        std::snprintf(nums, sizeof(nums), "%.6f,%.2f", s.seconds, s.bandwidthBytesPerSec);
        out << s.backend << ',' << s.pattern << ',' << s.phase << ',' << s.role << ','
            << s.processes << ',' << s.fields << ',' << s.bytes << ',' << nums << ','
            << (s.valid ? 1 : 0);
        for (int c = 0; c < kProfCategories; ++c) out << ',' << s.categoryNanos[c];
        out << "\n";
    }
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void writeSvg(const std::vector<Summary>& summaries, const std::string& path) {
    // Left panel: bandwidth per (backend, pattern, role) series over process
    // counts. Right panel: stacked per-category time share per series.
    std::map<std::string, std::vector<const Summary*>> series;
    for (const auto& s : summaries)
        series[s.backend + "/" + s.pattern + "/" + s.role].push_back(&s);
    for (auto& [name, rows] : series)
        std::sort(rows.begin(), rows.end(),
                  [](const Summary* a, const Summary* b) { return a->processes < b->processes; });

    int maxProcs = 1;
    double maxBw = 1.0;
    for (const auto& s : summaries) {
        maxProcs = std::max(maxProcs, s.processes);
        maxBw = std::max(maxBw, s.bandwidthBytesPerSec);
    }

    const double w = 960, h = 420;
    const double plotX = 60, plotY = 30, plotW = 420, plotH = 320;
    const double barX = 560, barW = 24, barH = 320;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << plotX << "\" y=\"18\">bandwidth (MiB/s) vs processes</text>\n";
    out << "<text x=\"" << barX << "\" y=\"18\">time share per operation category</text>\n";
    out << "<rect x=\"" << plotX << "\" y=\"" << plotY << "\" width=\"" << plotW << "\" height=\""
        << plotH << "\" fill=\"none\" stroke=\"#333\"/>\n";

    auto px = [&](int procs) { return plotX + plotW * double(procs) / double(maxProcs + 1); };
    auto py = [&](double bw) { return plotY + plotH - plotH * bw / (maxBw * 1.1); };

    int idx = 0;
    for (const auto& [name, rows] : series) {
        const char* color = kSeriesColors[idx % 8];
        std::string points;
        for (const auto* s : rows)
            points += fmt(px(s->processes)) + "," + fmt(py(s->bandwidthBytesPerSec)) + " ";
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << points << "\"/>\n";
        for (const auto* s : rows)
            out << "<circle cx=\"" << fmt(px(s->processes)) << "\" cy=\""
                << fmt(py(s->bandwidthBytesPerSec)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << plotX << "\" y=\"" << plotY + plotH + 16 + 13 * idx << "\" fill=\""
            << color << "\">" << name << " (max " << formatMiBps(rows.back()->bandwidthBytesPerSec)
            << " MiB/s)</text>\n";

        // Stacked bar: share of profiled time per category for the largest run.
        const Summary* s = rows.back();
        std::uint64_t total = 0;
        for (int c = 0; c < kProfCategories; ++c) total += s->categoryNanos[c];
        double x = barX + idx * (barW + 28);
        double y = plotY + barH;
        for (int c = 0; c < kProfCategories; ++c) {
            if (total == 0 || s->categoryNanos[c] == 0) continue;
            double frac = double(s->categoryNanos[c]) / double(total);
            double segH = barH * frac;
            y -= segH;
            out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << barW
                << "\" height=\"" << fmt(segH) << "\" fill=\"" << kSeriesColors[c % 8]
                << "\"><title>" << name << " " << profCategoryName(static_cast<ProfCategory>(c))
                << " " << fmt(frac * 100) << "%</title></rect>\n";
        }
        ++idx;
    }

    double ly = plotY;
    for (int c = 0; c < kProfCategories; ++c) {
        out << "<rect x=\"" << w - 140 << "\" y=\"" << fmt(ly) << "\" width=\"10\" height=\"10\" "
            << "fill=\"" << kSeriesColors[c % 8] << "\"/>\n";
        out << "<text x=\"" << w - 124 << "\" y=\"" << fmt(ly + 9) << "\">"
            << profCategoryName(static_cast<ProfCategory>(c)) << "</text>\n";
        ly += 16;
    }
    out << "</svg>\n";
}

}  // namespace fdb::hammer

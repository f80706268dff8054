#include "pqcorr/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pqcorr {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Rgb {
    double r, g, b;
};

std::string hex(const Rgb& c)
{
    auto channel = [](double v) { return std::clamp(static_cast<int>(std::lround(v)), 0, 255); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(c.r), channel(c.g), channel(c.b));
    return buf;
}

Rgb lerp(const Rgb& a, const Rgb& b, double t)
{
    return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

// Sequential white->blue for shares, diverging blue-white-red for correlations.
std::string colormap(double v, double vmin, double vmax, bool diverging)
{
    const Rgb white{255, 255, 255};
    const Rgb blue{33, 82, 145};
    const Rgb red{178, 24, 43};
    if (diverging) {
        double span = std::max(std::abs(vmin), std::abs(vmax));
        if (span <= 0.0) return hex(white);
        double t = std::clamp(v / span, -1.0, 1.0);
        return t < 0.0 ? hex(lerp(white, blue, -t)) : hex(lerp(white, red, t));
    }
    double span = vmax - vmin;
    double t = span <= 0.0 ? 0.0 : std::clamp((v - vmin) / span, 0.0, 1.0);
    return hex(lerp(white, blue, t));
}

std::string svg_open(double width, double height)
{
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width)
       << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
       << "\">\n";
    return os.str();
}

void text_at(std::ostringstream& os, double x, double y, const std::string& s, double font_px,
             const std::string& fill = "#000000", const std::string& anchor = "start",
             const std::string& transform = "")
{
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << num(font_px)
       << "\" font-family=\"sans-serif\" fill=\"" << fill << "\" text-anchor=\"" << anchor << "\"";
    if (!transform.empty()) os << " transform=\"" << transform << "\"";
    os << ">" << xml_escape(s) << "</text>\n";
}

double max_label_width(const std::vector<std::string>& labels, double font_px)
{
    std::size_t longest = 0;
    for (const auto& l : labels) longest = std::max(longest, l.size());
    return static_cast<double>(longest) * font_px * 0.62;
}

}  // namespace

const std::string& StyleMap::color_of(const std::string& label) const
{
    auto cat = label_category.find(label);
    if (cat != label_category.end()) {
        auto color = category_color.find(cat->second);
        if (color != category_color.end()) return color->second;
    }
    return default_color;
}

StyleMap style_for_sites(const Campaign& campaign)
{
    StyleMap style;
    style.category_color = {{"110", "#c62828"}, {"220", "#2e7d32"}, {"380", "#1565c0"}};
    for (const auto& site : campaign.sites)
        style.label_category[site.name] = std::to_string(site.voltage_level_kv);
    return style;
}

StyleMap style_for_parameters(const std::vector<ParameterId>& parameters)
{
    StyleMap style;
    style.category_color = {{"voltage", "#2e7d32"}, {"current", "#c62828"}};
    for (const auto& p : parameters) style.label_category[p.code] = to_string(p.kind);
    return style;
}

HeatmapData heatmap_data(const CorrelationMatrix& matrix)
{
    HeatmapData data;
    data.title = to_string(matrix.mode()) + (matrix.context().empty() ? "" : ": " + matrix.context());
    data.labels = matrix.labels();
    data.vmin = -1.0;
    data.vmax = 1.0;
    data.diverging = true;
    const std::size_t n = matrix.size();
    data.values.assign(n * n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (auto r = matrix.at(i, j)) data.values[i * n + j] = *r;
    return data;
}

HeatmapData heatmap_data(const AggregationMatrix& agg, ShareDenominator denominator)
{
    HeatmapData data;
    char title[96];
    std::snprintf(title, sizeof title, "share of significant correlations (tau=%g, %s)", agg.rule.tau,
                  to_string(agg.rule.sense).c_str());
    data.title = title;
    data.labels = agg.labels;
    data.vmin = 0.0;
    data.vmax = 1.0;
    data.diverging = false;
    const std::size_t n = agg.size();
    data.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) data.values[i * n + j] = agg.share(i, j, denominator);
    return data;
}

std::string render_heatmap(const HeatmapData& data, const StyleMap& style)
{
    const std::size_t n = data.labels.size();
    const double cell = style.cell_px;
    const double label_w = max_label_width(data.labels, style.font_px);
    const double left = label_w + 12.0;
    const double top = label_w + 28.0;  // column labels are rotated, same extent
    const double legend_w = 56.0;
    const double width = left + static_cast<double>(n) * cell + legend_w + 16.0;
    const double height = top + static_cast<double>(n) * cell + 16.0;

    std::ostringstream os;
    os << svg_open(width, height);
    text_at(os, 4.0, 14.0, data.title, style.font_px + 2.0);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = data.values[i * n + j];
            double x = left + static_cast<double>(j) * cell;
            double y = top + static_cast<double>(i) * cell;
            os << "<rect class=\"cell\" x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
               << num(cell) << "\" height=\"" << num(cell) << "\" ";
            if (std::isnan(v)) {
                // Absent entries: hollow cell with a hatch stroke.
                os << "fill=\"none\" stroke=\"#bbbbbb\" stroke-dasharray=\"2,2\"";
            } else {
                os << "fill=\"" << colormap(v, data.vmin, data.vmax, data.diverging)
                   << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"";
            }
            os << "/>\n";
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        double y = top + (static_cast<double>(i) + 0.8) * cell;
        text_at(os, left - 4.0, y, data.labels[i], style.font_px, style.color_of(data.labels[i]), "end");
        double x = left + (static_cast<double>(i) + 0.8) * cell;
        text_at(os, x, top - 4.0, data.labels[i], style.font_px, style.color_of(data.labels[i]), "start",
                "rotate(-60 " + num(x) + " " + num(top - 4.0) + ")");
    }

    // Legend: discrete ramp swatches with the endpoints labelled.
    const int steps = 8;
    double lx = left + static_cast<double>(n) * cell + 12.0;
    double lh = std::min(160.0, static_cast<double>(n) * cell);
    for (int s = 0; s < steps; ++s) {
        double frac = (static_cast<double>(s) + 0.5) / steps;
        double v = data.vmax - frac * (data.vmax - data.vmin);
        os << "<rect class=\"legend\" x=\"" << num(lx) << "\" y=\"" << num(top + frac * lh - lh / (2 * steps))
           << "\" width=\"12.00\" height=\"" << num(lh / steps) << "\" fill=\""
           << colormap(v, data.vmin, data.vmax, data.diverging) << "\"/>\n";
    }
    text_at(os, lx + 16.0, top + 8.0, num(data.vmax), style.font_px);
    text_at(os, lx + 16.0, top + lh, num(data.vmin), style.font_px);

    os << "</svg>\n";
    return os.str();
}

std::string render_dendrogram(const Dendrogram& dendrogram, const StyleMap& style)
{
    const std::size_t n = dendrogram.leaf_count();
    const double slot = std::max(style.cell_px, 12.0);
    const double label_h = max_label_width(dendrogram.labels, style.font_px);
    const double left = 46.0;
    const double top = 30.0;
    const double plot_h = 240.0;
    const double width = left + static_cast<double>(n) * slot + 16.0;
    const double height = top + plot_h + label_h + 24.0;

    double max_height = 0.0;
    for (const auto& m : dendrogram.merges) max_height = std::max(max_height, m.height);
    if (max_height <= 0.0) max_height = 1.0;
    auto py = [&](double h) { return top + plot_h - (h / max_height) * plot_h; };

    // Leaf x positions follow the drawing order; internal nodes sit midway
    // between their children.
    std::vector<double> node_x(n + dendrogram.merges.size(), 0.0);
    std::vector<double> node_h(n + dendrogram.merges.size(), 0.0);
    auto order = dendrogram.leaf_order();
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        node_x[static_cast<std::size_t>(order[pos])] = left + (static_cast<double>(pos) + 0.5) * slot;
    for (std::size_t t = 0; t < dendrogram.merges.size(); ++t) {
        const Merge& m = dendrogram.merges[t];
        node_x[n + t] = 0.5 * (node_x[static_cast<std::size_t>(m.a)] + node_x[static_cast<std::size_t>(m.b)]);
        node_h[n + t] = m.height;
    }

    std::ostringstream os;
    os << svg_open(width, height);

    // Height axis with a handful of ticks.
    os << "<line x1=\"" << num(left - 10.0) << "\" y1=\"" << num(py(0.0)) << "\" x2=\""
       << num(left - 10.0) << "\" y2=\"" << num(py(max_height)) << "\" stroke=\"#000000\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        double h = max_height * tick / 4.0;
        os << "<line x1=\"" << num(left - 14.0) << "\" y1=\"" << num(py(h)) << "\" x2=\""
           << num(left - 10.0) << "\" y2=\"" << num(py(h)) << "\" stroke=\"#000000\"/>\n";
        char label[24];
        std::snprintf(label, sizeof label, "%.2g", h);
        text_at(os, left - 16.0, py(h) + 3.0, label, style.font_px - 1.0, "#000000", "end");
    }

    for (const auto& m : dendrogram.merges) {
        double xa = node_x[static_cast<std::size_t>(m.a)];
        double xb = node_x[static_cast<std::size_t>(m.b)];
        double ya = py(node_h[static_cast<std::size_t>(m.a)]);
        double yb = py(node_h[static_cast<std::size_t>(m.b)]);
        double ym = py(m.height);
        os << "<path class=\"bracket\" d=\"M " << num(xa) << ' ' << num(ya) << " L " << num(xa) << ' '
           << num(ym) << " L " << num(xb) << ' ' << num(ym) << " L " << num(xb) << ' ' << num(yb)
           << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    }

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::string& label = dendrogram.labels[static_cast<std::size_t>(order[pos])];
        double x = left + (static_cast<double>(pos) + 0.5) * slot;
        double y = top + plot_h + 12.0;
        text_at(os, x, y, label, style.font_px, style.color_of(label), "end",
                "rotate(-90 " + num(x) + " " + num(y) + ")");
    }

    os << "</svg>\n";
    return os.str();
}

std::string render_scatter(const Embedding& embedding, const StyleMap& style)
{
    if (embedding.dims < 2) throw std::invalid_argument("scatter plot needs at least two dimensions");
    const std::size_t n = embedding.labels.size();
    const double plot = 420.0;
    const double margin = 30.0;
    const double width = plot + 2 * margin;
    const double height = plot + 2 * margin;

    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xmin = std::min(xmin, embedding.coord(i, 0));
        xmax = std::max(xmax, embedding.coord(i, 0));
        ymin = std::min(ymin, embedding.coord(i, 1));
        ymax = std::max(ymax, embedding.coord(i, 1));
    }
    double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
    span *= 1.1;
    double cx = 0.5 * (xmin + xmax);
    double cy = 0.5 * (ymin + ymax);
    auto sx = [&](double x) { return margin + (x - cx + span / 2) / span * plot; };
    auto sy = [&](double y) { return margin + (cy - y + span / 2) / span * plot; };

    std::ostringstream os;
    os << svg_open(width, height);
    os << "<rect x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\"" << num(plot)
       << "\" height=\"" << num(plot) << "\" fill=\"none\" stroke=\"#999999\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& label = embedding.labels[i];
        double x = sx(embedding.coord(i, 0));
        double y = sy(embedding.coord(i, 1));
        os << "<circle class=\"marker\" cx=\"" << num(x) << "\" cy=\"" << num(y)
           << "\" r=\"4\" fill=\"" << style.color_of(label) << "\" fill-opacity=\"0.85\"/>\n";
        if (style.point_labels)
            text_at(os, x + 5.0, y + 3.0, label, style.font_px - 1.0, style.color_of(label));
    }
    os << "</svg>\n";
    return os.str();
}

std::string render_series(const std::vector<SeriesPlotEntry>& entries, bool normalize,
                          const StyleMap& style)
{
    if (entries.empty()) throw std::invalid_argument("series plot needs at least one series");
    const double plot_w = 640.0;
    const double plot_h = 240.0;
    const double left = 40.0;
    const double top = 20.0;
    const double width = left + plot_w + 16.0;
    const double height = top + plot_h + 36.0;

    std::int64_t t0 = std::numeric_limits<std::int64_t>::max();
    std::int64_t t1 = std::numeric_limits<std::int64_t>::min();
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries) {
        t0 = std::min(t0, e.series->start());
        t1 = std::max(t1, e.series->end());
        if (!normalize) {
            for (std::size_t i = 0; i < e.series->size(); ++i) {
                if (!e.series->has(i)) continue;
                vmin = std::min(vmin, e.series->raw(i));
                vmax = std::max(vmax, e.series->raw(i));
            }
        }
    }
    if (normalize) {
        vmin = 0.0;
        vmax = 1.0;
    }
    if (!(vmax > vmin)) {
        vmax = vmin + 1.0;
        vmin -= 1.0;
    }

    auto sx = [&](std::int64_t t) {
        return left + static_cast<double>(t - t0) / static_cast<double>(std::max<std::int64_t>(t1 - t0, 1)) * plot_w;
    };
    auto sy = [&](double v) { return top + plot_h - (v - vmin) / (vmax - vmin) * plot_h; };

    std::ostringstream os;
    os << svg_open(width, height);
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
       << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#999999\"/>\n";

    for (const auto& e : entries) {
        const RegularTimeSeries& s = *e.series;
        double smin = 0.0, srange = 1.0;
        if (normalize) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (!s.has(i)) continue;
                lo = std::min(lo, s.raw(i));
                hi = std::max(hi, s.raw(i));
            }
            smin = lo;
            srange = hi - lo;
        }
        os << "<polyline class=\"series\" fill=\"none\" stroke=\"" << style.color_of(e.label)
           << "\" stroke-opacity=\"0.7\" stroke-width=\"1\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s.has(i)) continue;
            double v = s.raw(i);
            if (normalize) v = srange > 0.0 ? (v - smin) / srange : 0.5;  // constant series sit mid-scale
            if (!first) os << ' ';
            os << num(sx(s.timestamp(i))) << ',' << num(sy(v));
            first = false;
        }
        os << "\"/>\n";
    }
    text_at(os, left, height - 8.0, "time", style.font_px);
    os << "</svg>\n";
    return os.str();
}

}  // namespace pqcorr

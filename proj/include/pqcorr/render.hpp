#pragma once

#include <map>
#include <string>
#include <vector>

#include "pqcorr/aggregate.hpp"
#include "pqcorr/campaign.hpp"
#include "pqcorr/rankcorr.hpp"
#include "pqcorr/structure.hpp"

namespace pqcorr {

// Category coloring for labels (voltage levels for sites, quantity kind for
// parameters); unresolved labels fall back to the default color.
struct StyleMap {
    std::map<std::string, std::string> label_category;
    std::map<std::string, std::string> category_color;
    std::string default_color = "#555555";
    double cell_px = 14.0;
    double font_px = 10.0;
    bool point_labels = true;

    const std::string& color_of(const std::string& label) const;
};

// Built-in palettes: 110 kV red, 220 kV green, 380 kV blue; current red,
// voltage green.
StyleMap style_for_sites(const Campaign& campaign);
StyleMap style_for_parameters(const std::vector<ParameterId>& parameters);

struct HeatmapData {
    std::string title;
    std::vector<std::string> labels;
    std::vector<double> values;  // row-major, NaN = absent
    double vmin = 0.0;
    double vmax = 1.0;
    bool diverging = false;  // diverging ramp centered on 0 for correlations
};

HeatmapData heatmap_data(const CorrelationMatrix& matrix);
HeatmapData heatmap_data(const AggregationMatrix& agg,
                         ShareDenominator denominator = ShareDenominator::total);

// All emitters return a complete standalone SVG 1.1 document and are
// deterministic (same input, same bytes). Element inventory is fixed: n^2
// cells, n-1 brackets, n markers, one polyline per series.
std::string render_heatmap(const HeatmapData& data, const StyleMap& style);
std::string render_dendrogram(const Dendrogram& dendrogram, const StyleMap& style);
std::string render_scatter(const Embedding& embedding, const StyleMap& style);

struct SeriesPlotEntry {
    std::string label;
    const RegularTimeSeries* series = nullptr;
};

// Overlay plot on a shared time axis; with normalize each series is min-max
// scaled into [0,1] (constant series sit at 0.5).
std::string render_series(const std::vector<SeriesPlotEntry>& entries, bool normalize,
                          const StyleMap& style);

}  // namespace pqcorr

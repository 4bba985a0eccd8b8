#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "docrebench/model.hpp"

namespace docrebench {

/// Vertical reading order: (bbox.y_min, bbox.x_min) ascending, stable.
std::vector<const LineInstance*> order_lines(std::vector<const LineInstance*> lines);

/// Horizontal reading order: (bbox.x_min, bbox.y_min) ascending, stable.
std::vector<const WordInstance*> order_words(std::vector<const WordInstance*> words);

/// Reading-ordered text of an arbitrary word set: words grouped by line_id
/// (line order vertical via `doc`'s line boxes), words within a line
/// horizontal; words without a line form one synthetic trailing line. Words
/// joined by single spaces, lines by single newlines.
std::string ordered_text(const std::vector<const WordInstance*>& words,
                         const DocumentAnnotation& doc);

/// ordered_text over one text-bearing region's words. Throws
/// UnknownRegionError for missing or non-text regions.
std::string region_text(const DocumentAnnotation& doc, const std::string& region_id);

struct FontFit {
    int px = 16;
    bool overflow = false;
};

/// Largest integer size in [6, 72] whose greedily wrapped text fits the box
/// (character width 0.55·size, line height 1.25·size). Empty text yields the
/// 16 px default; 6 px with the overflow flag when nothing fits.
FontFit fit_font(const std::string& text, const BBox& box);
int fit_font_size(const std::string& text, const BBox& box);

struct IntermediateComponent {
    std::string region_id;
    RegionClass cls = RegionClass::paragraph;
    BBox bbox;
    std::optional<std::string> text;       // paragraph / text_box only
    std::optional<std::string> image_src;  // image only
    int font_size = 16;
    bool overflow = false;
};

struct ReconstructedDocument {
    std::string image_id;
    double page_width = 0;
    double page_height = 0;
    std::vector<IntermediateComponent> components;  // document reading order
};

/// One component per non-table region, ordered by (y_min, x_min) of the
/// region bbox. Table regions are dropped.
ReconstructedDocument build_intermediate(const DocumentAnnotation& doc);

std::string render_html(const ReconstructedDocument& rd);
std::string intermediate_to_json(const ReconstructedDocument& rd);

/// Writes index.html plus an intermediate.json sidecar; byte-deterministic.
/// Returns the index.html path.
std::filesystem::path emit_html(const ReconstructedDocument& rd,
                                const std::filesystem::path& out_dir);

std::string html_escape(std::string_view s);

}  // namespace docrebench

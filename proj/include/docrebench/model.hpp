#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "docrebench/geometry.hpp"

namespace docrebench {

enum class RegionClass { paragraph, text_box, image, table };

const char* to_string(RegionClass c);
RegionClass region_class_from_string(const std::string& s);

/// Only paragraph and text_box regions carry text and take part in the
/// word-level / text-level evaluation.
inline bool is_text_class(RegionClass c) {
    return c == RegionClass::paragraph || c == RegionClass::text_box;
}

struct LayoutRegion {
    std::string id;
    RegionClass cls = RegionClass::paragraph;
    std::vector<Point> polygon;
};

struct LineInstance {
    std::string id;
    std::string region_id;
    BBox bbox;
};

struct WordInstance {
    std::string id;
    std::string region_id;
    std::optional<std::string> line_id;
    std::vector<Point> polygon;
    std::string text;  // empty for detected-but-unrecognized words
};

/// One page of annotations; the same schema serves ground truth and every
/// intermediate prediction state.
struct DocumentAnnotation {
    std::string image_id;
    double width = 0;
    double height = 0;
    std::string domain;
    std::vector<LayoutRegion> regions;
    std::vector<LineInstance> lines;
    std::vector<WordInstance> words;

    const LayoutRegion* find_region(const std::string& id) const;
    const LineInstance* find_line(const std::string& id) const;
};

// Pipeline artifact kinds in pipeline order.
enum class ArtifactKind {
    raw_image,
    geo_corrected,
    illum_corrected,
    layout,
    lines,
    words,
    recognized,
    html,
};

const char* to_string(ArtifactKind k);
ArtifactKind artifact_kind_from_string(const std::string& s);
int kind_rank(ArtifactKind k);

/// Kinds whose artifact files are schema-valid annotation JSON.
inline bool is_structured(ArtifactKind k) {
    return kind_rank(k) >= kind_rank(ArtifactKind::layout) && k != ArtifactKind::html;
}

struct StageArtifact {
    ArtifactKind kind = ArtifactKind::raw_image;
    std::filesystem::path path;
    std::string produced_by;
};

struct Violation {
    std::string id;      // offending element id (or image_id for document rules)
    std::string rule;    // e.g. "polygon.min_vertices", "id.unique"
    std::string detail;
};

/// Invariant check; empty result exactly on documents load_document accepts.
std::vector<Violation> validate_document(const DocumentAnnotation& doc);

/// Parses, NFC-normalizes word texts, clamps polygons to the page (appending
/// a note per clamped element to `warnings`), and validates.
/// Throws ParseError / SchemaError / IntegrityError.
DocumentAnnotation document_from_json(const std::string& text,
                                      std::vector<std::string>* warnings = nullptr);
DocumentAnnotation load_document(const std::filesystem::path& path,
                                 std::vector<std::string>* warnings = nullptr);

/// Canonical serialization: sorted keys, stable number formatting, trailing
/// newline. load(save(d)) == d and repeated saves are byte-identical.
std::string document_to_json(const DocumentAnnotation& doc);
void save_document(const DocumentAnnotation& doc, const std::filesystem::path& path);

}  // namespace docrebench

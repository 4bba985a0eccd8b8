#include "docrebench/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "docrebench/errors.hpp"
#include "docrebench/unicode.hpp"

namespace docrebench {

using nlohmann::json;

const char* to_string(RegionClass c) {
    switch (c) {
        case RegionClass::paragraph: return "paragraph";
        case RegionClass::text_box: return "text_box";
        case RegionClass::image: return "image";
        case RegionClass::table: return "table";
    }
    return "?";
}

RegionClass region_class_from_string(const std::string& s) {
    if (s == "paragraph") return RegionClass::paragraph;
    if (s == "text_box") return RegionClass::text_box;
    if (s == "image") return RegionClass::image;
    if (s == "table") return RegionClass::table;
    throw SchemaError("unknown region class \"" + s + "\"");
}

const char* to_string(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::raw_image: return "raw_image";
        case ArtifactKind::geo_corrected: return "geo_corrected";
        case ArtifactKind::illum_corrected: return "illum_corrected";
        case ArtifactKind::layout: return "layout";
        case ArtifactKind::lines: return "lines";
        case ArtifactKind::words: return "words";
        case ArtifactKind::recognized: return "recognized";
        case ArtifactKind::html: return "html";
    }
    return "?";
}

ArtifactKind artifact_kind_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(ArtifactKind::html); ++i) {
        auto k = static_cast<ArtifactKind>(i);
        if (s == to_string(k)) return k;
    }
    throw SchemaError("unknown artifact kind \"" + s + "\"");
}

int kind_rank(ArtifactKind k) {
    return static_cast<int>(k);
}

const LayoutRegion* DocumentAnnotation::find_region(const std::string& id) const {
    for (const auto& r : regions)
        if (r.id == id) return &r;
    return nullptr;
}

const LineInstance* DocumentAnnotation::find_line(const std::string& id) const {
    for (const auto& l : lines)
        if (l.id == id) return &l;
    return nullptr;
}

namespace {

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path + ": expected number");
    return j.get<double>();
}

std::string require_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path + ": expected string");
    return j.get<std::string>();
}

const json& require_field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path + ": expected object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + "." + key + ": missing field");
    return *it;
}

std::vector<Point> parse_polygon(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected flat coordinate array");
    if (j.size() % 2 != 0) throw SchemaError(path + ": odd coordinate count");
    std::vector<Point> pts;
    pts.reserve(j.size() / 2);
    for (std::size_t i = 0; i + 1 < j.size(); i += 2) {
        pts.push_back({require_number(j[i], path + "[" + std::to_string(i) + "]"),
                       require_number(j[i + 1], path + "[" + std::to_string(i + 1) + "]")});
    }
    return pts;
}

BBox parse_bbox(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 4)
        throw SchemaError(path + ": expected [x_min, y_min, x_max, y_max]");
    return {require_number(j[0], path + "[0]"), require_number(j[1], path + "[1]"),
            require_number(j[2], path + "[2]"), require_number(j[3], path + "[3]")};
}

// Writes integral doubles as JSON integers so integer inputs round-trip
// byte-identically.
json number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.007199254740992e15)
        return json(static_cast<std::int64_t>(v));
    return json(v);
}

json polygon_to_json(const std::vector<Point>& pts) {
    json a = json::array();
    for (const Point& p : pts) {
        a.push_back(number(p.x));
        a.push_back(number(p.y));
    }
    return a;
}

bool clamp_points(std::vector<Point>& pts, double w, double h) {
    bool changed = false;
    for (Point& p : pts) {
        double cx = std::clamp(p.x, 0.0, w);
        double cy = std::clamp(p.y, 0.0, h);
        if (cx != p.x || cy != p.y) changed = true;
        p.x = cx;
        p.y = cy;
    }
    return changed;
}

void check_unique(const std::vector<std::string>& ids, const char* what,
                  std::vector<Violation>& out) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second)
            out.push_back({id, "id.unique", std::string(what) + " id duplicated"});
    }
}

}  // namespace

std::vector<Violation> validate_document(const DocumentAnnotation& doc) {
    std::vector<Violation> out;
    if (!(doc.width > 0) || !(doc.height > 0))
        out.push_back({doc.image_id, "image.size", "width/height must be positive"});

    std::vector<std::string> ids;
    for (const auto& r : doc.regions) ids.push_back(r.id);
    check_unique(ids, "region", out);
    ids.clear();
    for (const auto& l : doc.lines) ids.push_back(l.id);
    check_unique(ids, "line", out);
    ids.clear();
    for (const auto& w : doc.words) ids.push_back(w.id);
    check_unique(ids, "word", out);

    std::unordered_map<std::string, const LayoutRegion*> regions;
    for (const auto& r : doc.regions) regions.emplace(r.id, &r);
    std::unordered_set<std::string> line_ids;
    for (const auto& l : doc.lines) line_ids.insert(l.id);

    const auto check_polygon = [&](const std::string& id, const std::vector<Point>& pts) {
        for (const auto& rule : Polygon::violations(pts)) out.push_back({id, rule, ""});
        if (!pts.empty()) {
            BBox b = bbox_of(pts);
            if (b.x_min < 0 || b.y_min < 0 || b.x_max > doc.width || b.y_max > doc.height)
                out.push_back({id, "polygon.in_bounds", "polygon outside page"});
        }
    };

    for (const auto& r : doc.regions) check_polygon(r.id, r.polygon);

    for (const auto& l : doc.lines) {
        auto it = regions.find(l.region_id);
        if (it == regions.end())
            out.push_back({l.id, "line.region", "region_id \"" + l.region_id + "\" not found"});
        else if (!is_text_class(it->second->cls))
            out.push_back({l.id, "line.region_class", "line in non-text region"});
        if (l.bbox.x_min > l.bbox.x_max || l.bbox.y_min > l.bbox.y_max)
            out.push_back({l.id, "bbox.valid", "min exceeds max"});
        else if (l.bbox.x_min < 0 || l.bbox.y_min < 0 || l.bbox.x_max > doc.width ||
                 l.bbox.y_max > doc.height)
            out.push_back({l.id, "bbox.in_bounds", "bbox outside page"});
    }

    for (const auto& w : doc.words) {
        if (regions.find(w.region_id) == regions.end())
            out.push_back({w.id, "word.region", "region_id \"" + w.region_id + "\" not found"});
        if (w.line_id && line_ids.find(*w.line_id) == line_ids.end())
            out.push_back({w.id, "word.line", "line_id \"" + *w.line_id + "\" not found"});
        check_polygon(w.id, w.polygon);
        if (!is_nfc(w.text))
            out.push_back({w.id, "text.nfc", "text not NFC-normalized"});
    }
    return out;
}

DocumentAnnotation document_from_json(const std::string& text,
                                      std::vector<std::string>* warnings) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("$: expected top-level object");

    const json& ver = require_field(j, "schema_version", "$");
    if (!ver.is_number_integer() || ver.get<int>() != 1)
        throw SchemaError("$.schema_version: expected 1");

    DocumentAnnotation doc;
    doc.image_id = require_string(require_field(j, "image_id", "$"), "$.image_id");
    doc.width = require_number(require_field(j, "width", "$"), "$.width");
    doc.height = require_number(require_field(j, "height", "$"), "$.height");
    doc.domain = require_string(require_field(j, "domain", "$"), "$.domain");

    const json& regions = require_field(j, "regions", "$");
    if (!regions.is_array()) throw SchemaError("$.regions: expected array");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        std::string path = "$.regions[" + std::to_string(i) + "]";
        const json& r = regions[i];
        LayoutRegion region;
        region.id = require_string(require_field(r, "id", path), path + ".id");
        region.cls = region_class_from_string(
            require_string(require_field(r, "class", path), path + ".class"));
        region.polygon = parse_polygon(require_field(r, "polygon", path), path + ".polygon");
        doc.regions.push_back(std::move(region));
    }

    const json& lines = require_field(j, "lines", "$");
    if (!lines.is_array()) throw SchemaError("$.lines: expected array");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string path = "$.lines[" + std::to_string(i) + "]";
        const json& l = lines[i];
        LineInstance line;
        line.id = require_string(require_field(l, "id", path), path + ".id");
        line.region_id =
            require_string(require_field(l, "region_id", path), path + ".region_id");
        line.bbox = parse_bbox(require_field(l, "bbox", path), path + ".bbox");
        doc.lines.push_back(std::move(line));
    }

    const json& words = require_field(j, "words", "$");
    if (!words.is_array()) throw SchemaError("$.words: expected array");
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::string path = "$.words[" + std::to_string(i) + "]";
        const json& w = words[i];
        WordInstance word;
        word.id = require_string(require_field(w, "id", path), path + ".id");
        word.region_id =
            require_string(require_field(w, "region_id", path), path + ".region_id");
        if (auto it = w.find("line_id"); it != w.end() && !it->is_null())
            word.line_id = require_string(*it, path + ".line_id");
        word.polygon = parse_polygon(require_field(w, "polygon", path), path + ".polygon");
        if (auto it = w.find("text"); it != w.end() && !it->is_null())
            word.text = nfc(require_string(*it, path + ".text"));
        doc.words.push_back(std::move(word));
    }

    // Scanned-edge annotations commonly overflow the page; clamp, don't reject.
    if (doc.width > 0 && doc.height > 0) {
        for (auto& r : doc.regions) {
            if (clamp_points(r.polygon, doc.width, doc.height) && warnings)
                warnings->push_back("clamped polygon of region " + r.id);
        }
        for (auto& w : doc.words) {
            if (clamp_points(w.polygon, doc.width, doc.height) && warnings)
                warnings->push_back("clamped polygon of word " + w.id);
        }
        for (auto& l : doc.lines) {
            BBox b = l.bbox;
            l.bbox.x_min = std::clamp(b.x_min, 0.0, doc.width);
            l.bbox.x_max = std::clamp(b.x_max, 0.0, doc.width);
            l.bbox.y_min = std::clamp(b.y_min, 0.0, doc.height);
            l.bbox.y_max = std::clamp(b.y_max, 0.0, doc.height);
            if ((l.bbox.x_min != b.x_min || l.bbox.y_min != b.y_min ||
                 l.bbox.x_max != b.x_max || l.bbox.y_max != b.y_max) &&
                warnings)
                warnings->push_back("clamped bbox of line " + l.id);
        }
    }

    auto violations = validate_document(doc);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "document \"" << doc.image_id << "\" has " << violations.size()
            << " violation(s):";
        for (const auto& v : violations) msg << " [" << v.id << ": " << v.rule << "]";
        throw IntegrityError(msg.str());
    }
    return doc;
}

DocumentAnnotation load_document(const std::filesystem::path& path,
                                 std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return document_from_json(buf.str(), warnings);
    } catch (const Error& e) {
        throw;  // message already carries the JSON path; callers add the file
    }
}

std::string document_to_json(const DocumentAnnotation& doc) {
    json j;
    j["schema_version"] = 1;
    j["image_id"] = doc.image_id;
    j["width"] = number(doc.width);
    j["height"] = number(doc.height);
    j["domain"] = doc.domain;

    json regions = json::array();
    for (const auto& r : doc.regions) {
        json o;
        o["id"] = r.id;
        o["class"] = to_string(r.cls);
        o["polygon"] = polygon_to_json(r.polygon);
        regions.push_back(std::move(o));
    }
    j["regions"] = std::move(regions);

    json lines = json::array();
    for (const auto& l : doc.lines) {
        json o;
        o["id"] = l.id;
        o["region_id"] = l.region_id;
        o["bbox"] = json::array({number(l.bbox.x_min), number(l.bbox.y_min),
                                 number(l.bbox.x_max), number(l.bbox.y_max)});
        lines.push_back(std::move(o));
    }
    j["lines"] = std::move(lines);

    json words = json::array();
    for (const auto& w : doc.words) {
        json o;
        o["id"] = w.id;
        o["region_id"] = w.region_id;
        if (w.line_id) o["line_id"] = *w.line_id;
        o["polygon"] = polygon_to_json(w.polygon);
        o["text"] = nfc(w.text);
        words.push_back(std::move(o));
    }
    j["words"] = std::move(words);

    return j.dump(2) + "\n";
}

void save_document(const DocumentAnnotation& doc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << document_to_json(doc);
    if (!out) throw Error("I/O failure writing " + path.string());
}

}  // namespace docrebench

#include "docrebench/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "docrebench/errors.hpp"
#include "docrebench/geometry.hpp"
#include "docrebench/unicode.hpp"
#include "numfmt.hpp"

namespace docrebench {

using nlohmann::json;

std::vector<const LineInstance*> order_lines(std::vector<const LineInstance*> lines) {
    std::stable_sort(lines.begin(), lines.end(),
                     [](const LineInstance* a, const LineInstance* b) {
                         if (a->bbox.y_min != b->bbox.y_min)
                             return a->bbox.y_min < b->bbox.y_min;
                         return a->bbox.x_min < b->bbox.x_min;
                     });
    return lines;
}

std::vector<const WordInstance*> order_words(std::vector<const WordInstance*> words) {
    std::stable_sort(words.begin(), words.end(),
                     [](const WordInstance* a, const WordInstance* b) {
                         BBox ba = bbox_of(a->polygon), bb = bbox_of(b->polygon);
                         if (ba.x_min != bb.x_min) return ba.x_min < bb.x_min;
                         return ba.y_min < bb.y_min;
                     });
    return words;
}

std::string ordered_text(const std::vector<const WordInstance*>& words,
                         const DocumentAnnotation& doc) {
    // Buckets in first-appearance order; unknown line ids fall back to the
    // synthetic trailing line.
    std::vector<const LineInstance*> line_order;
    std::unordered_map<const LineInstance*, std::vector<const WordInstance*>> buckets;
    std::vector<const WordInstance*> no_line;

    for (const auto* w : words) {
        const LineInstance* line = w->line_id ? doc.find_line(*w->line_id) : nullptr;
        if (!line) {
            no_line.push_back(w);
            continue;
        }
        auto [it, inserted] = buckets.try_emplace(line);
        if (inserted) line_order.push_back(line);
        it->second.push_back(w);
    }

    line_order = order_lines(std::move(line_order));

    std::string out;
    bool first_line = true;
    const auto append_line = [&](const std::vector<const WordInstance*>& ws) {
        if (ws.empty()) return;
        if (!first_line) out += '\n';
        first_line = false;
        auto ordered = order_words(ws);
        for (std::size_t i = 0; i < ordered.size(); ++i) {
            if (i) out += ' ';
            out += ordered[i]->text;
        }
    };
    for (const auto* line : line_order) append_line(buckets[line]);
    append_line(no_line);
    return out;
}

std::string region_text(const DocumentAnnotation& doc, const std::string& region_id) {
    const LayoutRegion* region = doc.find_region(region_id);
    if (!region) throw UnknownRegionError("region \"" + region_id + "\" not found");
    if (!is_text_class(region->cls))
        throw UnknownRegionError("region \"" + region_id + "\" is not text-bearing");
    std::vector<const WordInstance*> words;
    for (const auto& w : doc.words)
        if (w.region_id == region_id) words.push_back(&w);
    return ordered_text(words, doc);
}

namespace {

// Greedy wrap: number of lines needed at a capacity of `cap` characters,
// single spaces between tokens, oversize tokens hard-broken.
long wrapped_lines(const std::vector<std::size_t>& token_lengths, long cap) {
    if (cap < 1) return -1;
    long lines = 1;
    long cur = 0;
    for (std::size_t tl_ : token_lengths) {
        long tl = static_cast<long>(tl_);
        if (tl > cap) {
            if (cur > 0) ++lines;
            long full = tl / cap;
            long rem = tl % cap;
            if (rem == 0) {
                lines += full - 1;
                cur = cap;
            } else {
                lines += full;
                cur = rem;
            }
        } else if (cur == 0) {
            cur = tl;
        } else if (cur + 1 + tl <= cap) {
            cur += 1 + tl;
        } else {
            ++lines;
            cur = tl;
        }
    }
    return lines;
}

bool fits(const std::vector<std::size_t>& token_lengths, const BBox& box, int size) {
    long cap = static_cast<long>(std::floor(box.width() / (0.55 * size)));
    long lines = wrapped_lines(token_lengths, cap);
    if (lines < 0) return false;
    return static_cast<double>(lines) * 1.25 * size <= box.height();
}

}  // namespace

FontFit fit_font(const std::string& text, const BBox& box) {
    if (text.empty()) return {16, false};
    std::vector<std::size_t> token_lengths;
    for (const auto& tok : split_tokens(text)) token_lengths.push_back(char_count(tok));
    if (token_lengths.empty()) return {16, false};

    // fits() is monotone: larger sizes never fit when smaller ones don't.
    if (!fits(token_lengths, box, 6)) return {6, true};
    int lo = 6, hi = 72;  // invariant: lo fits
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (fits(token_lengths, box, mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return {lo, false};
}

int fit_font_size(const std::string& text, const BBox& box) {
    return fit_font(text, box).px;
}

ReconstructedDocument build_intermediate(const DocumentAnnotation& doc) {
    ReconstructedDocument rd;
    rd.image_id = doc.image_id;
    rd.page_width = doc.width;
    rd.page_height = doc.height;

    for (const auto& r : doc.regions) {
        if (r.cls == RegionClass::table) continue;  // tables are omitted
        IntermediateComponent c;
        c.region_id = r.id;
        c.cls = r.cls;
        c.bbox = bbox_of(r.polygon);
        if (is_text_class(r.cls)) {
            c.text = region_text(doc, r.id);
            FontFit fit = fit_font(*c.text, c.bbox);
            c.font_size = fit.px;
            c.overflow = fit.overflow;
        } else {
            c.image_src = "images/" + r.id + ".png";
        }
        rd.components.push_back(std::move(c));
    }

    std::stable_sort(rd.components.begin(), rd.components.end(),
                     [](const IntermediateComponent& a, const IntermediateComponent& b) {
                         if (a.bbox.y_min != b.bbox.y_min) return a.bbox.y_min < b.bbox.y_min;
                         return a.bbox.x_min < b.bbox.x_min;
                     });
    return rd;
}

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

namespace {

// CSS pixel values: two decimals, trailing zeros trimmed.
std::string px(double v) {
    std::string s = detail::format_fixed(v, 2);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

}  // namespace

std::string render_html(const ReconstructedDocument& rd) {
    std::string h;
    h += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\"/>\n";
    h += "<title>" + html_escape(rd.image_id) + "</title>\n";
    h += "<style>\n"
         "body { margin: 0; background: #808080; }\n"
         ".page { position: relative; margin: 0 auto; background: #ffffff; }\n"
         ".tx { position: absolute; overflow: hidden; white-space: pre-line; "
         "font-family: sans-serif; line-height: 1.25; }\n"
         ".im { position: absolute; }\n"
         "</style>\n</head>\n<body>\n";
    h += "<div class=\"page\" style=\"width:" + px(rd.page_width) +
         "px;height:" + px(rd.page_height) + "px\">\n";
    for (const auto& c : rd.components) {
        std::string pos = "left:" + px(c.bbox.x_min) + "px;top:" + px(c.bbox.y_min) +
                          "px;width:" + px(c.bbox.width()) +
                          "px;height:" + px(c.bbox.height()) + "px";
        if (c.text) {
            h += "<div class=\"tx\" style=\"" + pos +
                 ";font-size:" + std::to_string(c.font_size) + "px\" data-region=\"" +
                 html_escape(c.region_id) + "\"";
            if (c.overflow) h += " data-overflow=\"1\"";
            h += ">" + html_escape(*c.text) + "</div>\n";
        } else {
            h += "<img class=\"im\" style=\"" + pos + "\" src=\"" +
                 html_escape(*c.image_src) + "\" alt=\"\" data-region=\"" +
                 html_escape(c.region_id) + "\"/>\n";
        }
    }
    h += "</div>\n</body>\n</html>\n";
    return h;
}

std::string intermediate_to_json(const ReconstructedDocument& rd) {
    const auto num = [](double v) {
        if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.007199254740992e15)
            return json(static_cast<std::int64_t>(v));
        return json(v);
    };
    json j;
    j["image_id"] = rd.image_id;
    j["page_width"] = num(rd.page_width);
    j["page_height"] = num(rd.page_height);
    json comps = json::array();
    for (const auto& c : rd.components) {
        json o;
        o["region_id"] = c.region_id;
        o["class"] = to_string(c.cls);
        o["bbox"] = json::array({num(c.bbox.x_min), num(c.bbox.y_min), num(c.bbox.x_max),
                                 num(c.bbox.y_max)});
        if (c.text) {
            o["text"] = *c.text;
            o["font_size"] = c.font_size;
            o["overflow"] = c.overflow;
        }
        if (c.image_src) o["image_src"] = *c.image_src;
        comps.push_back(std::move(o));
    }
    j["components"] = std::move(comps);
    return j.dump(2) + "\n";
}

std::filesystem::path emit_html(const ReconstructedDocument& rd,
                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto write = [](const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + p.string());
        out << content;
        if (!out) throw Error("I/O failure writing " + p.string());
    };
    write(out_dir / "intermediate.json", intermediate_to_json(rd));
    auto index = out_dir / "index.html";
    write(index, render_html(rd));
    return index;
}

}  // namespace docrebench

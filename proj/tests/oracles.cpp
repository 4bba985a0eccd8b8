#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace docrebench::oracle {

namespace {

template <typename Seq>
std::size_t dp_memo(const Seq& a, const Seq& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> memo((n + 1) * (m + 1), static_cast<std::size_t>(-1));
    std::function<std::size_t(std::size_t, std::size_t)> go =
        [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == n) return m - j;
        if (j == m) return n - i;
        std::size_t& slot = memo[i * (m + 1) + j];
        if (slot != static_cast<std::size_t>(-1)) return slot;
        if (a[i] == b[j]) return slot = go(i + 1, j + 1);
        std::size_t best = go(i + 1, j + 1);        // substitute
        best = std::min(best, go(i + 1, j));        // delete from a
        best = std::min(best, go(i, j + 1));        // insert into a
        return slot = best + 1;
    };
    return go(0, 0);
}

// x-coordinates where the polygon boundary crosses the horizontal line y.
std::vector<double> crossings(const std::vector<Point>& poly, double y) {
    std::vector<double> xs;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        // half-open rule so vertices are not double counted
        if ((p.y <= y && q.y > y) || (q.y <= y && p.y > y)) {
            double t = (y - p.y) / (q.y - p.y);
            xs.push_back(p.x + t * (q.x - p.x));
        }
    }
    std::sort(xs.begin(), xs.end());
    return xs;
}

// Count of pixel-center indices i in [0, grid) whose x = x0 + (i + 0.5) * dx
// lies inside [lo, hi).
long pixels_in_range(double lo, double hi, double x0, double dx, long grid) {
    double a = (lo - x0) / dx - 0.5;
    double b = (hi - x0) / dx - 0.5;
    long first = static_cast<long>(std::ceil(a));
    long last = static_cast<long>(std::floor(b));
    if (static_cast<double>(last) == b) --last;  // hi exclusive
    first = std::max(first, 0L);
    last = std::min(last, grid - 1);
    return std::max(0L, last - first + 1);
}

struct IntervalSet {
    std::vector<std::pair<double, double>> spans;
};

IntervalSet spans_of(const std::vector<double>& xs) {
    IntervalSet s;
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) s.spans.push_back({xs[k], xs[k + 1]});
    return s;
}

}  // namespace

std::size_t dp_edit_distance(const std::u32string& a, const std::u32string& b) {
    return dp_memo(a, b);
}

std::size_t dp_edit_distance(const std::vector<std::string>& a,
                             const std::vector<std::string>& b) {
    return dp_memo(a, b);
}

double raster_area(const std::vector<Point>& poly, int grid) {
    BBox box = bbox_of(poly);
    double dx = box.width() / grid, dy = box.height() / grid;
    if (dx <= 0 || dy <= 0) return 0.0;
    long count = 0;
    for (int j = 0; j < grid; ++j) {
        double y = box.y_min + (j + 0.5) * dy;
        auto xs = crossings(poly, y);
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
            count += pixels_in_range(xs[k], xs[k + 1], box.x_min, dx, grid);
    }
    return static_cast<double>(count) * dx * dy;
}

double raster_iou(const std::vector<Point>& a, const std::vector<Point>& b, int grid) {
    BBox ba = bbox_of(a), bb = bbox_of(b);
    BBox box{std::min(ba.x_min, bb.x_min), std::min(ba.y_min, bb.y_min),
             std::max(ba.x_max, bb.x_max), std::max(ba.y_max, bb.y_max)};
    double dx = box.width() / grid, dy = box.height() / grid;
    if (dx <= 0 || dy <= 0) return 0.0;

    long in_a = 0, in_b = 0, in_both = 0;
    for (int j = 0; j < grid; ++j) {
        double y = box.y_min + (j + 0.5) * dy;
        IntervalSet sa = spans_of(crossings(a, y));
        IntervalSet sb = spans_of(crossings(b, y));
        for (const auto& [lo, hi] : sa.spans)
            in_a += pixels_in_range(lo, hi, box.x_min, dx, grid);
        for (const auto& [lo, hi] : sb.spans)
            in_b += pixels_in_range(lo, hi, box.x_min, dx, grid);
        for (const auto& [alo, ahi] : sa.spans) {
            for (const auto& [blo, bhi] : sb.spans) {
                double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
                if (lo < hi) in_both += pixels_in_range(lo, hi, box.x_min, dx, grid);
            }
        }
    }
    long uni = in_a + in_b - in_both;
    return uni > 0 ? static_cast<double>(in_both) / static_cast<double>(uni) : 0.0;
}

BruteMapping brute_force_mapping(const std::vector<LayoutRegion>& gt,
                                 const std::vector<LayoutRegion>& pred) {
    BruteMapping out;
    std::vector<bool> gt_hit(gt.size(), false);
    for (const auto& p : pred) {
        Polygon pp(p.polygon);
        // full IOU table, then explicit argmax scan
        std::vector<double> ious;
        for (const auto& g : gt) ious.push_back(polygon_iou(Polygon(g.polygon), pp));
        std::size_t arg = 0;
        for (std::size_t i = 1; i < ious.size(); ++i)
            if (ious[i] > ious[arg]) arg = i;
        if (!ious.empty() && ious[arg] > 0.5) {
            out.entries[gt[arg].id].push_back(p.id);
            gt_hit[arg] = true;
        } else {
            out.unmatched_pred.push_back(p.id);
        }
    }
    for (std::size_t i = 0; i < gt.size(); ++i)
        if (!gt_hit[i]) out.unmatched_gt.push_back(gt[i].id);
    for (auto& [k, v] : out.entries) std::sort(v.begin(), v.end());
    return out;
}

std::size_t max_matching_cardinality(
    std::size_t n_gt, std::size_t n_pred,
    const std::vector<std::pair<std::size_t, std::size_t>>& candidates) {
    std::vector<std::vector<std::size_t>> adj(n_gt);
    for (const auto& [g, p] : candidates) adj[g].push_back(p);
    (void)n_pred;

    std::unordered_map<std::uint64_t, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::uint64_t)> go =
        [&](std::size_t i, std::uint64_t used) -> std::size_t {
        if (i == n_gt) return 0;
        std::uint64_t key = (static_cast<std::uint64_t>(i) << 56) | used;
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::size_t best = go(i + 1, used);  // leave gt i unmatched
        for (std::size_t p : adj[i]) {
            if (used & (1ULL << p)) continue;
            best = std::max(best, 1 + go(i + 1, used | (1ULL << p)));
        }
        memo[key] = best;
        return best;
    };
    return go(0, 0);
}

namespace {

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    if (pts.size() < 3) return {};
    const auto crossz = [](const Point& o, const Point& a, const Point& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && crossz(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    std::size_t lower = k + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (k >= lower && crossz(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

double shoelace(const std::vector<Point>& v) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return std::abs(s) / 2;
}

}  // namespace

std::vector<Point> random_convex_polygon(TestRng& rng, double cx, double cy, double radius,
                                         int min_vertices, double min_area) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        int n = static_cast<int>(rng.uniform_int(4, 10));
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i)
            pts.push_back({cx + rng.uniform(-radius, radius),
                           cy + rng.uniform(-radius, radius)});
        auto hull = convex_hull(std::move(pts));
        if (static_cast<int>(hull.size()) >= min_vertices && shoelace(hull) >= min_area)
            return hull;
    }
    // Guaranteed fallback: an axis-aligned square.
    double r = std::max(radius, std::sqrt(min_area));
    return {{cx - r, cy - r}, {cx + r, cy - r}, {cx + r, cy + r}, {cx - r, cy + r}};
}

std::vector<Point> random_simple_polygon(TestRng& rng, double cx, double cy,
                                         double radius_lo, double radius_hi, int vertices) {
    std::vector<double> angles;
    for (int i = 0; i < vertices; ++i) angles.push_back(rng.uniform(0, 2 * M_PI));
    std::sort(angles.begin(), angles.end());
    for (std::size_t i = 1; i < angles.size(); ++i)
        if (angles[i] - angles[i - 1] < 1e-3) angles[i] = angles[i - 1] + 1e-3;
    std::vector<Point> pts;
    for (double a : angles) {
        double r = rng.uniform(radius_lo, radius_hi);
        pts.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    return pts;
}

namespace {

bool decode_entities(const std::string& in, std::string& out, std::string& error) {
    for (std::size_t i = 0; i < in.size();) {
        if (in[i] != '&') {
            out += in[i++];
            continue;
        }
        auto semi = in.find(';', i);
        if (semi == std::string::npos) {
            error = "unterminated entity";
            return false;
        }
        std::string name = in.substr(i + 1, semi - i - 1);
        if (name == "amp")
            out += '&';
        else if (name == "lt")
            out += '<';
        else if (name == "gt")
            out += '>';
        else if (name == "quot")
            out += '"';
        else if (name == "#39" || name == "apos")
            out += '\'';
        else {
            error = "unknown entity &" + name + ";";
            return false;
        }
        i = semi + 1;
    }
    return true;
}

bool is_void_tag(const std::string& tag) {
    return tag == "meta" || tag == "img" || tag == "br" || tag == "hr" || tag == "link";
}

}  // namespace

HtmlParseResult parse_html(const std::string& html) {
    HtmlParseResult result;
    struct Open {
        std::string tag;
        std::size_t element_index;
    };
    std::vector<Open> stack;
    std::size_t i = 0;
    bool saw_doctype = false;
    bool saw_root = false;

    const auto fail = [&](const std::string& msg) {
        result.well_formed = false;
        result.error = msg + " at offset " + std::to_string(i);
        return result;
    };

    while (i < html.size()) {
        if (html[i] == '<') {
            if (html.compare(i, 2, "<!") == 0) {
                auto end = html.find('>', i);
                if (end == std::string::npos) return fail("unterminated declaration");
                saw_doctype = true;
                i = end + 1;
                continue;
            }
            bool closing = html.compare(i, 2, "</") == 0;
            std::size_t name_start = i + (closing ? 2 : 1);
            auto end = html.find('>', i);
            if (end == std::string::npos) return fail("unterminated tag");
            std::string inside = html.substr(name_start, end - name_start);
            bool self_closed = !inside.empty() && inside.back() == '/';
            if (self_closed) inside.pop_back();

            std::string tag;
            std::size_t p = 0;
            while (p < inside.size() && !isspace(static_cast<unsigned char>(inside[p])))
                tag += inside[p++];
            if (tag.empty()) return fail("empty tag name");

            if (closing) {
                if (stack.empty()) return fail("closing tag without open element");
                if (stack.back().tag != tag)
                    return fail("mismatched </" + tag + ">, open is <" +
                                stack.back().tag + ">");
                stack.pop_back();
            } else {
                HtmlElement el;
                el.tag = tag;
                // parse attributes: name="value" with mandatory quotes
                while (p < inside.size()) {
                    while (p < inside.size() &&
                           isspace(static_cast<unsigned char>(inside[p])))
                        ++p;
                    if (p >= inside.size()) break;
                    std::string name;
                    while (p < inside.size() && inside[p] != '=' &&
                           !isspace(static_cast<unsigned char>(inside[p])))
                        name += inside[p++];
                    if (p >= inside.size() || inside[p] != '=')
                        return fail("attribute \"" + name + "\" without value");
                    ++p;
                    if (p >= inside.size() || inside[p] != '"')
                        return fail("unquoted attribute value for \"" + name + "\"");
                    ++p;
                    std::string raw;
                    while (p < inside.size() && inside[p] != '"') raw += inside[p++];
                    if (p >= inside.size()) return fail("unterminated attribute value");
                    ++p;
                    std::string value, error;
                    if (!decode_entities(raw, value, error)) return fail(error);
                    if (name == "class") el.cls = value;
                    if (name == "src") el.src = value;
                }
                result.elements.push_back(el);
                if (stack.empty()) {
                    if (saw_root && tag != "html")
                        return fail("content after root element");
                    saw_root = true;
                }
                if (!self_closed && !is_void_tag(tag))
                    stack.push_back({tag, result.elements.size() - 1});
            }
            i = end + 1;
        } else {
            auto next = html.find('<', i);
            if (next == std::string::npos) next = html.size();
            std::string raw = html.substr(i, next - i);
            std::string text, error;
            if (!decode_entities(raw, text, error)) return fail(error);
            if (!stack.empty()) {
                result.elements[stack.back().element_index].text += text;
            } else {
                for (char c : text)
                    if (!isspace(static_cast<unsigned char>(c)))
                        return fail("stray text outside elements");
            }
            i = next;
        }
    }
    if (!stack.empty()) {
        i = html.size();
        return fail("unclosed <" + stack.back().tag + ">");
    }
    result.well_formed = saw_doctype && saw_root;
    if (!result.well_formed) result.error = "missing doctype or root element";
    return result;
}

}  // namespace docrebench::oracle

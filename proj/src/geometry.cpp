#include "docrebench/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "docrebench/errors.hpp"

namespace docrebench {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y);
}

double signed_area(const std::vector<Point>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return 0.5 * s;
}

int sign_eps(double d, double eps) { return (d > eps) - (d < -eps); }

bool on_segment(const Point& p, const Point& q, const Point& r, double eps) {
    return r.x <= std::max(p.x, q.x) + eps && r.x >= std::min(p.x, q.x) - eps &&
           r.y <= std::max(p.y, q.y) + eps && r.y >= std::min(p.y, q.y) - eps;
}

// Intersection of segments (p1,p2) and (p3,p4), including touching.
bool segments_intersect(const Point& p1, const Point& p2, const Point& p3, const Point& p4,
                        double eps) {
    int d1 = sign_eps(cross(p3, p4, p1), eps);
    int d2 = sign_eps(cross(p3, p4, p2), eps);
    int d3 = sign_eps(cross(p1, p2, p3), eps);
    int d4 = sign_eps(cross(p1, p2, p4), eps);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(p3, p4, p1, eps)) return true;
    if (d2 == 0 && on_segment(p3, p4, p2, eps)) return true;
    if (d3 == 0 && on_segment(p1, p2, p3, eps)) return true;
    if (d4 == 0 && on_segment(p1, p2, p4, eps)) return true;
    return false;
}

double scale_of(const std::vector<Point>& v) {
    double s = 1.0;
    for (const Point& p : v) s = std::max({s, std::abs(p.x), std::abs(p.y)});
    return s;
}

// Sutherland–Hodgman step: keeps the part of convex polygon `poly` on or left
// of the directed line (a,b). Boundary points count as inside.
void clip_left(std::vector<Point>& poly, const Point& a, const Point& b, double eps) {
    if (poly.empty()) return;
    std::vector<Point> out;
    out.reserve(poly.size() + 2);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& cur = poly[i];
        const Point& nxt = poly[(i + 1) % n];
        double s1 = cross(a, b, cur);
        double s2 = cross(a, b, nxt);
        bool in_cur = s1 >= -eps;
        bool in_nxt = s2 >= -eps;
        if (in_cur) out.push_back(cur);
        if (in_cur != in_nxt) {
            double t = s1 / (s1 - s2);
            out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
        }
    }
    poly = std::move(out);
}

// Signed intersection area of triangles (O,a,b) and (O,c,d) about origin O.
double tri_tri_intersection(const Point& a, const Point& b, const Point& c, const Point& d,
                            double eps) {
    const Point o{0.0, 0.0};
    int s1 = sign_eps(cross(o, a, b), eps);
    int s2 = sign_eps(cross(o, c, d), eps);
    if (s1 == 0 || s2 == 0) return 0.0;
    Point a1 = a, b1 = b, c1 = c, d1 = d;
    if (s1 < 0) std::swap(a1, b1);
    if (s2 < 0) std::swap(c1, d1);
    std::vector<Point> poly{o, a1, b1};
    clip_left(poly, o, c1, eps);
    if (poly.size() >= 3) clip_left(poly, c1, d1, eps);
    if (poly.size() >= 3) clip_left(poly, d1, o, eps);
    if (poly.size() < 3) return 0.0;
    double area = std::abs(signed_area(poly));
    return (s1 * s2 < 0) ? -area : area;
}

}  // namespace

std::vector<std::string> Polygon::violations(const std::vector<Point>& v) {
    std::vector<std::string> out;
    if (v.size() < 3) {
        out.emplace_back("polygon.min_vertices");
        return out;
    }
    for (const Point& p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            out.emplace_back("polygon.finite");
            return out;
        }
    }
    if (std::abs(signed_area(v)) < 1.0) out.emplace_back("polygon.area");

    const double scale = scale_of(v);
    const double eps = scale * scale * 1e-12;
    const std::size_t n = v.size();
    bool simple = true;
    for (std::size_t i = 0; simple && i < n; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % n];
        if (std::abs(a.x - b.x) < eps && std::abs(a.y - b.y) < eps) {
            simple = false;  // zero-length edge
            break;
        }
        // Spike: the next edge folds back along this one.
        const Point& c = v[(i + 2) % n];
        double turn = cross(a, b, c);
        double along = (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y);
        if (std::abs(turn) <= eps && along < 0) {
            simple = false;
            break;
        }
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // adjacent around the ring
            if (segments_intersect(a, b, v[j], v[(j + 1) % n], eps)) {
                simple = false;
                break;
            }
        }
    }
    if (!simple) out.emplace_back("polygon.simple");
    return out;
}

Polygon::Polygon(std::vector<Point> vertices) : verts_(std::move(vertices)) {
    auto v = violations(verts_);
    if (!v.empty()) {
        std::string msg = "invalid polygon:";
        for (const auto& rule : v) msg += " " + rule;
        throw GeometryError(msg);
    }
}

double polygon_area(const Polygon& p) {
    return std::abs(signed_area(p.vertices()));
}

double polygon_intersection_area(const Polygon& a, const Polygon& b) {
    std::vector<Point> pa = a.vertices();
    std::vector<Point> pb = b.vertices();
    if (signed_area(pa) < 0) std::reverse(pa.begin(), pa.end());
    if (signed_area(pb) < 0) std::reverse(pb.begin(), pb.end());

    // Translate near the common centroid; the fan decomposition is
    // translation-invariant but conditioning improves.
    BBox ba = bbox_of(pa), bb = bbox_of(pb);
    if (ba.x_max < bb.x_min || bb.x_max < ba.x_min || ba.y_max < bb.y_min ||
        bb.y_max < ba.y_min)
        return 0.0;
    const double ox = 0.5 * (std::min(ba.x_min, bb.x_min) + std::max(ba.x_max, bb.x_max));
    const double oy = 0.5 * (std::min(ba.y_min, bb.y_min) + std::max(ba.y_max, bb.y_max));
    for (Point& p : pa) {
        p.x -= ox;
        p.y -= oy;
    }
    for (Point& p : pb) {
        p.x -= ox;
        p.y -= oy;
    }

    const double scale = std::max(scale_of(pa), scale_of(pb));
    const double eps = scale * scale * 1e-12;

    // Signed fan decomposition about the origin: the winding number of a
    // simple CCW polygon is the sum of signed indicator functions of the
    // triangles (O, v_i, v_{i+1}), so the pairwise clipped areas sum to the
    // intersection area.
    double total = 0.0;
    const std::size_t n = pa.size(), m = pb.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            total += tri_tri_intersection(pa[i], pa[(i + 1) % n], pb[j], pb[(j + 1) % m],
                                          eps);
        }
    }
    return std::max(0.0, total);
}

double polygon_iou(const Polygon& a, const Polygon& b) {
    const auto& va = a.vertices();
    const auto& vb = b.vertices();
    if (va.size() == vb.size() &&
        std::equal(va.begin(), va.end(), vb.begin(),
                   [](const Point& p, const Point& q) { return p.x == q.x && p.y == q.y; }))
        return 1.0;

    double inter = polygon_intersection_area(a, b);
    double area_a = polygon_area(a);
    double area_b = polygon_area(b);
    double uni = area_a + area_b - inter;
    if (inter <= std::min(area_a, area_b) * 1e-12) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

BBox bbox_of(const std::vector<Point>& v) {
    BBox box{v.front().x, v.front().y, v.front().x, v.front().y};
    for (const Point& p : v) {
        box.x_min = std::min(box.x_min, p.x);
        box.y_min = std::min(box.y_min, p.y);
        box.x_max = std::max(box.x_max, p.x);
        box.y_max = std::max(box.y_max, p.y);
    }
    return box;
}

BBox bbox_of(const Polygon& p) {
    return bbox_of(p.vertices());
}

double bbox_iou(const BBox& a, const BBox& b) {
    double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0 || iy <= 0) return 0.0;
    double inter = ix * iy;
    double uni = a.area() + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

}  // namespace docrebench

#pragma once

#include <string>
#include <vector>

namespace docrebench {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
};

/// A simple polygon in pixel coordinates. The validating constructor rejects
/// fewer than 3 vertices, non-finite coordinates, |area| < 1 px² and
/// self-intersecting rings.
class Polygon {
  public:
    /// Validates and throws GeometryError on violation.
    explicit Polygon(std::vector<Point> vertices);

    /// Invariant checks without construction; empty result means valid.
    /// Each entry is a rule name: polygon.min_vertices, polygon.finite,
    /// polygon.area, polygon.simple.
    static std::vector<std::string> violations(const std::vector<Point>& vertices);

    const std::vector<Point>& vertices() const { return verts_; }

  private:
    std::vector<Point> verts_;
};

/// Absolute shoelace area, in px².
double polygon_area(const Polygon& p);

/// Area of intersection of two simple polygons. Exact up to floating error.
double polygon_intersection_area(const Polygon& a, const Polygon& b);

/// Intersection over union in [0, 1]; 0 for disjoint polygons.
double polygon_iou(const Polygon& a, const Polygon& b);

/// Tightest axis-aligned box containing all vertices.
BBox bbox_of(const Polygon& p);
BBox bbox_of(const std::vector<Point>& vertices);

/// Overlap / union of two axis-aligned boxes.
double bbox_iou(const BBox& a, const BBox& b);

}  // namespace docrebench

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evokit/problems/problem.hpp"

namespace evokit {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

/// Convex outline, counter-clockwise vertices.
using Polygon = std::vector<Vec2>;

inline Polygon rotate_polygon(const Polygon& poly, double degrees) {
    double rad = degrees * std::numbers::pi / 180.0;
    double c = std::cos(rad), s = std::sin(rad);
    Polygon out;
    out.reserve(poly.size());
    for (const auto& v : poly) out.push_back({c * v.x - s * v.y, s * v.x + c * v.y});
    return out;
}

inline Polygon translate_polygon(Polygon poly, double dx, double dy) {
    for (auto& v : poly) {
        v.x += dx;
        v.y += dy;
    }
    return poly;
}

struct Bounds {
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
};

inline Bounds polygon_bounds(const Polygon& poly) {
    Bounds b{poly[0].x, poly[0].x, poly[0].y, poly[0].y};
    for (const auto& v : poly) {
        b.min_x = std::min(b.min_x, v.x);
        b.max_x = std::max(b.max_x, v.x);
        b.min_y = std::min(b.min_y, v.y);
        b.max_y = std::max(b.max_y, v.y);
    }
    return b;
}

/// Separating-axis test for convex polygons. Returns true iff the interiors
/// intersect with penetration deeper than tol on every candidate axis.
inline bool polygons_overlap(const Polygon& a, const Polygon& b, double tol = 1e-9) {
    auto axes_separate = [&](const Polygon& p, const Polygon& q) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const Vec2& u = p[i];
            const Vec2& v = p[(i + 1) % p.size()];
            double nx = -(v.y - u.y), ny = v.x - u.x;
            double len = std::hypot(nx, ny);
            if (len < 1e-15) continue;
            nx /= len;
            ny /= len;
            double min_p = 1e300, max_p = -1e300, min_q = 1e300, max_q = -1e300;
            for (const auto& w : p) {
                double d = nx * w.x + ny * w.y;
                min_p = std::min(min_p, d);
                max_p = std::max(max_p, d);
            }
            for (const auto& w : q) {
                double d = nx * w.x + ny * w.y;
                min_q = std::min(min_q, d);
                max_q = std::max(max_q, d);
            }
            if (std::min(max_p, max_q) - std::max(min_p, min_q) <= tol) return true;
        }
        return false;
    };
    return !axes_separate(a, b) && !axes_separate(b, a);
}

enum class ObjectType { triangle, square, rectangle, circle, oval };

inline std::string object_type_name(ObjectType t) {
    switch (t) {
        case ObjectType::triangle: return "triangle";
        case ObjectType::square: return "square";
        case ObjectType::rectangle: return "rectangle";
        case ObjectType::circle: return "circle";
        case ObjectType::oval: return "oval";
    }
    return "?";
}

struct LayoutInstance {
    double width = 0.0;   // cross axis
    double length = 0.0;  // left-shift axis
    double triangle_side = 1.0;
    double square_side = 1.0;
    double rect_a = 1.0, rect_b = 2.0;       // the two rectangle sides
    double circle_radius = 0.5;
    double oval_a = 1.0, oval_b = 0.5;       // semi-axes
    double balance_tolerance = 0.10;
    std::size_t max_genes = 64;              // estimated maximum object count

    static LayoutInstance from_json(const nlohmann::json& j) {
        LayoutInstance in;
        in.width = j.at("width").get<double>();
        in.length = j.at("length").get<double>();
        in.triangle_side = j.value("triangle_side", 1.0);
        in.square_side = j.value("square_side", 1.0);
        in.rect_a = j.value("rect_a", 1.0);
        in.rect_b = j.value("rect_b", 2.0);
        in.circle_radius = j.value("circle_radius", 0.5);
        in.oval_a = j.value("oval_a", 1.0);
        in.oval_b = j.value("oval_b", 0.5);
        in.max_genes = j.value("max_genes", static_cast<std::size_t>(64));
        return in;
    }
    static LayoutInstance from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InstanceError("cannot open layout instance: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

inline constexpr int kEllipseSegments = 32;

/// Base outlines centered on the origin. Circle and oval are inscribed
/// 32-gons, a conservative under-approximation of the true curve.
inline Polygon base_polygon(const LayoutInstance& in, ObjectType t) {
    Polygon p;
    switch (t) {
        case ObjectType::triangle: {
            double s = in.triangle_side;
            double h = s * std::sqrt(3.0) / 2.0;
            // centroid at the origin
            p = {{-s / 2, -h / 3}, {s / 2, -h / 3}, {0, 2 * h / 3}};
            break;
        }
        case ObjectType::square: {
            double h = in.square_side / 2;
            p = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
            break;
        }
        case ObjectType::rectangle: {
            double a = in.rect_a / 2, b = in.rect_b / 2;
            p = {{-a, -b}, {a, -b}, {a, b}, {-a, b}};
            break;
        }
        case ObjectType::circle:
        case ObjectType::oval: {
            double a = t == ObjectType::circle ? in.circle_radius : in.oval_a;
            double b = t == ObjectType::circle ? in.circle_radius : in.oval_b;
            for (int i = 0; i < kEllipseSegments; ++i) {
                double ang = 2.0 * std::numbers::pi * i / kEllipseSegments;
                p.push_back({a * std::cos(ang), b * std::sin(ang)});
            }
            break;
        }
    }
    return p;
}

/// Exact closed-form object area (not the polygon approximation).
inline double object_area(const LayoutInstance& in, ObjectType t) {
    switch (t) {
        case ObjectType::triangle:
            return std::sqrt(3.0) / 4.0 * in.triangle_side * in.triangle_side;
        case ObjectType::square: return in.square_side * in.square_side;
        case ObjectType::rectangle: return in.rect_a * in.rect_b;
        case ObjectType::circle:
            return std::numbers::pi * in.circle_radius * in.circle_radius;
        case ObjectType::oval: return std::numbers::pi * in.oval_a * in.oval_b;
    }
    return 0.0;
}

/// Symmetry-reduced rotation range in integer degrees, [0, limit).
inline int rotation_limit(ObjectType t) {
    switch (t) {
        case ObjectType::triangle: return 120;
        case ObjectType::square: return 90;
        case ObjectType::rectangle: return 180;
        case ObjectType::circle: return 0;  // no rotation gene
        case ObjectType::oval: return 180;
    }
    return 0;
}

inline const std::vector<ObjectType>& layout_object_types() {
    static const std::vector<ObjectType> types = {ObjectType::triangle, ObjectType::square,
                                                  ObjectType::rectangle, ObjectType::circle,
                                                  ObjectType::oval};
    return types;
}

/// Gene per object type: w_pos (real, cross axis) plus an integer rotation
/// for every type but the circle.
inline GenomeRegistry layout_registry(const LayoutInstance& instance) {
    GenomeRegistry r;
    r.structure = StructureKind::free_sequence;
    for (ObjectType t : layout_object_types()) {
        GeneType gt;
        gt.type_id = object_type_name(t);
        gt.name = gt.type_id;
        gt.params.push_back({ParamKind::real, 0.0, instance.width});
        if (rotation_limit(t) > 0)
            gt.params.push_back(
                {ParamKind::integer, 0.0, static_cast<double>(rotation_limit(t) - 1)});
        r.register_gene_type(std::move(gt));
        r.layout.push_back(object_type_name(t));
    }
    return r;
}

inline LengthPolicy layout_length_policy(const LayoutInstance& instance) {
    return LengthPolicy::variable(1, instance.max_genes);
}

struct Placement {
    ObjectType type;
    double rotation = 0.0;   // degrees
    double w_pos = 0.0;      // resolved cross-axis center
    double l_pos = 0.0;      // resolved length-axis center
    Polygon outline;         // final placed outline
    bool edge_repaired = false;  // cross-axis protrusion removed phenotypically
    bool placed_during_wrap = false;
};

struct LayoutDecodeResult {
    std::vector<Placement> placements;
    bool filled = false;
    bool wrapped = false;
    std::size_t wrap_placements = 0;  // objects placed after wrapping
    std::size_t discarded = 0;
};

namespace detail {

inline double layout_min_dimension(const LayoutInstance& in) {
    double m = in.triangle_side;
    m = std::min(m, in.square_side);
    m = std::min(m, std::min(in.rect_a, in.rect_b));
    m = std::min(m, 2 * in.circle_radius);
    m = std::min(m, 2 * std::min(in.oval_a, in.oval_b));
    return m;
}

struct SlideResult {
    bool ok = false;
    double x = 0.0;  // resolved min-x of the outline
};

/// Slides the outline from the right edge toward x = 0 until first contact.
/// Coarse bracketing then bisection down to the contact tolerance.
inline SlideResult slide_left(const Polygon& outline_at_origin, double extent_x,
                              const std::vector<Placement>& placed,
                              const LayoutInstance& in) {
    double eps = 1e-6 * in.length;
    double x_start = in.length - extent_x;
    if (x_start < 0.0) return {};

    auto overlaps_at = [&](double x) {
        Polygon poly = translate_polygon(outline_at_origin, x, 0.0);
        for (const auto& p : placed)
            if (polygons_overlap(poly, p.outline)) return true;
        return false;
    };

    if (overlaps_at(x_start)) return {};  // cannot fully enter: discard

    double step = std::max(layout_min_dimension(in) / 8.0, eps);
    double good = x_start;
    double bad = -1.0;
    for (double x = x_start - step; x > 0.0; x -= step) {
        if (overlaps_at(x)) {
            bad = x;
            break;
        }
        good = x;
    }
    if (bad < 0.0) {
        if (!overlaps_at(0.0)) return {true, 0.0};
        bad = 0.0;
    }
    while (good - bad > eps / 4.0) {
        double mid = (good + bad) / 2.0;
        if (overlaps_at(mid))
            bad = mid;
        else
            good = mid;
    }
    return {true, good};
}

/// One placement attempt; nothing is committed on failure.
inline bool try_place(const LayoutInstance& in, ObjectType type, double w_pos, double alpha,
                      const std::vector<Placement>& placed, Placement* out) {
    Polygon poly = rotate_polygon(base_polygon(in, type), alpha);
    Bounds b = polygon_bounds(poly);
    double height = b.max_y - b.min_y;
    double extent_x = b.max_x - b.min_x;
    if (height > in.width || extent_x > in.length) return false;

    // cross-axis clamp = phenotypic edge repair
    double half = height / 2.0;
    double center_y0 = (b.max_y + b.min_y) / 2.0;
    double cy = std::clamp(w_pos, half, in.width - half);
    bool repaired = std::abs(cy - w_pos) > 1e-12;

    // normalize so that min-x = 0 and center-y = cy
    Polygon at_origin = translate_polygon(poly, -b.min_x, cy - center_y0);

    SlideResult slide = slide_left(at_origin, extent_x, placed, in);
    if (!slide.ok) return false;

    if (out) {
        out->type = type;
        out->rotation = alpha;
        out->w_pos = cy;
        out->l_pos = slide.x + extent_x / 2.0;
        out->outline = translate_polygon(at_origin, slide.x, 0.0);
        out->edge_repaired = repaired;
    }
    return true;
}

inline ObjectType smallest_object(const LayoutInstance& in) {
    ObjectType best = ObjectType::triangle;
    double best_area = 1e300;
    for (ObjectType t : layout_object_types()) {
        double a = object_area(in, t);
        if (a < best_area) {
            best_area = a;
            best = t;
        }
    }
    return best;
}

/// Coarse scan: can the smallest object still be placed in any orientation?
inline bool smallest_fits(const LayoutInstance& in, const std::vector<Placement>& placed) {
    ObjectType t = smallest_object(in);
    int limit = std::max(rotation_limit(t), 1);
    int angle_step = std::max(limit / 12, 1);
    double w_step = std::max(in.width / 40.0, 1e-3);
    for (int a = 0; a < limit; a += angle_step)
        for (double w = 0.0; w <= in.width + 1e-12; w += w_step)
            if (try_place(in, t, w, a, placed, nullptr)) return true;
    return false;
}

}  // namespace detail

inline ObjectType object_type_from_name(const std::string& name) {
    for (ObjectType t : layout_object_types())
        if (object_type_name(t) == name) return t;
    throw UnknownTypeError(name);
}

/// Decodes a layout chromosome gene by gene: rotate, clamp the cross-axis
/// position, slide left to first contact. Three consecutive discards trigger
/// the filled-surface test; a too-short chromosome wraps to its beginning at
/// most once and the placements made during the wrap are reported for
/// devaluation.
inline LayoutDecodeResult layout_decode(const Chromosome& c, const LayoutInstance& instance) {
    LayoutDecodeResult res;
    if (c.genes.empty()) return res;

    std::size_t consecutive_discards = 0;
    std::size_t total = c.genes.size();
    for (std::size_t k = 0; k < 2 * total && !res.filled; ++k) {
        bool in_wrap = k >= total;
        const Gene& g = c.genes[k % total];
        ObjectType type = object_type_from_name(g.type_id);
        double w_pos = g.values[0];
        double alpha = g.values.size() > 1 ? g.values[1] : 0.0;

        Placement pl;
        if (detail::try_place(instance, type, w_pos, alpha, res.placements, &pl)) {
            pl.placed_during_wrap = in_wrap;
            res.placements.push_back(std::move(pl));
            if (in_wrap) ++res.wrap_placements;
            consecutive_discards = 0;
        } else {
            ++res.discarded;
            if (++consecutive_discards >= 3) {
                if (!detail::smallest_fits(instance, res.placements)) {
                    res.filled = true;
                    break;
                }
                consecutive_discards = 0;
            }
        }
        if (k + 1 == total && !res.filled) res.wrapped = true;
    }
    return res;
}

struct LayoutCriteria {
    double unused_area = 0.0;
    double balance_violation = 0.0;
    std::map<ObjectType, std::size_t> counts;
};

inline LayoutCriteria layout_criteria(const std::vector<Placement>& placements,
                                      const LayoutInstance& instance) {
    LayoutCriteria out;
    double used = 0.0;
    for (ObjectType t : layout_object_types()) out.counts[t] = 0;
    for (const auto& p : placements) {
        used += object_area(instance, p.type);
        out.counts[p.type] += 1;
    }
    out.unused_area = instance.width * instance.length - used;

    std::size_t max_c = 0, min_c = placements.empty() ? 0 : SIZE_MAX;
    for (const auto& [t, n] : out.counts) {
        max_c = std::max(max_c, n);
        min_c = std::min(min_c, n);
    }
    if (placements.empty()) min_c = 0;
    double spread = static_cast<double>(max_c - min_c) /
                    static_cast<double>(std::max<std::size_t>(min_c, 1));
    out.balance_violation = std::max(0.0, spread - instance.balance_tolerance);
    return out;
}

/// Spread computed directly from per-type counts (balance boundary checks).
inline double layout_balance_violation(const std::vector<std::size_t>& counts,
                                       double tolerance = 0.10) {
    if (counts.empty()) return 0.0;
    std::size_t max_c = *std::max_element(counts.begin(), counts.end());
    std::size_t min_c = *std::min_element(counts.begin(), counts.end());
    double spread = static_cast<double>(max_c - min_c) /
                    static_cast<double>(std::max<std::size_t>(min_c, 1));
    return std::max(0.0, spread - tolerance);
}

// --- independent checks for the acceptance suite ---

inline bool layout_verify(const std::vector<Placement>& placements,
                          const LayoutInstance& instance, std::string* why = nullptr) {
    for (std::size_t i = 0; i < placements.size(); ++i) {
        for (const auto& v : placements[i].outline)
            if (v.x < -1e-6 || v.x > instance.length + 1e-6 || v.y < -1e-6 ||
                v.y > instance.width + 1e-6) {
                if (why) *why = "containment violation at placement " + std::to_string(i);
                return false;
            }
        for (std::size_t j = i + 1; j < placements.size(); ++j)
            if (polygons_overlap(placements[i].outline, placements[j].outline, 1e-6)) {
                if (why) *why = "overlap between " + std::to_string(i) + " and " +
                                std::to_string(j);
                return false;
            }
    }
    return true;
}

/// True iff the placement is flush: translated left by eps_contact it would
/// overlap a neighbour or leave the surface.
inline bool layout_left_shift_minimal(const std::vector<Placement>& placements,
                                      std::size_t index, const LayoutInstance& instance) {
    double eps = 1e-6 * instance.length;
    Polygon shifted = translate_polygon(placements[index].outline, -eps, 0.0);
    Bounds b = polygon_bounds(shifted);
    if (b.min_x < 0.0) return true;
    for (std::size_t j = 0; j < placements.size(); ++j)
        if (j != index && polygons_overlap(shifted, placements[j].outline)) return true;
    return false;
}

// --- exports ---

inline void layout_export_csv(const std::vector<Placement>& placements, std::ostream& os) {
    os << "type,x,y,alpha\n";
    for (const auto& p : placements)
        os << object_type_name(p.type) << "," << p.l_pos << "," << p.w_pos << "," << p.rotation
           << "\n";
}

inline void layout_export_svg(const std::vector<Placement>& placements,
                              const LayoutInstance& instance, std::ostream& os) {
    double scale = 20.0;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << instance.length * scale
       << "' height='" << instance.width * scale << "' viewBox='0 0 " << instance.length << " "
       << instance.width << "'>\n";
    os << "<rect x='0' y='0' width='" << instance.length << "' height='" << instance.width
       << "' fill='none' stroke='black' stroke-width='0.05'/>\n";
    const char* colors[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f"};
    for (const auto& p : placements) {
        os << "<polygon points='";
        for (const auto& v : p.outline) os << v.x << "," << (instance.width - v.y) << " ";
        os << "' fill='" << colors[static_cast<int>(p.type)]
           << "' fill-opacity='0.7' stroke='black' stroke-width='0.02'/>\n";
    }
    os << "</svg>\n";
}

// --- problem binding ---

inline FitnessSpec layout_fitness_spec(const LayoutInstance& instance) {
    FitnessSpec spec;
    Criterion area;
    area.id = "unused_area";
    area.name = "unused area";
    area.direction = Direction::minimize;
    area.breakpoints = {{0.0, 1.0}, {instance.width * instance.length, 0.0}};
    area.weight = 0.8;
    spec.criteria.push_back(area);

    Criterion balance;
    balance.id = "balance_violation";
    balance.name = "type balance violation";
    balance.direction = Direction::minimize;
    balance.breakpoints = {{0.0, 1.0}, {1.0, 0.0}};
    balance.weight = 0.2;
    spec.criteria.push_back(balance);

    PenaltySpec wrap;
    wrap.id = "wrap_devaluation";
    wrap.violation_measure = "fraction of objects placed after wrapping to the chromosome start";
    wrap.mapping = {{0.0, 1.0}, {1.0, 0.5}};
    spec.penalties.push_back(wrap);
    return spec;
}

inline ProblemDefinition make_layout_problem(const LayoutInstance& instance) {
    ProblemDefinition p;
    p.name = "layout";
    p.registry = layout_registry(instance);
    p.length_policy = layout_length_policy(instance);
    p.fitness = layout_fitness_spec(instance);
    p.evaluate = [instance](const Chromosome& c) {
        LayoutDecodeResult dec = layout_decode(c, instance);
        LayoutCriteria cr = layout_criteria(dec.placements, instance);
        double wrap_fraction =
            dec.placements.empty()
                ? 0.0
                : static_cast<double>(dec.wrap_placements) /
                      static_cast<double>(dec.placements.size());
        return Evaluation{{cr.unused_area, cr.balance_violation}, {wrap_fraction}};
    };
    return p;
}

}  // namespace evokit

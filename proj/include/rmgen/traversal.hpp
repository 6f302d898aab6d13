#ifndef RMGEN_TRAVERSAL_HPP
#define RMGEN_TRAVERSAL_HPP

#include "rmgen/grid.hpp"

#include <cmath>
#include <limits>

namespace rmgen {

/// Spans shorter than this (horizontal meters) are contacts, not crossings.
inline constexpr double kMinSpan = 1e-9;

/// Visits every cell whose interior the horizontal segment a -> b passes
/// through, in order from a to b. The visitor receives (row, col, t0, t1)
/// with 0 <= t0 < t1 <= 1 the parameter interval inside the cell, and
/// returns false to stop early. Grid-line crossings are computed from the
/// line index (no accumulated stepping), and each cell is identified from
/// the span midpoint, so corner hits resolve without special cases.
template <typename Visitor>
void traverse_cells(const GridGeometry& g, const Vec2& a, const Vec2& b, Visitor&& visit) {
    const double res = g.resolution;
    const Vec2 d = b - a;
    const double length = d.norm();
    if (length < kMinSpan) {
        visit(g.row_of(a.y()), g.col_of(a.x()), 0.0, 1.0);
        return;
    }

    constexpr double kNone = std::numeric_limits<double>::infinity();

    // Next crossing with lines x = kx*res and y = ky*res, strictly inside (0, 1).
    long kx = 0, ky = 0;
    int sx = 0, sy = 0;
    if (d.x() > 0.0) {
        sx = 1;
        kx = static_cast<long>(std::floor(a.x() / res)) + 1;
    } else if (d.x() < 0.0) {
        sx = -1;
        kx = static_cast<long>(std::ceil(a.x() / res)) - 1;
    }
    if (d.y() > 0.0) {
        sy = 1;
        ky = static_cast<long>(std::floor(a.y() / res)) + 1;
    } else if (d.y() < 0.0) {
        sy = -1;
        ky = static_cast<long>(std::ceil(a.y() / res)) - 1;
    }
    auto crossing_x = [&]() -> double {
        if (sx == 0) return kNone;
        const double t = (kx * res - a.x()) / d.x();
        return t < 1.0 ? t : kNone;
    };
    auto crossing_y = [&]() -> double {
        if (sy == 0) return kNone;
        const double t = (ky * res - a.y()) / d.y();
        return t < 1.0 ? t : kNone;
    };

    double tx = crossing_x();
    double ty = crossing_y();
    double t_prev = 0.0;
    auto emit = [&](double t_next) -> bool {
        if ((t_next - t_prev) * length < kMinSpan) return true;
        const double tm = 0.5 * (t_prev + t_next);
        const Vec2 m = a + tm * d;
        const bool go_on = visit(g.row_of(m.y()), g.col_of(m.x()), t_prev, t_next);
        t_prev = t_next;
        return go_on;
    };

    while (tx != kNone || ty != kNone) {
        double t_next;
        if (tx <= ty) {
            t_next = tx;
            kx += sx;
            tx = crossing_x();
        } else {
            t_next = ty;
            ky += sy;
            ty = crossing_y();
        }
        if (t_next <= t_prev) continue;
        if (!emit(t_next)) return;
    }
    emit(1.0);
}

/// True when the straight 3D segment p -> q stays on or above every building
/// column it crosses. Touching a column top counts as unobstructed.
template <typename HeightAt>
bool segment_clear(const GridGeometry& g, const Vec3& p, const Vec3& q, HeightAt&& height_at) {
    bool clear = true;
    traverse_cells(g, p.head<2>(), q.head<2>(), [&](int row, int col, double t0, double t1) {
        const double h = height_at(row, col);
        if (h <= 0.0) return true;
        const double zmin = std::min(std::lerp(p.z(), q.z(), t0), std::lerp(p.z(), q.z(), t1));
        if (zmin < h) {
            clear = false;
            return false;
        }
        return true;
    });
    return clear;
}

}  // namespace rmgen

#endif  // RMGEN_TRAVERSAL_HPP

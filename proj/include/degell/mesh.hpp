#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "degell/util.hpp"

namespace degell {

/// Graded one-dimensional grid in the radius: r_i = r_min + (r_max-r_min)(i/M)^g.
/// Grading g > 1 concentrates cells toward r_min, where singular sources live.
struct RadialMesh {
    std::vector<double> nodes;
    double grading = 1.0;
    double inner = 0.0;
    double outer = 1.0;

    int cell_count() const { return static_cast<int>(nodes.size()) - 1; }
    int node_count() const { return static_cast<int>(nodes.size()); }
    double h(int cell) const { return nodes[cell + 1] - nodes[cell]; }
    bool starts_at_origin() const { return nodes.front() == 0.0; }

    /// Mean cell width; used for discretization allowances in checks.
    double mean_h() const { return (outer - inner) / cell_count(); }

    bool operator==(const RadialMesh&) const = default;
};

inline RadialMesh make_graded_mesh(double r_min, double r_max, int M, double grading) {
    if (M < 1) throw std::invalid_argument("make_graded_mesh: need at least 1 cell");
    if (!(grading >= 1.0)) throw std::invalid_argument("make_graded_mesh: grading must be >= 1");
    if (!(r_min >= 0.0 && r_min < r_max))
        throw std::invalid_argument("make_graded_mesh: need 0 <= r_min < r_max");
    RadialMesh mesh;
    mesh.grading = grading;
    mesh.inner = r_min;
    mesh.outer = r_max;
    mesh.nodes.resize(static_cast<std::size_t>(M) + 1);
    for (int i = 0; i <= M; ++i)
        mesh.nodes[i] = r_min + (r_max - r_min) * std::pow(static_cast<double>(i) / M, grading);
    mesh.nodes.front() = r_min;
    mesh.nodes.back() = r_max;
    for (int i = 0; i < M; ++i)
        if (!(mesh.nodes[i] < mesh.nodes[i + 1]))
            throw std::invalid_argument("make_graded_mesh: grading collapsed adjacent nodes");
    return mesh;
}

/// Piecewise-linear scalar field on a RadialMesh. Value semantics: the field
/// carries its own copy of the (small) mesh.
struct NodalField {
    RadialMesh mesh;
    std::vector<double> values;

    NodalField() = default;
    NodalField(RadialMesh m, std::vector<double> v) : mesh(std::move(m)), values(std::move(v)) {
        if (values.size() != mesh.nodes.size())
            throw std::invalid_argument("NodalField: value count must match node count");
    }
    static NodalField zeros(const RadialMesh& m) {
        return NodalField(m, std::vector<double>(m.nodes.size(), 0.0));
    }

    double slope(int cell) const { return (values[cell + 1] - values[cell]) / mesh.h(cell); }

    /// Linear interpolation inside the covered interval.
    double operator()(double r) const {
        const auto& rs = mesh.nodes;
        if (r <= rs.front()) return values.front();
        if (r >= rs.back()) return values.back();
        const auto it = std::upper_bound(rs.begin(), rs.end(), r);
        const std::size_t cell = static_cast<std::size_t>(it - rs.begin()) - 1;
        const double t = (r - rs[cell]) / (rs[cell + 1] - rs[cell]);
        return (1.0 - t) * values[cell] + t * values[cell + 1];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

/// Sub-intervals of a cell split by the level |u| = k of a linear function.
/// `inside` marks the pieces where |u| >= k. At most three pieces result.
struct LevelPiece {
    double lo, hi;
    bool inside;  // |u| >= k on this piece
};

inline int split_cell_at_level(double a, double b, double ua, double ub, double k,
                               LevelPiece out[3]) {
    if (!(k >= 0.0)) throw std::domain_error("split_cell_at_level: k must be >= 0");
    // Collect crossings of u = +k and u = -k inside (a, b).
    double cuts[2];
    int ncuts = 0;
    const double du = ub - ua;
    if (du != 0.0) {
        for (double level : {k, -k}) {
            const double t = (level - ua) / du;
            if (t > 0.0 && t < 1.0) cuts[ncuts++] = a + t * (b - a);
            if (k == 0.0) break;  // +0 and -0 coincide
        }
    }
    if (ncuts == 2 && cuts[0] > cuts[1]) std::swap(cuts[0], cuts[1]);
    double pts[4] = {a, 0, 0, 0};
    int npts = 1;
    for (int i = 0; i < ncuts; ++i) pts[npts++] = cuts[i];
    pts[npts++] = b;
    int n = 0;
    for (int i = 0; i + 1 < npts; ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        if (!(hi > lo)) continue;
        const double rm = 0.5 * (lo + hi);
        const double um = ua + du * (rm - a) / (b - a);
        out[n++] = {lo, hi, std::abs(um) >= k};
    }
    return n;
}

}  // namespace degell

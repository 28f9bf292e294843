#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>

#include "affmap/core/rng.hpp"
#include "affmap/percept/cloud.hpp"
#include "affmap/sim/scene.hpp"

namespace affmap::percept {

namespace detail {

struct RenderContext {
    PointCloud* cloud = nullptr;
    const sim::NoiseParams* noise = nullptr;
    std::mt19937_64* gen = nullptr;
    double spacing = 0.01;

    void emit(const Eigen::Vector3d& pos, const Eigen::Vector3d& color,
              const Eigen::Vector3d& normal, std::int32_t src) {
        PointSample p;
        p.position = pos;
        p.color = color;
        p.normal = normal;
        if (noise->sigma_depth > 0.0) {
            p.position.x() += noise->sigma_depth * normal01(*gen);
            p.position.y() += noise->sigma_depth * normal01(*gen);
            p.position.z() += noise->sigma_depth * normal01(*gen);
        }
        if (noise->sigma_color > 0.0) {
            p.color.x() += noise->sigma_color * normal01(*gen);
            p.color.y() += noise->sigma_color * normal01(*gen);
            p.color.z() += noise->sigma_color * normal01(*gen);
            p.color.x() = std::clamp(p.color.x(), 0.0, 100.0);
            p.color.y() = std::clamp(p.color.y(), -128.0, 127.0);
            p.color.z() = std::clamp(p.color.z(), -128.0, 127.0);
        }
        cloud->add(p, src);
    }

    /// Rectangular patch: origin + s*edge_a + t*edge_b, sampled at cell
    /// centers of a grid whose pitch matches the configured density.
    /// keep(pos) can mask out sub-regions (object footprints, button cutouts).
    template <typename Keep>
    void rect(const Eigen::Vector3d& origin, const Eigen::Vector3d& edge_a,
              const Eigen::Vector3d& edge_b, const Eigen::Vector3d& normal,
              const Eigen::Vector3d& color, std::int32_t src, Keep&& keep) {
        const double la = edge_a.norm(), lb = edge_b.norm();
        if (la < 1e-12 || lb < 1e-12) return;  // degenerate face
        const int na = std::max(1, static_cast<int>(std::lround(la / spacing)));
        const int nb = std::max(1, static_cast<int>(std::lround(lb / spacing)));
        for (int i = 0; i < na; ++i) {
            for (int j = 0; j < nb; ++j) {
                const Eigen::Vector3d pos = origin + ((i + 0.5) / na) * edge_a + ((j + 0.5) / nb) * edge_b;
                if (!keep(pos)) continue;
                emit(pos, color, normal, src);
            }
        }
    }

    void rect(const Eigen::Vector3d& origin, const Eigen::Vector3d& edge_a,
              const Eigen::Vector3d& edge_b, const Eigen::Vector3d& normal,
              const Eigen::Vector3d& color, std::int32_t src) {
        rect(origin, edge_a, edge_b, normal, color, src, [](const Eigen::Vector3d&) { return true; });
    }

    /// Lateral surface of a vertical cylinder.
    void cylinder_side(const Eigen::Vector3d& base_center, double radius, double height,
                       const Eigen::Vector3d& color, std::int32_t src) {
        const int n_ang = std::max(3, static_cast<int>(std::lround(2.0 * M_PI * radius / spacing)));
        const int n_z = std::max(1, static_cast<int>(std::lround(height / spacing)));
        for (int a = 0; a < n_ang; ++a) {
            const double ang = 2.0 * M_PI * (a + 0.5) / n_ang;
            const Eigen::Vector3d radial(std::cos(ang), std::sin(ang), 0.0);
            for (int k = 0; k < n_z; ++k) {
                const double z = base_center.z() + (k + 0.5) / n_z * height;
                const Eigen::Vector3d pos = base_center + radius * radial + Eigen::Vector3d(0, 0, z - base_center.z());
                emit(pos, color, radial, src);
            }
        }
    }

    /// Horizontal disc facing +normal_dir (expected unit axis-aligned).
    void disc(const Eigen::Vector3d& center, double radius, const Eigen::Vector3d& normal,
              const Eigen::Vector3d& color, std::int32_t src) {
        // Orthonormal in-plane axes for an axis-aligned normal.
        Eigen::Vector3d a = std::abs(normal.z()) > 0.5 ? Eigen::Vector3d::UnitX()
                                                       : normal.cross(Eigen::Vector3d::UnitZ()).normalized();
        Eigen::Vector3d b = normal.cross(a);
        const int n = std::max(1, static_cast<int>(std::lround(2.0 * radius / spacing)));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double s = (i + 0.5) / n * 2.0 * radius - radius;
                const double t = (j + 0.5) / n * 2.0 * radius - radius;
                if (s * s + t * t > radius * radius) continue;
                emit(center + s * a + t * b, color, normal, src);
            }
        }
    }
};

inline bool inside_footprint(const sim::Scene& scene, double x, double y) {
    for (const auto& o : scene.objects) {
        if (o.shape == sim::ShapeKind::box) {
            if (std::abs(x - o.position.x()) <= 0.5 * o.size.x() &&
                std::abs(y - o.position.y()) <= 0.5 * o.size.y()) {
                return true;
            }
        } else {
            if (std::hypot(x - o.position.x(), y - o.position.y()) <= o.radius()) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Synthetic sensor: samples every visible surface of the scene on a regular
/// grid matched to scene.render_density, then perturbs positions and colors
/// with fresh Gaussian noise. The noiseless grid is identical across frames,
/// so zero noise yields bit-identical clouds.
inline PointCloud render(const sim::Scene& scene, const sim::NoiseParams& noise,
                         std::mt19937_64& gen) {
    if (scene.support.isEmpty()) throw std::invalid_argument("render: empty scene");
    PointCloud cloud;
    detail::RenderContext ctx;
    ctx.cloud = &cloud;
    ctx.noise = &noise;
    ctx.gen = &gen;
    ctx.spacing = 1.0 / std::sqrt(scene.render_density);

    // Support plane, with object footprints cut out.
    {
        const Eigen::Vector2d lo = scene.support.min();
        const Eigen::Vector2d sz = scene.support.sizes();
        ctx.rect({lo.x(), lo.y(), 0.0}, {sz.x(), 0, 0}, {0, sz.y(), 0}, Eigen::Vector3d::UnitZ(),
                 scene.support_color, sim::kSourceSupport,
                 [&](const Eigen::Vector3d& p) { return !detail::inside_footprint(scene, p.x(), p.y()); });
    }

    // Back plane, with button housings cut out.
    {
        const Eigen::Vector2d lo = scene.support.min();
        const Eigen::Vector2d sz = scene.support.sizes();
        ctx.rect({lo.x(), scene.back_y, 0.0}, {sz.x(), 0, 0}, {0, 0, scene.back_height},
                 -Eigen::Vector3d::UnitY(), scene.back_color, sim::kSourceBack,
                 [&](const Eigen::Vector3d& p) {
                     for (const auto& b : scene.buttons) {
                         if (std::abs(p.x() - b.center.x()) <= b.housing_half &&
                             std::abs(p.z() - b.center.y()) <= b.housing_half) {
                             return false;
                         }
                     }
                     return true;
                 });
    }

    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& o = scene.objects[i];
        const std::int32_t src = sim::source_object(i);
        if (o.shape == sim::ShapeKind::box) {
            const Eigen::Vector3d half = 0.5 * o.size;
            const Eigen::Vector3d base(o.position.x() - half.x(), o.position.y() - half.y(), 0.0);
            const double h = o.size.z();
            // top
            ctx.rect(base + Eigen::Vector3d(0, 0, h), {o.size.x(), 0, 0}, {0, o.size.y(), 0},
                     Eigen::Vector3d::UnitZ(), o.color_lab, src);
            // four sides
            ctx.rect(base, {o.size.x(), 0, 0}, {0, 0, h}, -Eigen::Vector3d::UnitY(), o.color_lab, src);
            ctx.rect(base + Eigen::Vector3d(0, o.size.y(), 0), {o.size.x(), 0, 0}, {0, 0, h},
                     Eigen::Vector3d::UnitY(), o.color_lab, src);
            ctx.rect(base, {0, o.size.y(), 0}, {0, 0, h}, -Eigen::Vector3d::UnitX(), o.color_lab, src);
            ctx.rect(base + Eigen::Vector3d(o.size.x(), 0, 0), {0, o.size.y(), 0}, {0, 0, h},
                     Eigen::Vector3d::UnitX(), o.color_lab, src);
        } else {
            const Eigen::Vector3d base(o.position.x(), o.position.y(), 0.0);
            ctx.disc(base + Eigen::Vector3d(0, 0, o.size.z()), o.radius(), Eigen::Vector3d::UnitZ(),
                     o.color_lab, src);
            ctx.cylinder_side(base, o.radius(), o.size.z(), o.color_lab, src);
        }
    }

    for (std::size_t j = 0; j < scene.buttons.size(); ++j) {
        const auto& b = scene.buttons[j];
        const std::int32_t src_housing = sim::source_button_housing(j);
        const std::int32_t src_disc = sim::source_button_disc(j);
        const double face_y = scene.back_y - b.housing_depth;
        const double disc_y = scene.button_disc_face_y(b);
        const Eigen::Vector3d fwd = -Eigen::Vector3d::UnitY();

        // Housing front face (disc cutout), then thin sides.
        ctx.rect({b.center.x() - b.housing_half, face_y, b.center.y() - b.housing_half},
                 {2.0 * b.housing_half, 0, 0}, {0, 0, 2.0 * b.housing_half}, fwd, b.housing_color,
                 src_housing, [&](const Eigen::Vector3d& p) {
                     return std::hypot(p.x() - b.center.x(), p.z() - b.center.y()) > b.active_radius;
                 });
        const Eigen::Vector3d corner(b.center.x() - b.housing_half, face_y, b.center.y() - b.housing_half);
        const double side = 2.0 * b.housing_half;
        ctx.rect(corner, {side, 0, 0}, {0, b.housing_depth, 0}, -Eigen::Vector3d::UnitZ(),
                 b.housing_color, src_housing);
        ctx.rect(corner + Eigen::Vector3d(0, 0, side), {side, 0, 0}, {0, b.housing_depth, 0},
                 Eigen::Vector3d::UnitZ(), b.housing_color, src_housing);
        ctx.rect(corner, {0, b.housing_depth, 0}, {0, 0, side}, -Eigen::Vector3d::UnitX(),
                 b.housing_color, src_housing);
        ctx.rect(corner + Eigen::Vector3d(side, 0, 0), {0, b.housing_depth, 0}, {0, 0, side},
                 Eigen::Vector3d::UnitX(), b.housing_color, src_housing);

        // Raised active disc: face plus rim.
        ctx.disc({b.center.x(), disc_y, b.center.y()}, b.active_radius, fwd, b.disc_color, src_disc);
        {
            const int n_ang = std::max(3, static_cast<int>(std::lround(2.0 * M_PI * b.active_radius / ctx.spacing)));
            for (int a = 0; a < n_ang; ++a) {
                const double ang = 2.0 * M_PI * (a + 0.5) / n_ang;
                const Eigen::Vector3d radial(std::cos(ang), 0.0, std::sin(ang));
                const Eigen::Vector3d pos(b.center.x() + b.active_radius * radial.x(),
                                          disc_y + 0.5 * b.disc_depth,
                                          b.center.y() + b.active_radius * radial.z());
                ctx.emit(pos, b.disc_color, radial, src_disc);
            }
        }
    }

    return cloud;
}

}  // namespace affmap::percept

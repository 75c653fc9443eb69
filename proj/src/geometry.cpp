#include "aos/geometry.hpp"

namespace aos {

std::optional<Pixel> project(const CameraPose& pose, const Intrinsics& intr, const Vec3& p) {
    return project_point(WorldToCamera::from(pose), intr, p);
}

Ray pixel_ray(const CameraPose& pose, const Intrinsics& intr, double u, double v) {
    const Vec3 dir_cam{(u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0};
    return Ray{pose.position, normalized(pose.rotation.rotate(dir_cam))};
}

std::optional<RayHit> intersect_ray_plane(const Vec3& origin, const Vec3& direction, const Plane& plane) {
    const double denom = dot(direction, plane.normal);
    if (std::abs(denom) < 1e-9) return std::nullopt;
    const double t = dot(plane.point - origin, plane.normal) / denom;
    if (t <= 0.0) return std::nullopt;
    return RayHit{origin + t * direction, t};
}

Plane sfp_plane(const SfpParams& params, const Vec3& sap_origin) {
    const Vec3 point = sap_origin + params.d() * Vec3{0.0, 0.0, -1.0};
    const double st = std::sin(params.theta());
    const double ct = std::cos(params.theta());
    const Vec3 normal{st * std::cos(params.phi()), st * std::sin(params.phi()), ct};
    return Plane(point, normal);
}

namespace {

// Rodrigues rotation of v by angle about a unit axis.
Vec3 rotate_about_axis(const Vec3& v, const Vec3& axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return c * v + s * cross(axis, v) + (1.0 - c) * dot(axis, v) * axis;
}

}  // namespace

PlaneAxes sfp_plane_axes(const SfpParams& params) {
    // Minimal rotation taking world +z onto the plane normal: angle theta
    // about the horizontal axis (-sin phi, cos phi, 0).
    const Vec3 axis{-std::sin(params.phi()), std::cos(params.phi()), 0.0};
    return PlaneAxes{rotate_about_axis({1.0, 0.0, 0.0}, axis, params.theta()),
                     rotate_about_axis({0.0, 1.0, 0.0}, axis, params.theta())};
}

}  // namespace aos

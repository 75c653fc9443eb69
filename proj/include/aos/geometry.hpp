#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

// Coordinate conventions used throughout:
//   world frame : right-handed, x east, y north, z up, ground plane at z = 0
//   camera frame: +z optical axis toward the scene, +x right, +y down
// A nadir camera therefore maps camera x -> world +x, camera y -> world -y,
// camera z -> world -z.

namespace aos {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(const Vec3& v, double s) { return s * v; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (n < 1e-300) throw std::invalid_argument("normalized: zero-length vector");
    return {v.x / n, v.y / n, v.z / n};
}

// Row-major 3x3 matrix; only what the projection path needs.
struct Mat3 {
    double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 transposed() const {
        return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }
};

/// Unit quaternion giving the camera-to-world rotation.
class Rotation {
  public:
    Rotation() = default;

    // Components must already be unit within 1e-9; use renormalized() for
    // slightly off inputs (e.g. parsed from text).
    Rotation(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        if (std::abs(n - 1.0) > 1e-9)
            throw std::invalid_argument("Rotation: quaternion not unit length");
    }

    static Rotation renormalized(double w, double x, double y, double z) {
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        if (n < 1e-12) throw std::invalid_argument("Rotation: zero quaternion");
        Rotation r;
        r.w_ = w / n;
        r.x_ = x / n;
        r.y_ = y / n;
        r.z_ = z / n;
        return r;
    }

    static Rotation from_axis_angle(const Vec3& axis, double angle) {
        const Vec3 a = normalized(axis);
        const double h = 0.5 * angle;
        const double s = std::sin(h);
        return renormalized(std::cos(h), s * a.x, s * a.y, s * a.z);
    }

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    /// Camera-to-world direction cosine matrix.
    Mat3 to_matrix() const {
        const double w = w_, x = x_, y = y_, z = z_;
        return Mat3{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
                     2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
                     2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}};
    }

    Vec3 rotate(const Vec3& v) const { return to_matrix().apply(v); }
    Vec3 rotate_inverse(const Vec3& v) const { return to_matrix().transposed().apply(v); }

  private:
    double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

struct CameraPose {
    Vec3 position;
    Rotation rotation;  // camera-to-world

    /// Straight-down pose: quaternion (0, 1, 0, 0), i.e. a half turn about x.
    static CameraPose nadir(const Vec3& position) {
        return CameraPose{position, Rotation(0.0, 1.0, 0.0, 0.0)};
    }
};

struct Intrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    Intrinsics() = default;
    Intrinsics(double fx_, double fy_, double cx_, double cy_, int width_, int height_)
        : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(width_), height(height_) {
        if (fx <= 0.0 || fy <= 0.0) throw std::invalid_argument("Intrinsics: focal length must be positive");
        if (width <= 0 || height <= 0) throw std::invalid_argument("Intrinsics: image dims must be positive");
        if (cx < 0.0 || cx >= width || cy < 0.0 || cy >= height)
            throw std::invalid_argument("Intrinsics: principal point outside image");
    }
};

/// Synthetic focal plane parameters relative to the aperture plane origin:
/// distance d (meters, along world -z) and tilt (theta from vertical, phi
/// azimuth measured from world +x).
class SfpParams {
  public:
    static constexpr double kDefaultThetaBound = kPi / 4.0;

    SfpParams(double d, double theta, double phi, double theta_bound = kDefaultThetaBound)
        : d_(d), theta_(theta), phi_(wrap_angle(phi)) {
        if (!(d > 0.0)) throw std::invalid_argument("SfpParams: d must be positive");
        if (!(std::abs(theta) <= theta_bound + 1e-12))
            throw std::invalid_argument("SfpParams: |theta| exceeds tilt bound");
    }

    double d() const { return d_; }
    double theta() const { return theta_; }
    double phi() const { return phi_; }

    /// Wraps into [-pi, pi).
    static double wrap_angle(double a) {
        double r = std::remainder(a, 2.0 * kPi);  // (-pi, pi]
        if (r == kPi) r = -kPi;
        return r;
    }

  private:
    double d_;
    double theta_;
    double phi_;
};

struct Plane {
    Vec3 point;
    Vec3 normal;  // unit

    Plane(const Vec3& point_, const Vec3& normal_) : point(point_), normal(normalized(normal_)) {}
};

struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit
};

struct RayHit {
    Vec3 point;
    double t = 0.0;
};

// Points closer than this to the camera plane are treated as behind it.
inline constexpr double kMinCameraDepth = 1e-6;

/// Precomputed world-to-camera transform. The synthetic-aperture integrator
/// projects millions of points per image set, so the quaternion is expanded
/// to a matrix once per camera; project() goes through the same code path,
/// which keeps the two routes bit-identical.
struct WorldToCamera {
    Mat3 r;  // world-to-camera rotation
    Vec3 t;  // camera position in world

    static WorldToCamera from(const CameraPose& pose) {
        return WorldToCamera{pose.rotation.to_matrix().transposed(), pose.position};
    }

    Vec3 apply(const Vec3& p) const {
        const Vec3 d{p.x - t.x, p.y - t.y, p.z - t.z};
        return r.apply(d);
    }
};

inline std::optional<Pixel> project_point(const WorldToCamera& wc, const Intrinsics& intr, const Vec3& p) {
    const Vec3 c = wc.apply(p);
    if (c.z <= kMinCameraDepth) return std::nullopt;
    const double inv_z = 1.0 / c.z;
    return Pixel{intr.fx * c.x * inv_z + intr.cx, intr.fy * c.y * inv_z + intr.cy};
}

/// Pinhole projection of a world point; nullopt when the point lies at or
/// behind the camera plane. The result may fall outside the image bounds.
std::optional<Pixel> project(const CameraPose& pose, const Intrinsics& intr, const Vec3& p);

/// Ray through pixel (u, v); inverse of project up to normalization.
Ray pixel_ray(const CameraPose& pose, const Intrinsics& intr, double u, double v);

/// Forward intersection of a unit-direction ray with a plane. nullopt for
/// near-parallel rays (|dir . normal| < 1e-9) and for hits behind the origin.
std::optional<RayHit> intersect_ray_plane(const Vec3& origin, const Vec3& direction, const Plane& plane);

/// The synthetic focal plane for the given parameters: anchored d meters
/// below the aperture origin, normal (sin t cos p, sin t sin p, cos t).
Plane sfp_plane(const SfpParams& params, const Vec3& sap_origin);

/// In-plane axes for laying out a grid on the focal plane. They are the
/// world x/y axes rotated by theta about the horizontal axis perpendicular
/// to the tilt azimuth, so theta = 0 yields exactly (1,0,0) and (0,1,0) and
/// the frame varies continuously with the tilt.
struct PlaneAxes {
    Vec3 e1;
    Vec3 e2;
};
PlaneAxes sfp_plane_axes(const SfpParams& params);

}  // namespace aos

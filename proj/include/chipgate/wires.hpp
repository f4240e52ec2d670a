#ifndef CHIPGATE_WIRES_HPP
#define CHIPGATE_WIRES_HPP

#include <Eigen/Dense>
#include <vector>

#include "chipgate/constants.hpp"

namespace chipgate {

using Vec3 = Eigen::Vector3d;

/// Straight conductor of rectangular cross section carrying a uniform DC
/// current density. The cross section spans `width` along cross(axis, up)
/// and `thickness` along `up` (chip normal by default).
struct WireSegment {
    Vec3 start = Vec3::Zero();
    Vec3 end = Vec3::Zero();
    double width = 0.0;      // m
    double thickness = 0.0;  // m
    double current = 0.0;    // A
    Vec3 up = Vec3(0, 0, 1);

    void validate() const;
};

/// Homogeneous bias field; time dependence enters only through the
/// compensation ramps applied by the caller.
struct BiasField {
    double Bx = 0.0, By = 0.0, Bz = 0.0;  // T
    Vec3 vec() const { return {Bx, By, Bz}; }
};

/// Field of a thin finite straight filament from a to b carrying I.
Vec3 filament_field(const Vec3& a, const Vec3& b, double current, const Vec3& point,
                    const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Magnetostatic field of the finite rectangular conductor, uniform current
/// density integrated over the cross section (Gauss-Legendre filaments).
/// Points inside the conductor are evaluated by the symmetric limit and
/// flagged through `inside` when provided.
Vec3 field_of_rectangular_wire(const WireSegment& seg, const Vec3& point,
                               bool* inside = nullptr,
                               const PhysicalConstants& pc = PhysicalConstants::rb87());

/// Vector sum over all wires plus the bias.
Vec3 total_static_field(const std::vector<WireSegment>& wires, const BiasField& bias,
                        const Vec3& point,
                        const PhysicalConstants& pc = PhysicalConstants::rb87());

}  // namespace chipgate

#endif

#include "chipgate/wires.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace chipgate {

void WireSegment::validate() const {
    if (!(width > 0.0) || !(thickness > 0.0))
        throw std::invalid_argument("wire: width and thickness must be positive");
    if (!((end - start).norm() > 0.0)) throw std::invalid_argument("wire: zero length");
    if (!std::isfinite(current)) throw std::invalid_argument("wire: non-finite current");
}

Vec3 filament_field(const Vec3& a, const Vec3& b, double current, const Vec3& point,
                    const PhysicalConstants& pc) {
    const Vec3 axis = (b - a).normalized();
    const Vec3 d = point - a;
    const Vec3 e = point - b;
    const Vec3 perp = axis.cross(d);
    const double rho2 = perp.squaredNorm();
    // on the filament axis the azimuthal field vanishes by symmetry
    const double scale2 = (b - a).squaredNorm();
    if (rho2 < 1e-28 * scale2) return Vec3::Zero();
    const double f = axis.dot(d) / d.norm() - axis.dot(e) / e.norm();
    return (pc.mu_0 * current / (4.0 * pi)) * f / rho2 * perp;
}

namespace {

struct GaussRule {
    std::array<double, 8> x;  // nodes on (-1/2, 1/2)
    std::array<double, 8> w;  // weights summing to 1
    int n;
};

GaussRule gauss_rule(int n) {
    // Legendre nodes/weights mapped from [-1,1] to [-1/2,1/2]
    GaussRule r{};
    r.n = n;
    switch (n) {
        case 1:
            r.x = {0.0};
            r.w = {1.0};
            break;
        case 2:
            r.x = {-0.28867513459481287, 0.28867513459481287};
            r.w = {0.5, 0.5};
            break;
        case 4:
            r.x = {-0.43056815579702629, -0.16999052179242813, 0.16999052179242813,
                   0.43056815579702629};
            r.w = {0.17392742256872692, 0.32607257743127305, 0.32607257743127305,
                   0.17392742256872692};
            break;
        default:  // 8
            r.x = {-0.48014492824876812, -0.39833323870681336, -0.26276620495816449,
                   -0.09171732124782490, 0.09171732124782490, 0.26276620495816449,
                   0.39833323870681336, 0.48014492824876812};
            r.w = {0.05061426814518813, 0.11119051722668724, 0.15685332293894364,
                   0.18134189168918099, 0.18134189168918099, 0.15685332293894364,
                   0.11119051722668724, 0.05061426814518813};
            r.n = 8;
            break;
    }
    return r;
}

}  // namespace

Vec3 field_of_rectangular_wire(const WireSegment& seg, const Vec3& point, bool* inside,
                               const PhysicalConstants& pc) {
    seg.validate();
    const Vec3 axis = (seg.end - seg.start).normalized();
    Vec3 t_hat = seg.up - seg.up.dot(axis) * axis;
    if (t_hat.norm() < 1e-12) throw std::invalid_argument("wire: up direction parallel to axis");
    t_hat.normalize();
    const Vec3 w_hat = axis.cross(t_hat);

    // closest-approach geometry decides the quadrature order and inside flag
    const Vec3 rel = point - seg.start;
    const double s_ax = rel.dot(axis);
    const double u_w = rel.dot(w_hat);
    const double u_t = rel.dot(t_hat);
    const double len = (seg.end - seg.start).norm();
    const bool is_inside = (s_ax > 0 && s_ax < len && std::fabs(u_w) < 0.5 * seg.width &&
                            std::fabs(u_t) < 0.5 * seg.thickness);
    if (inside) *inside = is_inside;

    const double ext = std::max(seg.width, seg.thickness);
    const double dist = std::hypot(std::max(0.0, std::fabs(u_w) - 0.5 * seg.width),
                                   std::max(0.0, std::fabs(u_t) - 0.5 * seg.thickness));
    int order = 8;
    if (dist > 30.0 * ext)
        order = 2;
    else if (dist > 5.0 * ext)
        order = 4;

    const GaussRule g = gauss_rule(order);
    Vec3 field = Vec3::Zero();
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            const Vec3 off = g.x[i] * seg.width * w_hat + g.x[j] * seg.thickness * t_hat;
            field += g.w[i] * g.w[j] *
                     filament_field(seg.start + off, seg.end + off, seg.current, point, pc);
        }
    }
    return field;
}

Vec3 total_static_field(const std::vector<WireSegment>& wires, const BiasField& bias,
                        const Vec3& point, const PhysicalConstants& pc) {
    Vec3 field = bias.vec();
    for (const auto& w : wires) field += field_of_rectangular_wire(w, point, nullptr, pc);
    return field;
}

}  // namespace chipgate

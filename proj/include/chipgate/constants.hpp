#ifndef CHIPGATE_CONSTANTS_HPP
#define CHIPGATE_CONSTANTS_HPP

#include <numbers>
#include <stdexcept>

namespace chipgate {

/// Physical constants and atomic data, SI throughout. One table, full
/// published precision; nothing is hard-coded at a use site.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;      // J s
    double h = 6.62607015e-34;          // J s
    double mu_B = 9.2740100783e-24;     // J/T
    double mu_0 = 1.25663706212e-6;     // T m/A
    double k_B = 1.380649e-23;          // J/K
    double m_atom = 1.44316060e-25;     // kg, 87Rb
    double g_J = 2.00233113;            // electron Lande factor, 5S1/2
    double g_I = -0.0009951414;         // nuclear Lande factor (mu_B convention)
    double g_F1 = -0.5;                 // hyperfine Lande factor, F=1
    double g_F2 = +0.5;                 // hyperfine Lande factor, F=2
    // Scalar DC polarizability of the ground state, C m^2/V.
    // h * 0.0794 Hz/(V/cm)^2; configurable, the source text uses it unstated.
    double alpha_dc = 5.2615e-39;
    // Hyperfine splitting |1,0> -> |2,0>, rad/s (2*pi*6.834682610904 GHz).
    double omega_hfs = 2.0 * std::numbers::pi * 6.834682610904e9;

    static PhysicalConstants rb87() { return PhysicalConstants{}; }

    // Both qubit states must see the same static Zeeman shift: g_F2*(+1) = g_F1*(-1).
    void validate() const {
        if (g_F1 != -g_F2 || g_F2 * (+1.0) != g_F1 * (-1.0))
            throw std::invalid_argument("constants: qubit states have unequal Zeeman shifts");
        if (!(hbar > 0 && mu_B > 0 && mu_0 > 0 && k_B > 0 && m_atom > 0 && g_J > 0 &&
              g_F2 > 0 && alpha_dc > 0 && omega_hfs > 0))
            throw std::invalid_argument("constants: non-positive constant");
        if (!(g_F1 < 0)) throw std::invalid_argument("constants: g_F1 must be negative");
    }
};

inline constexpr double pi = std::numbers::pi;

/// Unit conversions at CLI/config boundaries; internals are SI only.
namespace units {
inline constexpr double gauss = 1e-4;        // T
inline constexpr double milliamp = 1e-3;     // A
inline constexpr double micrometer = 1e-6;   // m
inline constexpr double nanometer = 1e-9;    // m
inline constexpr double millisecond = 1e-3;  // s
inline constexpr double microsecond = 1e-6;  // s
inline constexpr double kilohertz_angular = 2.0 * pi * 1e3;  // rad/s per kHz
inline constexpr double megahertz_angular = 2.0 * pi * 1e6;  // rad/s per MHz
inline constexpr double gigahertz_angular = 2.0 * pi * 1e9;  // rad/s per GHz
}  // namespace units

}  // namespace chipgate

#endif

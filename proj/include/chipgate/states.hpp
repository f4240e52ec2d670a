#ifndef CHIPGATE_STATES_HPP
#define CHIPGATE_STATES_HPP

#include <complex>
#include <vector>

#include "chipgate/grid.hpp"
#include "chipgate/kernels.hpp"

namespace chipgate {

using cplx = std::complex<double>;

/// Single-particle wavefunction sampled on a SpatialGrid1D.
struct Wavefunction1D {
    SpatialGrid1D grid;
    std::vector<cplx> amp;
    double energy = 0.0;  // J, filled by the eigensolvers

    double norm_sq() const { return kernels::squared_norm(amp.data(), amp.size()) * grid.spacing(); }
    void normalize();
};

cplx inner(const Wavefunction1D& a, const Wavefunction1D& b);

/// Two-particle amplitude psi(x1, x2) on the shared grid, row-major with
/// x1 as the row index.
struct TwoParticleState {
    SpatialGrid1D grid;
    std::vector<cplx> amp;  // n * n

    std::size_t n() const { return grid.n_points; }
    double norm_sq() const {
        const double dx = grid.spacing();
        return kernels::squared_norm(amp.data(), amp.size()) * dx * dx;
    }
    void normalize();
    TwoParticleState transposed() const;
    /// Exchange-symmetry defect ||psi - psi^T|| / ||psi||.
    double symmetry_error() const;
};

cplx inner(const TwoParticleState& a, const TwoParticleState& b);

/// psi(x1,x2) = a(x1) b(x2).
TwoParticleState product_state(const Wavefunction1D& a, const Wavefunction1D& b);

}  // namespace chipgate

#endif

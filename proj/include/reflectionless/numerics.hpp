#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "reflectionless/soliton.hpp"

namespace refl {

// Cross-checks that treat the potential as a black-box x -> U(x) map and
// never look at determinant internals.

using Potential = std::function<double(double)>;

struct SpectrumResult {
    std::vector<double> energies;  // ascending, all negative
    double grid_step = 0.0;
    double domain_halfwidth = 0.0;
};

/// Negative eigenvalues of the three-point finite-difference Hamiltonian on
/// [-halfwidth, halfwidth] with Dirichlet ends, by Sturm-sequence bisection.
/// Throws DomainError if |U| >= 1e-8 at either end.
SpectrumResult bound_spectrum(const Potential& u, double halfwidth, double grid_step);

/// Defaults: halfwidth 12/k_1, step 1e-3.
SpectrumResult bound_spectrum(const SolitonConfig& cfg, double grid_step = 1e-3);

struct ScatteringResult {
    double k = 0.0;
    std::complex<double> reflection_amp;
    std::complex<double> transmission_amp;
    double unitarity_defect = 0.0;
    double halfwidth = 0.0;
    std::size_t steps = 0;
};

struct ScatterOptions {
    double halfwidth = 0.0;  // 0: grow from 10 until |U| < decay_tol at both ends
    double decay_tol = 1e-13;
    double rk_tol = 1e-10;
};

/// Integrate H psi = k^2 psi from +halfwidth (pure t e^{ikx}) down to
/// -halfwidth and split the left asymptote into e^{ikx} + r e^{-ikx},
/// normalized to unit incident amplitude.
ScatteringResult scatter(const Potential& u, double k, const ScatterOptions& opts = {});

/// prod_j (ik - k_j)/(ik + k_j).
std::complex<double> reflectionless_transmission(const std::vector<double>& kappa, double k);

/// Adaptive Gauss-Kronrod on [a, b]; tol is relative to the L1 norm.
double quadrature(const std::function<double(double)>& f, double a, double b, double tol);

/// Integral over the real line; ends are pushed out from [-start, start]
/// until |f| < 1e-14 relative to its grid maximum.
double quadrature_line(const std::function<double(double)>& f, double start, double tol);

/// |dU/dt - 6 U dU/dx + d^3U/dx^3| at (x, t), t being t_3 on top of any
/// times already present.
double kdv_residual(const SolitonConfig& cfg, double x, double t);

/// Centered difference in t_3 of U(x), the oracle for dt_potential.
double dt_potential_fd(const SolitonConfig& cfg, double x, double h = 1e-5);

struct PhaseShiftReport {
    double expected_shift_fast = 0.0;   // a_12 / (2 k_2) at -T
    double expected_shift_slow = 0.0;   // a_12 / (2 k_1) at +T
    double measured[2][2] = {{0, 0}, {0, 0}};  // [soliton][time: -T, +T] offsets from free motion
    double max_deviation = 0.0;
};

/// Two-soliton collision: locate both potential minima at t = -T and +T and
/// compare their offsets from free motion with a_12 / (2 k_j). Throws
/// DomainError if the free centers are closer than 5/k_1 at either time.
PhaseShiftReport phase_shift_check(const SolitonConfig& cfg, double big_t);

}  // namespace refl

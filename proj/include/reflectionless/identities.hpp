#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reflectionless/jet.hpp"
#include "reflectionless/soliton.hpp"

namespace refl {

/// Outcome of checking one identity over a grid.
///
/// Proportionality identities are judged by `constancy` (std/|mean| of the
/// pointwise ratio); pointwise identities by `max_abs_deviation`. Points
/// where either side is below 1e-280 in magnitude are left out and counted.
struct VerificationReport {
    std::string name;
    std::string equation;
    std::vector<double> grid;
    double max_abs_deviation = 0.0;
    double constancy = 0.0;
    double measured_constant = 0.0;
    double tolerance = 0.0;
    int excluded = 0;
    bool pass = false;
};

inline constexpr double kConstancyTolerance = 1e-9;
inline constexpr double kResidualTolerance = 1e-10;

/// Jet of the closed-form tail integral from x to +infinity of phi_j phi_l:
/// (v~_{j,l} / u) e^{-(k_j + k_l) x} / (k_j + k_l).
ScaledJet inner_tail_jet(const SolitonConfig& cfg, int j, int l, double x, int order);
double inner_tail(const SolitonConfig& cfg, int j, int l, double x);

/// W[phi_d1..phi_dM] against u~_D e^{-sum k_d x} / u.
VerificationReport verify_wronskian_identity(const SolitonConfig& cfg, const std::vector<int>& deleted,
                                             const std::vector<double>& grid,
                                             double tol = kConstancyTolerance);

/// phi_j phi_l + d/dx (tail_jl) = 0, scaled by max |phi_j phi_l| on the grid.
VerificationReport verify_bilinear_derivative(const SolitonConfig& cfg, int j, int l,
                                              const std::vector<double>& grid,
                                              double tol = kResidualTolerance);

/// det(tail_{d_j d_l}) against w~_D e^{-2 sum k_d x} / (u prod 2k_d).
VerificationReport verify_deletion_determinant(const SolitonConfig& cfg, const std::vector<int>& deleted,
                                               const std::vector<double>& grid,
                                               double tol = kConstancyTolerance);

/// det(e_dj delta + <phihat_dj, phihat_dl>) against z~_D / u.
VerificationReport verify_addition_determinant(const SolitonConfig& cfg, const std::map<int, double>& e,
                                               const std::vector<double>& grid,
                                               double tol = kConstancyTolerance);

/// u = u|_{c_j -> 0} + (c_j / 2k_j) e^{-2 k_j x} w~_j, relative residual.
VerificationReport verify_tau_split(const SolitonConfig& cfg, int j, const std::vector<double>& grid,
                                    double tol = kResidualTolerance);

/// Norming constants of the soliton built from the free seeds
/// e^{k_j x} + c~_j e^{-k_j x}:
/// c_j = 2 k_j (-1)^(j-1) c~_j prod_{l != j} (k_j + k_l) / |k_j - k_l|.
SolitonConfig seed_to_soliton(const std::vector<double>& k, const std::vector<double>& c_tilde);
/// Inverse of seed_to_soliton.
std::vector<double> soliton_to_seed(const SolitonConfig& cfg);

/// W[psi_1..psi_N] = prod_{j>l}(k_j - k_l) e^{sum k_j x} u_N for the matched
/// config; also checks positivity and that -2 (log W)'' is the potential.
/// W is expanded over exponent-sign choices, each term a Vandermonde
/// product, so -2 (log W)'' is a weighted variance and free of cancellation.
VerificationReport verify_seed_wronskian(const std::vector<double>& k, const std::vector<double>& c_tilde,
                                         const std::vector<double>& grid,
                                         double tol = kResidualTolerance);

/// Settings for the randomized identity sweep.
struct FuzzOptions {
    std::uint64_t seed = 20240601;
    int configs = 50;
    int max_solitons = 6;
    double k_min = 0.2;
    double k_max = 4.0;
    double c_min = 0.1;
    double c_max = 10.0;
    int grid_points = 121;
    double grid_halfwidth_over_k1 = 6.0;
};

/// Random valid config drawn as in the sweep (k ascending, uniform ranges).
SolitonConfig random_config(std::uint64_t seed, int n, const FuzzOptions& opts = {});

/// Every identity on one config, with index sets (|D| <= 3) drawn from `seed`.
std::vector<VerificationReport> verify_all(const SolitonConfig& cfg, std::uint64_t seed,
                                           const std::vector<double>& grid);

/// verify_all over `opts.configs` random configs, run in parallel, reports
/// merged in config order.
std::vector<VerificationReport> run_identity_suite(const FuzzOptions& opts = {});

}  // namespace refl

#pragma once

#include <map>
#include <vector>

#include "reflectionless/jet.hpp"

namespace refl {

/// Spectral data of an N-soliton (reflectionless) potential.
///
/// Bound-state energies are -k_j^2. The norming constants c_j fix where the
/// solitons sit. `times` maps an odd hierarchy index 2n+1 (n >= 1) to the
/// time t_{2n+1}; evaluation routines apply the flow before use.
///
/// Indices in the public API are 1-based (j = 1..N), k ascending, so j = N is
/// the ground state.
struct SolitonConfig {
    std::vector<double> k;
    std::vector<double> c;
    std::map<int, double> times;

    /// Validated construction; throws ValidationError on bad data.
    static SolitonConfig make(std::vector<double> k, std::vector<double> c,
                              std::map<int, double> times = {});

    int size() const { return static_cast<int>(k.size()); }
    std::vector<double> energies() const;
};

/// Throws ValidationError naming the offending field.
void validate(const SolitonConfig& cfg);

/// Flowed copy with `times` cleared: c_j -> c_j exp(sum (2k_j)^(2n+1) t_(2n+1)).
SolitonConfig apply_time_flows(const SolitonConfig& cfg);

/// Per-index multiplier on c. Factors may be zero (drops that soliton from
/// the tau function) or negative (tilde variants that are not themselves
/// potentials).
struct CoefficientRule {
    std::vector<double> factors;

    static CoefficientRule identity(int n);
    std::vector<double> apply(const std::vector<double>& c) const;
};

/// Pointwise product; rules compose by multiplying factors.
CoefficientRule operator*(const CoefficientRule& a, const CoefficientRule& b);

// Rules, all 1-based in the soliton index.

/// c_m -> c_m (k_j - k_m)/(k_j + k_m); tau of the j-th eigenfunction numerator.
CoefficientRule eigenfunction_rule(const SolitonConfig& cfg, int j);
/// c_m -> c_m (k_j - k_m)^2/(k_j + k_m)^2.
CoefficientRule squared_rule(const SolitonConfig& cfg, int j);
/// c_m -> c_m (k_j - k_m)/(k_j + k_m) * (k_l - k_m)/(k_l + k_m).
CoefficientRule pair_rule(const SolitonConfig& cfg, int j, int l);
/// Product of ((k_d - k_m)/(k_d + k_m))^xi over d in `deleted`.
CoefficientRule deletion_rule(const SolitonConfig& cfg, const std::vector<int>& deleted, int xi);
/// c_d -> e_d/(e_d + 1) c_d for each entry of `e`.
CoefficientRule addition_rule(const SolitonConfig& cfg, const std::map<int, double>& e);
/// c_j -> 0.
CoefficientRule drop_rule(const SolitonConfig& cfg, int j);

/// Jet of a tau function with a tracked constant exponent:
/// tau = exp(gauge_exponent) * jet.
struct TauEval {
    double x = 0.0;
    Jet jet;
    double gauge_exponent = 0.0;
    /// jet = exp(core_rate (x - center)) * core.
    Jet core;
    double core_rate = 0.0;

    ScaledJet scaled() const { return {jet, gauge_exponent}; }
};

/// det A_N at x with the rule applied to the (flowed) c. Rows whose
/// exponential entry exceeds one are divided through by it, so stored
/// entries stay O(1) on both half-lines.
TauEval tau_det(const SolitonConfig& cfg, const CoefficientRule& rule, double x, int order);
TauEval tau_det(const SolitonConfig& cfg, double x, int order);

/// Signed value represented as sign * exp(log_abs).
struct LogValue {
    double log_abs = 0.0;
    int sign = 1;

    double value() const;
};

inline constexpr int kHirotaMaxSolitons = 24;

/// Tau function from its 2^N-term exponential sum, accumulated as a
/// log-sum-exp. Independent of the determinant route.
LogValue tau_hirota(const SolitonConfig& cfg, const CoefficientRule& rule, double x);
LogValue tau_hirota(const SolitonConfig& cfg, double x);

/// U(x) = -2 d^2/dx^2 log u(x).
double potential(const SolitonConfig& cfg, double x);

/// Jet of U itself about x (needs the tau jet to order + 2).
Jet potential_jet(const SolitonConfig& cfg, double x, int order);

/// phi_j = (u~_j / u) exp(-k_j x), unit amplitude of exp(-k_j x) at +inf.
ScaledJet eigenfunction_scaled(const SolitonConfig& cfg, int j, double x, int order);
Jet eigenfunction(const SolitonConfig& cfg, int j, double x, int order);

/// dU/dt_3 at x, from the analytic t-derivative of the tau function.
double dt_potential(const SolitonConfig& cfg, double x);

/// Uniform grid over [-10/k_1, 10/k_1] ([-10, 10] for N = 0).
std::vector<double> default_grid(const SolitonConfig& cfg, int points = 2001);

std::vector<double> linspace(double a, double b, int points);

}  // namespace refl

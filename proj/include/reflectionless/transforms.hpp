#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reflectionless/jet.hpp"
#include "reflectionless/soliton.hpp"

namespace refl {

enum class Scheme { darboux_ground, krein_adler, am_delete, am_add, generic_darboux, generic_am };

std::string to_string(Scheme s);

/// Outcome of a closed-form deformation: the rewritten spectral data plus
/// what was done to get there.
struct TransformResult {
    SolitonConfig before;
    SolitonConfig after;
    Scheme scheme = Scheme::darboux_ground;
    std::vector<int> deleted;          // 1-based indices into `before`
    int xi_exponent = 1;               // power on (k_d - k_m)/(k_d + k_m)
    std::map<int, double> am_params;   // e_j for am_add
    bool singular = false;             // unsafe Krein-Adler output, c may be <= 0
};

/// Delete the ground state (j = N): c_m -> c_m (k_N - k_m)/(k_N + k_m).
TransformResult darboux_ground(const SolitonConfig& cfg);

/// First m in 1..N with prod_j (d_j - m) < 0, if any.
std::optional<int> krein_adler_violation(int n, const std::vector<int>& deleted);
bool krein_adler_check(int n, const std::vector<int>& deleted);

/// Multiple Darboux deletion of the eigenstates in `deleted`. Without
/// `unsafe` the Adler condition must hold; with it, the rewritten config is
/// returned unvalidated and flagged singular.
TransformResult krein_adler_delete(const SolitonConfig& cfg, const std::vector<int>& deleted,
                                   bool unsafe = false);

/// Abraham-Moses eigenstate deletion; squared factors, any index set allowed.
TransformResult am_delete(const SolitonConfig& cfg, const std::vector<int>& deleted);

/// Abraham-Moses addition on existing eigenstates: c_j -> e_j/(e_j + 1) c_j.
TransformResult am_add(const SolitonConfig& cfg, const std::map<int, double>& params);

// ---------------------------------------------------------------------------
// Generic engines over arbitrary seed solutions.

/// A solution of the untransformed Schrodinger equation at `energy`,
/// evaluated as a jet of the requested order about x.
struct SeedFunction {
    std::function<ScaledJet(double x, int order)> evaluate;
    double energy = 0.0;
    std::string label;
};

/// phi_{N,j}, unit amplitude of exp(-k_j x) at +infinity.
SeedFunction eigenfunction_seed(const SolitonConfig& cfg, int j);
/// sqrt(c_j) phi_{N,j}, unit L2 norm.
SeedFunction normalized_eigenfunction_seed(const SolitonConfig& cfg, int j);
/// exp(k x) + c_tilde exp(-k x), a solution of the free equation at -k^2.
SeedFunction free_seed(double k, double c_tilde);
/// exp(rate x).
SeedFunction exponential_seed(double rate);
/// cos(k x) and sin(k x); real and imaginary parts of a free plane wave.
SeedFunction cosine_seed(double k);
SeedFunction sine_seed(double k);

/// W[f_1..f_M] about x, as a jet of the requested order. Each column's
/// exponent is factored out into the result's log_scale.
ScaledJet wronskian(const std::vector<SeedFunction>& fns, double x, int order);

/// psi^(M) = W[seeds.., target] / W[seeds]. Throws SingularityError when the
/// seed Wronskian vanishes at x.
ScaledJet generic_darboux(const std::vector<SeedFunction>& seeds, const SeedFunction& target,
                          double x, int order);

/// W[seeds without seeds[j]] / W[seeds] (0-based j), the image of the
/// seed itself.
ScaledJet deleted_seed_image(const std::vector<SeedFunction>& seeds, std::size_t j, double x,
                             int order);

/// U(x) - 2 d^2/dx^2 log |W[seeds](x)|.
double darboux_potential(const std::function<double(double)>& base,
                         const std::vector<SeedFunction>& seeds, double x);

enum class AmMode { add, remove };

/// <phi_j, phi_l>(x) = integral from -infinity to x, as a jet (0-based j, l).
using OverlapJet = std::function<Jet(std::size_t j, std::size_t l, double x, int order)>;
/// <phi_l, psi>(x) against the transformed target.
using TargetOverlapJet = std::function<Jet(std::size_t l, double x, int order)>;

struct GenericAmResult {
    double potential = 0.0;
    Jet det_f;                    // det F_M about x
    std::optional<Jet> target;    // transformed target, if one was given
};

/// Multiple Abraham-Moses step with F_jl = e_j delta_jl +/- <phi_j, phi_l>
/// (+ for add, - for remove). Throws SingularityError when F_M is not
/// positive definite at x.
GenericAmResult generic_am(const std::function<double(double)>& base,
                           const std::vector<SeedFunction>& seeds, AmMode mode,
                           const std::vector<double>& e, const OverlapJet& overlaps, double x,
                           int order = 2, const SeedFunction* target = nullptr,
                           const TargetOverlapJet& target_overlaps = {});

/// Deletion step with e_j = (phi_j, phi_j), taking F_jl directly as the tail
/// integral from x to +infinity of phi_j phi_l. Same matrix as generic_am in
/// remove mode, without the subtraction (phi_j, phi_l) - <phi_j, phi_l>(x).
GenericAmResult generic_am_deletion(const std::function<double(double)>& base,
                                    const std::vector<SeedFunction>& seeds, const OverlapJet& tails,
                                    double x, int order = 2, const SeedFunction* target = nullptr,
                                    const TargetOverlapJet& target_overlaps = {});

/// Closed-form tails of soliton eigenfunction seeds picked by `indices`.
OverlapJet soliton_tails(const SolitonConfig& cfg, const std::vector<int>& indices, bool normalized);

/// Closed-form overlaps of soliton eigenfunction seeds picked by `indices`
/// (1-based). With `normalized`, for the sqrt(c_j)-scaled eigenfunctions.
OverlapJet soliton_overlaps(const SolitonConfig& cfg, const std::vector<int>& indices,
                            bool normalized);

/// Overlaps by adaptive quadrature from `lower` (a point where the seeds
/// have decayed); higher jet coefficients come from the integrand.
OverlapJet quadrature_overlaps(const std::vector<SeedFunction>& seeds, double lower, double tol);

/// Norms (phi_j, phi_j) of soliton eigenfunction seeds, i.e. 1/c_j.
std::vector<double> soliton_norms(const SolitonConfig& cfg, const std::vector<int>& indices,
                                  bool normalized);

}  // namespace refl

#include "reflectionless/soliton.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "reflectionless/errors.hpp"

namespace refl {

namespace {

void require_index(const SolitonConfig& cfg, int j, const char* what) {
    if (j < 1 || j > cfg.size()) {
        std::ostringstream os;
        os << what << ": index " << j << " outside 1.." << cfg.size();
        throw UsageError(os.str());
    }
}

double ratio(double kd, double km) { return (kd - km) / (kd + km); }

}  // namespace

SolitonConfig SolitonConfig::make(std::vector<double> k, std::vector<double> c,
                                  std::map<int, double> times) {
    SolitonConfig cfg{std::move(k), std::move(c), std::move(times)};
    validate(cfg);
    return cfg;
}

std::vector<double> SolitonConfig::energies() const {
    std::vector<double> e;
    e.reserve(k.size());
    for (double kj : k) e.push_back(-kj * kj);
    return e;
}

void validate(const SolitonConfig& cfg) {
    if (cfg.k.size() != cfg.c.size()) {
        throw ValidationError("k and c must have the same length (" + std::to_string(cfg.k.size()) +
                              " vs " + std::to_string(cfg.c.size()) + ")");
    }
    for (std::size_t i = 0; i < cfg.k.size(); ++i) {
        if (!std::isfinite(cfg.k[i]) || !(cfg.k[i] > 0.0)) {
            throw ValidationError("k[" + std::to_string(i) + "] must be positive and finite");
        }
        if (i > 0 && !(cfg.k[i] > cfg.k[i - 1])) throw ValidationError("k not strictly ascending");
        if (!std::isfinite(cfg.c[i]) || !(cfg.c[i] > 0.0)) {
            throw ValidationError("c[" + std::to_string(i) + "] must be positive and finite");
        }
    }
    for (const auto& [key, t] : cfg.times) {
        if (key < 3 || key % 2 == 0) {
            throw ValidationError("times key " + std::to_string(key) + " must be an odd integer >= 3");
        }
        if (!std::isfinite(t)) throw ValidationError("times[" + std::to_string(key) + "] not finite");
    }
}

SolitonConfig apply_time_flows(const SolitonConfig& cfg) {
    SolitonConfig out{cfg.k, cfg.c, {}};
    for (std::size_t j = 0; j < cfg.k.size(); ++j) {
        double exponent = 0.0;
        for (const auto& [key, t] : cfg.times) exponent += std::pow(2.0 * cfg.k[j], key) * t;
        const double log_c = std::log(std::abs(cfg.c[j])) + exponent;
        if (!std::isfinite(exponent) || log_c > std::log(std::numeric_limits<double>::max())) {
            std::ostringstream os;
            os << "time flow overflows c[" << j << "] (exponent " << exponent << ")";
            throw RangeError(os.str());
        }
        out.c[j] = cfg.c[j] * std::exp(exponent);
    }
    return out;
}

CoefficientRule CoefficientRule::identity(int n) {
    return {std::vector<double>(static_cast<std::size_t>(n), 1.0)};
}

std::vector<double> CoefficientRule::apply(const std::vector<double>& c) const {
    if (c.size() != factors.size()) throw UsageError("coefficient rule length mismatch");
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = factors[i] * c[i];
    return out;
}

CoefficientRule operator*(const CoefficientRule& a, const CoefficientRule& b) {
    if (a.factors.size() != b.factors.size()) throw UsageError("coefficient rule length mismatch");
    CoefficientRule r = a;
    for (std::size_t i = 0; i < r.factors.size(); ++i) r.factors[i] *= b.factors[i];
    return r;
}

CoefficientRule eigenfunction_rule(const SolitonConfig& cfg, int j) {
    require_index(cfg, j, "eigenfunction_rule");
    CoefficientRule r = CoefficientRule::identity(cfg.size());
    const double kj = cfg.k[static_cast<std::size_t>(j - 1)];
    for (int m = 0; m < cfg.size(); ++m) r.factors[static_cast<std::size_t>(m)] = ratio(kj, cfg.k[static_cast<std::size_t>(m)]);
    r.factors[static_cast<std::size_t>(j - 1)] = 0.0;
    return r;
}

CoefficientRule squared_rule(const SolitonConfig& cfg, int j) {
    CoefficientRule r = eigenfunction_rule(cfg, j);
    return r * r;
}

CoefficientRule pair_rule(const SolitonConfig& cfg, int j, int l) {
    return eigenfunction_rule(cfg, j) * eigenfunction_rule(cfg, l);
}

CoefficientRule deletion_rule(const SolitonConfig& cfg, const std::vector<int>& deleted, int xi) {
    CoefficientRule r = CoefficientRule::identity(cfg.size());
    for (int d : deleted) {
        CoefficientRule f = eigenfunction_rule(cfg, d);
        for (int p = 0; p < xi; ++p) r = r * f;
    }
    return r;
}

CoefficientRule addition_rule(const SolitonConfig& cfg, const std::map<int, double>& e) {
    CoefficientRule r = CoefficientRule::identity(cfg.size());
    for (const auto& [j, ej] : e) {
        require_index(cfg, j, "addition_rule");
        if (!(ej > 0.0) || !std::isfinite(ej)) {
            throw ValidationError("e[" + std::to_string(j) + "] must be positive");
        }
        r.factors[static_cast<std::size_t>(j - 1)] = ej / (ej + 1.0);
    }
    return r;
}

CoefficientRule drop_rule(const SolitonConfig& cfg, int j) {
    require_index(cfg, j, "drop_rule");
    CoefficientRule r = CoefficientRule::identity(cfg.size());
    r.factors[static_cast<std::size_t>(j - 1)] = 0.0;
    return r;
}

TauEval tau_det(const SolitonConfig& cfg, const CoefficientRule& rule, double x, int order) {
    if (order < 0) throw UsageError("tau_det: negative order");
    const SolitonConfig flowed = cfg.times.empty() ? cfg : apply_time_flows(cfg);
    const int n = flowed.size();
    const std::vector<double> c = rule.apply(flowed.c);
    const auto& k = flowed.k;
    const auto at = [n](int r, int s) { return static_cast<std::size_t>(r * n + s); };

    // Log weights eta_m = log(|c_m| / 2k_m) - 2 k_m x of the rank-one terms.
    std::vector<double> eta(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> active(static_cast<std::size_t>(n));
    std::vector<double> sign(static_cast<std::size_t>(n), 1.0);
    for (int m = 0; m < n; ++m) {
        const auto um = static_cast<std::size_t>(m);
        active[um] = c[um] != 0.0;
        if (!active[um]) continue;
        sign[um] = c[um] > 0.0 ? 1.0 : -1.0;
        eta[um] = std::log(std::abs(c[um]) / (2.0 * k[um])) - 2.0 * k[um] * x;
        if (!std::isfinite(eta[um])) {
            std::ostringstream os;
            os << "tau_det: exponent out of range at |k x| = " << std::abs(k[um] * x);
            throw RangeError(os.str());
        }
    }
    // log((k_j - k_l)^2 / (k_j + k_l)^2), the principal 2x2 Cauchy minor ratio.
    std::vector<double> pair(static_cast<std::size_t>(n * n), 0.0);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < j; ++l) {
            const double v = 2.0 * (std::log(std::abs(k[static_cast<std::size_t>(j)] - k[static_cast<std::size_t>(l)])) -
                                    std::log(k[static_cast<std::size_t>(j)] + k[static_cast<std::size_t>(l)]));
            pair[at(j, l)] = pair[at(l, j)] = v;
        }
    }

    // Factor out the dominant principal minor. With B the flipped set,
    //   det(I + D K) = det(D_B K_BB) * det(I + D' K'),
    // where K' is the Cauchy kernel on nodes -k_m (m in B), +k_m otherwise,
    // and D' carries the complemented weights eta'. B is grown greedily until
    // no single flip increases det(D_B K_BB), so every |eta'| entry weight
    // is at most one and the reduced determinant has no cancellation from a
    // tiny Cauchy minor.
    std::vector<bool> flipped(static_cast<std::size_t>(n), false);
    const auto flip_gain = [&](int j) {
        const auto uj = static_cast<std::size_t>(j);
        double g = flipped[uj] ? -eta[uj] : eta[uj];
        for (int l = 0; l < n; ++l) {
            if (l == j || !flipped[static_cast<std::size_t>(l)]) continue;
            g += flipped[uj] ? -pair[at(j, l)] : pair[at(j, l)];
        }
        return g;
    };
    for (;;) {
        int best = -1;
        double best_gain = 0.0;
        for (int j = 0; j < n; ++j) {
            if (!active[static_cast<std::size_t>(j)]) continue;
            const double g = flip_gain(j);
            if (g > best_gain) {
                best_gain = g;
                best = j;
            }
        }
        if (best < 0) break;
        flipped[static_cast<std::size_t>(best)] = !flipped[static_cast<std::size_t>(best)];
    }

    TauEval out;
    out.x = x;
    double prefactor_sign = 1.0;
    double prefactor_rate = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        if (!flipped[uj]) continue;
        out.gauge_exponent += eta[uj];
        for (int l = 0; l < j; ++l) {
            if (flipped[static_cast<std::size_t>(l)]) out.gauge_exponent += pair[at(j, l)];
        }
        prefactor_sign *= sign[uj];
        prefactor_rate -= 2.0 * k[uj];
    }

    JetMatrix a(n, x, order);
    for (int m = 0; m < n; ++m) {
        const auto um = static_cast<std::size_t>(m);
        if (!active[um]) {
            a(m, m) = Jet::constant(1.0, x, order);
            continue;
        }
        const double node = flipped[um] ? -k[um] : k[um];
        const double weight = sign[um] * 2.0 * node * std::exp(flip_gain(m));
        const Jet shape = jet_exp_shape(-2.0 * node, x, order);
        for (int col = 0; col < n; ++col) {
            const auto uc = static_cast<std::size_t>(col);
            const double other = flipped[uc] ? -k[uc] : k[uc];
            Jet entry = shape * (weight / (node + other));
            if (col == m) entry += 1.0;
            a(m, col) = std::move(entry);
        }
    }
    out.core = determinant(a);
    out.core *= prefactor_sign;
    out.core_rate = prefactor_rate;
    out.jet = jet_exp_shape(prefactor_rate, x, order) * out.core;
    return out;
}

TauEval tau_det(const SolitonConfig& cfg, double x, int order) {
    return tau_det(cfg, CoefficientRule::identity(cfg.size()), x, order);
}

double LogValue::value() const { return sign * std::exp(log_abs); }

LogValue tau_hirota(const SolitonConfig& cfg, const CoefficientRule& rule, double x) {
    const SolitonConfig flowed = cfg.times.empty() ? cfg : apply_time_flows(cfg);
    const int n = flowed.size();
    if (n > kHirotaMaxSolitons) {
        throw UsageError("tau_hirota: N = " + std::to_string(n) + " exceeds the 2^N budget (N <= " +
                         std::to_string(kHirotaMaxSolitons) + ")");
    }
    const std::vector<double> c = rule.apply(flowed.c);
    const auto& k = flowed.k;

    std::vector<double> eta(static_cast<std::size_t>(n));
    std::vector<int> sgn(static_cast<std::size_t>(n));
    std::vector<bool> active(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < eta.size(); ++j) {
        active[j] = c[j] != 0.0;
        sgn[j] = c[j] < 0.0 ? -1 : 1;
        eta[j] = active[j] ? std::log(std::abs(c[j]) / (2.0 * k[j])) - 2.0 * k[j] * x : 0.0;
    }
    // Pairwise interaction exponents a_jl = log((k_j - k_l)^2 / (k_j + k_l)^2).
    std::vector<double> inter(static_cast<std::size_t>(n * n), 0.0);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < j; ++l) {
            const double a = 2.0 * (std::log(std::abs(k[static_cast<std::size_t>(j)] - k[static_cast<std::size_t>(l)])) -
                                    std::log(k[static_cast<std::size_t>(j)] + k[static_cast<std::size_t>(l)]));
            inter[static_cast<std::size_t>(j * n + l)] = a;
            inter[static_cast<std::size_t>(l * n + j)] = a;
        }
    }

    // Running signed log-sum-exp: total = sum * exp(peak).
    double peak = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    auto accumulate = [&](double t, int s) {
        if (t <= peak) {
            sum += s * std::exp(t - peak);
        } else {
            sum = sum * std::exp(peak - t) + s;
            peak = t;
        }
    };

    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(n));
    std::function<void(int, double, int)> walk = [&](int j, double expo, int s) {
        if (j == n) {
            accumulate(expo, s);
            return;
        }
        walk(j + 1, expo, s);
        const auto uj = static_cast<std::size_t>(j);
        if (!active[uj]) return;
        double add = eta[uj];
        for (int l : chosen) add += inter[static_cast<std::size_t>(j * n + l)];
        chosen.push_back(j);
        walk(j + 1, expo + add, s * sgn[uj]);
        chosen.pop_back();
    };
    walk(0, 0.0, 1);

    LogValue out;
    if (sum == 0.0) {
        out.sign = 0;
        out.log_abs = -std::numeric_limits<double>::infinity();
    } else {
        out.sign = sum > 0.0 ? 1 : -1;
        out.log_abs = peak + std::log(std::abs(sum));
    }
    return out;
}

LogValue tau_hirota(const SolitonConfig& cfg, double x) {
    return tau_hirota(cfg, CoefficientRule::identity(cfg.size()), x);
}

double potential(const SolitonConfig& cfg, double x) {
    if (cfg.size() == 0) return 0.0;
    Jet u = tau_det(cfg, x, 2).core;
    // A constant sign is a gauge like any other; only a zero is singular.
    if (u[0] < 0.0) u *= -1.0;
    return -2.0 * jet_log_d2(u);
}

Jet potential_jet(const SolitonConfig& cfg, double x, int order) {
    if (order < 0) throw UsageError("potential_jet: negative order");
    if (cfg.size() == 0) return Jet::constant(0.0, x, order);
    const Jet u = tau_det(cfg, x, order + 2).core;
    const Jet log_u_prime = divide(differentiate(u), truncate(u, order + 1));
    return differentiate(log_u_prime) * -2.0;
}

ScaledJet eigenfunction_scaled(const SolitonConfig& cfg, int j, double x, int order) {
    require_index(cfg, j, "eigenfunction");
    const TauEval u = tau_det(cfg, x, order);
    const TauEval ut = tau_det(cfg, eigenfunction_rule(cfg, j), x, order);
    const double kj = cfg.k[static_cast<std::size_t>(j - 1)];
    const ScaledJet decay{jet_exp_shape(-kj, x, order), -kj * x};
    return ut.scaled() / u.scaled() * decay;
}

Jet eigenfunction(const SolitonConfig& cfg, int j, double x, int order) {
    return eigenfunction_scaled(cfg, j, x, order).expanded();
}

double dt_potential(const SolitonConfig& cfg, double x) {
    if (cfg.size() == 0) return 0.0;
    const SolitonConfig flowed = apply_time_flows(cfg);
    const ScaledJet u = tau_det(flowed, x, 2).scaled();
    // u is affine in each c_j and dc_j/dt = 8 k_j^3 c_j, so
    // du/dt = sum_j 8 k_j^3 (c_j / 2k_j) e^{-2 k_j x} w~_j.
    Jet rate = Jet::constant(0.0, x, 2);
    for (int j = 1; j <= flowed.size(); ++j) {
        const auto uj = static_cast<std::size_t>(j - 1);
        const double kj = flowed.k[uj];
        const ScaledJet w = tau_det(flowed, squared_rule(flowed, j), x, 2).scaled();
        const ScaledJet weight{jet_exp_shape(-2.0 * kj, x, 2) * (4.0 * kj * kj),
                               std::log(flowed.c[uj]) - 2.0 * kj * x};
        rate += (weight * w / u).expanded();
    }
    // dU/dt = -2 d^2/dx^2 (u_t / u).
    return -2.0 * rate.derivative(2);
}

std::vector<double> linspace(double a, double b, int points) {
    if (points < 2) throw UsageError("linspace needs at least two points");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double h = (b - a) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = a + h * i;
    g.back() = b;
    return g;
}

std::vector<double> default_grid(const SolitonConfig& cfg, int points) {
    const double half = cfg.size() == 0 ? 10.0 : 10.0 / cfg.k.front();
    return linspace(-half, half, points);
}

}  // namespace refl

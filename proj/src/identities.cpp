#include "reflectionless/identities.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <random>
#include <sstream>

#include "reflectionless/errors.hpp"
#include "reflectionless/transforms.hpp"

namespace refl {

namespace {

constexpr double kLogFloor = -644.7;  // log(1e-280)
constexpr int kMaxFuzzSubset = 3;  // largest |D| drawn by verify_all

struct Signed {
    double log_abs;
    double sign;
};

Signed signed_value(const ScaledJet& s) {
    const double v = s.jet[0];
    if (v == 0.0) return {-INFINITY, 0.0};
    return {std::log(std::abs(v)) + s.log_scale, v > 0 ? 1.0 : -1.0};
}

Signed signed_value(const TauEval& t) { return signed_value(t.scaled()); }

void require_index(const SolitonConfig& cfg, int j, const char* who) {
    if (j < 1 || j > cfg.size()) throw UsageError(std::string(who) + ": index " + std::to_string(j) + " out of range");
}

void require_distinct(const SolitonConfig& cfg, const std::vector<int>& d, const char* who) {
    std::vector<int> s = d;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) throw UsageError(std::string(who) + ": repeated index");
    for (int j : d) require_index(cfg, j, who);
}

std::string set_label(const std::vector<int>& d) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
    os << '}';
    return os.str();
}

// Fill constancy fields from lhs/rhs pairs.
void ratio_report(VerificationReport& r, const std::vector<Signed>& lhs, const std::vector<Signed>& rhs) {
    std::vector<double> ratios;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i].log_abs < kLogFloor || rhs[i].log_abs < kLogFloor || lhs[i].sign == 0.0 || rhs[i].sign == 0.0) {
            ++r.excluded;
            continue;
        }
        ratios.push_back(lhs[i].sign * rhs[i].sign * std::exp(lhs[i].log_abs - rhs[i].log_abs));
    }
    if (ratios.empty()) {
        r.constancy = INFINITY;
        r.pass = false;
        return;
    }
    const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
    double var = 0.0, dev = 0.0;
    for (double q : ratios) {
        var += (q - mean) * (q - mean);
        dev = std::max(dev, std::abs(q - mean));
    }
    var /= static_cast<double>(ratios.size());
    r.measured_constant = mean;
    r.max_abs_deviation = dev;
    r.constancy = std::sqrt(var) / std::abs(mean);
    r.pass = r.constancy <= r.tolerance;
}

VerificationReport start(std::string name, std::string eq, const std::vector<double>& grid, double tol) {
    VerificationReport r;
    r.name = std::move(name);
    r.equation = std::move(eq);
    r.grid = grid;
    r.tolerance = tol;
    return r;
}

double det_plain(std::vector<double> a, std::size_t n) {
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
            det = -det;
        }
        det *= a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
        }
    }
    return det;
}

// Tail matrix entry with the row/column exponentials e^{-k_a x} e^{-k_b x} removed.
double reduced_tail(const SolitonConfig& cfg, int a, int b, double x, const TauEval& u) {
    const TauEval v = tau_det(cfg, pair_rule(cfg, a, b), x, 0);
    const double ka = cfg.k[static_cast<std::size_t>(a - 1)];
    const double kb = cfg.k[static_cast<std::size_t>(b - 1)];
    return v.jet[0] / u.jet[0] * std::exp(v.gauge_exponent - u.gauge_exponent) / (ka + kb);
}

}  // namespace

ScaledJet inner_tail_jet(const SolitonConfig& cfg, int j, int l, double x, int order) {
    require_index(cfg, j, "inner_tail");
    require_index(cfg, l, "inner_tail");
    const double kj = cfg.k[static_cast<std::size_t>(j - 1)];
    const double kl = cfg.k[static_cast<std::size_t>(l - 1)];
    const ScaledJet v = tau_det(cfg, pair_rule(cfg, j, l), x, order).scaled();
    const ScaledJet u = tau_det(cfg, x, order).scaled();
    const ScaledJet shape{jet_exp_shape(-(kj + kl), x, order) * (1.0 / (kj + kl)), -(kj + kl) * x};
    return shape * (v / u);
}

double inner_tail(const SolitonConfig& cfg, int j, int l, double x) {
    return inner_tail_jet(cfg, j, l, x, 0).expanded()[0];
}

VerificationReport verify_wronskian_identity(const SolitonConfig& cfg, const std::vector<int>& deleted,
                                             const std::vector<double>& grid, double tol) {
    require_distinct(cfg, deleted, "verify_wronskian_identity");
    VerificationReport r = start("wronskian_identity D=" + set_label(deleted),
                                 "W[phi_d1..phi_dM] ~ u~_D exp(-sum k_d x) / u", grid, tol);
    std::vector<SeedFunction> seeds;
    double ksum = 0.0;
    for (int d : deleted) {
        seeds.push_back(eigenfunction_seed(cfg, d));
        ksum += cfg.k[static_cast<std::size_t>(d - 1)];
    }
    const CoefficientRule rule = deletion_rule(cfg, deleted, 1);
    std::vector<Signed> lhs, rhs;
    for (double x : grid) {
        lhs.push_back(signed_value(wronskian(seeds, x, 0)));
        const Signed num = signed_value(tau_det(cfg, rule, x, 0));
        const Signed den = signed_value(tau_det(cfg, x, 0));
        rhs.push_back({num.log_abs - den.log_abs - ksum * x, num.sign * den.sign});
    }
    ratio_report(r, lhs, rhs);
    return r;
}

VerificationReport verify_bilinear_derivative(const SolitonConfig& cfg, int j, int l,
                                              const std::vector<double>& grid, double tol) {
    require_index(cfg, j, "verify_bilinear_derivative");
    require_index(cfg, l, "verify_bilinear_derivative");
    std::ostringstream name;
    name << "bilinear_derivative j=" << j << " l=" << l;
    VerificationReport r = start(name.str(), "phi_j phi_l + d/dx (v~_jl / u e^{-(k_j+k_l)x} / (k_j+k_l)) = 0", grid,
                                 tol);
    double scale = 0.0, worst = 0.0;
    for (double x : grid) {
        const ScaledJet pj = eigenfunction_scaled(cfg, j, x, 0);
        const ScaledJet pl = eigenfunction_scaled(cfg, l, x, 0);
        const ScaledJet prod = pj * pl;
        const ScaledJet tail = inner_tail_jet(cfg, j, l, x, 1);
        const double p = prod.jet[0] * std::exp(prod.log_scale);
        const double dt = tail.jet[1] * std::exp(tail.log_scale);
        scale = std::max(scale, std::abs(p));
        worst = std::max(worst, std::abs(p + dt));
    }
    r.max_abs_deviation = scale > 0.0 ? worst / scale : worst;
    r.constancy = 0.0;
    r.pass = r.max_abs_deviation <= tol;
    return r;
}

VerificationReport verify_deletion_determinant(const SolitonConfig& cfg, const std::vector<int>& deleted,
                                               const std::vector<double>& grid, double tol) {
    require_distinct(cfg, deleted, "verify_deletion_determinant");
    VerificationReport r = start("deletion_determinant D=" + set_label(deleted),
                                 "det(tail_{d_j d_l}) ~ w~_D exp(-2 sum k_d x) / (u prod 2k_d)", grid, tol);
    const std::size_t m = deleted.size();
    double log_2k = 0.0;
    for (int d : deleted) log_2k += std::log(2.0 * cfg.k[static_cast<std::size_t>(d - 1)]);
    const CoefficientRule rule = deletion_rule(cfg, deleted, 2);
    std::vector<Signed> lhs, rhs;
    for (double x : grid) {
        const TauEval u = tau_det(cfg, x, 0);
        std::vector<double> t(m * m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) t[a * m + b] = reduced_tail(cfg, deleted[a], deleted[b], x, u);
        const double det = det_plain(t, m);
        lhs.push_back({det == 0.0 ? -INFINITY : std::log(std::abs(det)), det > 0 ? 1.0 : (det < 0 ? -1.0 : 0.0)});
        const Signed num = signed_value(tau_det(cfg, rule, x, 0));
        const Signed den = signed_value(u);
        // both sides carry exp(-2 sum k_d x); dropped from each
        rhs.push_back({num.log_abs - den.log_abs - log_2k, num.sign * den.sign});
    }
    ratio_report(r, lhs, rhs);
    return r;
}

VerificationReport verify_addition_determinant(const SolitonConfig& cfg, const std::map<int, double>& e,
                                               const std::vector<double>& grid, double tol) {
    std::vector<int> d;
    for (const auto& [j, ej] : e) {
        require_index(cfg, j, "verify_addition_determinant");
        if (!(ej > 0.0) || !std::isfinite(ej)) throw ValidationError("e_" + std::to_string(j) + " must be positive");
        d.push_back(j);
    }
    VerificationReport r = start("addition_determinant D=" + set_label(d),
                                 "det(e_dj delta + <phihat_dj, phihat_dl>) ~ z~_D / u", grid, tol);
    const std::size_t m = d.size();
    const std::vector<double> c = apply_time_flows(cfg).c;
    const CoefficientRule rule = addition_rule(cfg, e);
    std::vector<Signed> lhs, rhs;
    for (double x : grid) {
        const TauEval u = tau_det(cfg, x, 0);
        std::vector<double> f(m * m);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                const int ia = d[a], ib = d[b];
                const double ca = c[static_cast<std::size_t>(ia - 1)];
                const double cb = c[static_cast<std::size_t>(ib - 1)];
                const double ka = cfg.k[static_cast<std::size_t>(ia - 1)];
                const double kb = cfg.k[static_cast<std::size_t>(ib - 1)];
                const double tail = reduced_tail(cfg, ia, ib, x, u) * std::exp(-(ka + kb) * x);
                double v = -std::sqrt(ca * cb) * tail;
                if (a == b) v += e.at(ia) + 1.0;
                f[a * m + b] = v;
            }
        }
        const double det = det_plain(f, m);
        lhs.push_back({det == 0.0 ? -INFINITY : std::log(std::abs(det)), det > 0 ? 1.0 : (det < 0 ? -1.0 : 0.0)});
        const Signed num = signed_value(tau_det(cfg, rule, x, 0));
        const Signed den = signed_value(u);
        rhs.push_back({num.log_abs - den.log_abs, num.sign * den.sign});
    }
    ratio_report(r, lhs, rhs);
    return r;
}

VerificationReport verify_tau_split(const SolitonConfig& cfg, int j, const std::vector<double>& grid, double tol) {
    require_index(cfg, j, "verify_tau_split");
    VerificationReport r = start("tau_split j=" + std::to_string(j),
                                 "u = u|_{c_j=0} + (c_j/2k_j) e^{-2k_j x} w~_j", grid, tol);
    const double kj = cfg.k[static_cast<std::size_t>(j - 1)];
    const double cj = apply_time_flows(cfg).c[static_cast<std::size_t>(j - 1)];
    const CoefficientRule drop = drop_rule(cfg, j);
    const CoefficientRule sq = squared_rule(cfg, j);
    double worst = 0.0;
    for (double x : grid) {
        const Signed u = signed_value(tau_det(cfg, x, 0));
        const Signed u0 = signed_value(tau_det(cfg, drop, x, 0));
        const Signed w = signed_value(tau_det(cfg, sq, x, 0));
        const double r0 = u0.sign * u.sign * std::exp(u0.log_abs - u.log_abs);
        const double r1 = w.sign * u.sign * std::exp(std::log(cj / (2.0 * kj)) - 2.0 * kj * x + w.log_abs - u.log_abs);
        worst = std::max(worst, std::abs(1.0 - r0 - r1));
    }
    r.max_abs_deviation = worst;
    r.pass = worst <= tol;
    return r;
}

SolitonConfig seed_to_soliton(const std::vector<double>& k, const std::vector<double>& c_tilde) {
    if (k.size() != c_tilde.size()) throw ValidationError("k and c~ lengths differ");
    const std::size_t n = k.size();
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double signed_ct = (j % 2 == 0 ? 1.0 : -1.0) * c_tilde[j];
        if (!(signed_ct > 0.0)) {
            std::ostringstream os;
            os << "c~[" << j << "] violates the sign pattern (-1)^(j-1) c~_j > 0";
            throw ValidationError(os.str());
        }
        double prod = 1.0;
        for (std::size_t l = 0; l < n; ++l)
            if (l != j) prod *= (k[j] + k[l]) / std::abs(k[j] - k[l]);
        c[j] = 2.0 * k[j] * signed_ct * prod;
    }
    return SolitonConfig::make(k, c);
}

std::vector<double> soliton_to_seed(const SolitonConfig& cfg) {
    const SolitonConfig flowed = apply_time_flows(cfg);
    const std::size_t n = cfg.k.size();
    std::vector<double> ct(n);
    for (std::size_t j = 0; j < n; ++j) {
        double prod = 1.0;
        for (std::size_t l = 0; l < n; ++l)
            if (l != j) prod *= (cfg.k[j] + cfg.k[l]) / std::abs(cfg.k[j] - cfg.k[l]);
        ct[j] = (j % 2 == 0 ? 1.0 : -1.0) * flowed.c[j] / (2.0 * cfg.k[j] * prod);
    }
    return ct;
}

namespace {

struct ExpansionValue {
    double log_abs = -INFINITY;
    double sign = 0.0;
    double log_d2 = 0.0;  // d^2/dx^2 log|W|
};

// W[psi_1..psi_N] for psi_j = e^{k_j x} + c~_j e^{-k_j x}, expanded over the
// 2^N choices of exponent signs; each term is a Vandermonde product times a
// single exponential.
ExpansionValue seed_wronskian_expansion(const std::vector<double>& k, const std::vector<double>& ct, double x) {
    const std::size_t n = k.size();
    const std::size_t terms = std::size_t{1} << n;
    std::vector<double> logw(terms), sgn(terms), lam(terms);
    std::vector<double> rate(n);
    for (std::size_t mask = 0; mask < terms; ++mask) {
        double lw = 0.0, s = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const bool flip = (mask >> j) & 1U;
            rate[j] = flip ? -k[j] : k[j];
            if (flip) {
                if (ct[j] == 0.0) s = 0.0;
                lw += std::log(std::abs(ct[j]));
                if (ct[j] < 0.0) s = -s;
            }
        }
        double l = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            l += rate[j];
            for (std::size_t i = 0; i < j; ++i) {
                const double d = rate[j] - rate[i];
                lw += std::log(std::abs(d));
                if (d < 0.0) s = -s;
            }
        }
        logw[mask] = lw + l * x;
        sgn[mask] = s;
        lam[mask] = l;
    }
    double top = -INFINITY;
    for (std::size_t m = 0; m < terms; ++m)
        if (sgn[m] != 0.0) top = std::max(top, logw[m]);
    ExpansionValue out;
    if (!std::isfinite(top)) return out;
    double sum = 0.0, s1 = 0.0;
    for (std::size_t m = 0; m < terms; ++m) {
        const double w = sgn[m] * std::exp(logw[m] - top);
        sum += w;
        s1 += w * lam[m];
    }
    if (sum == 0.0) return out;
    const double mean = s1 / sum;
    double var = 0.0;
    for (std::size_t m = 0; m < terms; ++m) {
        const double d = lam[m] - mean;
        var += sgn[m] * std::exp(logw[m] - top) * d * d;
    }
    out.log_abs = top + std::log(std::abs(sum));
    out.sign = sum > 0.0 ? 1.0 : -1.0;
    out.log_d2 = var / sum;
    return out;
}

}  // namespace

VerificationReport verify_seed_wronskian(const std::vector<double>& k, const std::vector<double>& c_tilde,
                                         const std::vector<double>& grid, double tol) {
    const SolitonConfig cfg = seed_to_soliton(k, c_tilde);
    VerificationReport r = start("seed_wronskian N=" + std::to_string(cfg.size()),
                                 "W[psi_1..psi_N] = prod_{j>l}(k_j-k_l) e^{sum k x} u", grid, tol);
    double ksum = 0.0, log_vdm = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        ksum += k[j];
        for (std::size_t l = 0; l < j; ++l) log_vdm += std::log(k[j] - k[l]);
    }
    bool positive = true;
    double ratio_dev = 0.0, ratio_sum = 0.0, pot_dev = 0.0;
    for (double x : grid) {
        const ExpansionValue w = seed_wronskian_expansion(k, c_tilde, x);
        if (!(w.sign > 0.0)) positive = false;
        const Signed us = signed_value(tau_det(cfg, x, 0));
        const double ratio = w.sign * us.sign * std::exp(w.log_abs - log_vdm - ksum * x - us.log_abs);
        ratio_sum += ratio;
        ratio_dev = std::max(ratio_dev, std::abs(ratio - 1.0));
        pot_dev = std::max(pot_dev, std::abs(-2.0 * w.log_d2 - potential(cfg, x)));
    }
    r.measured_constant = grid.empty() ? 0.0 : ratio_sum / static_cast<double>(grid.size());
    r.constancy = ratio_dev;
    r.max_abs_deviation = pot_dev;
    r.pass = positive && ratio_dev <= tol && pot_dev <= tol;
    return r;
}

SolitonConfig random_config(std::uint64_t seed, int n, const FuzzOptions& opts) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> kd(opts.k_min, opts.k_max);
    std::uniform_real_distribution<double> cd(opts.c_min, opts.c_max);
    std::vector<double> k;
    do {
        k.clear();
        for (int i = 0; i < n; ++i) k.push_back(kd(rng));
        std::sort(k.begin(), k.end());
    } while (std::adjacent_find(k.begin(), k.end()) != k.end());
    std::vector<double> c;
    for (int i = 0; i < n; ++i) c.push_back(cd(rng));
    return SolitonConfig::make(k, c);
}

namespace {

std::vector<int> random_subset(std::mt19937_64& rng, int n, int max_size) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 1);
    std::shuffle(all.begin(), all.end(), rng);
    const int size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::min(n, max_size)));
    std::vector<int> out(all.begin(), all.begin() + size);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<VerificationReport> verify_all(const SolitonConfig& cfg, std::uint64_t seed,
                                           const std::vector<double>& grid) {
    std::vector<VerificationReport> out;
    const int n = cfg.size();
    if (n == 0) return out;
    std::mt19937_64 rng(seed);
    auto pick = [&] { return 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    out.push_back(verify_wronskian_identity(cfg, random_subset(rng, n, kMaxFuzzSubset), grid));

    const int j = pick();
    out.push_back(verify_bilinear_derivative(cfg, j, j, grid));
    if (n > 1) {
        int l = pick();
        while (l == j) l = pick();
        out.push_back(verify_bilinear_derivative(cfg, std::min(j, l), std::max(j, l), grid));
    }

    out.push_back(verify_deletion_determinant(cfg, random_subset(rng, n, kMaxFuzzSubset), grid));

    std::uniform_real_distribution<double> ed(0.5, 5.0);
    std::map<int, double> e;
    for (int d : random_subset(rng, n, kMaxFuzzSubset)) e[d] = ed(rng);
    out.push_back(verify_addition_determinant(cfg, e, grid));

    out.push_back(verify_tau_split(cfg, pick(), grid));

    out.push_back(verify_seed_wronskian(cfg.k, soliton_to_seed(cfg), grid));
    return out;
}

std::vector<VerificationReport> run_identity_suite(const FuzzOptions& opts) {
    if (opts.configs < 0 || opts.max_solitons < 1) throw UsageError("identity suite: bad options");
    std::mt19937_64 master(opts.seed);
    struct Job {
        std::uint64_t cfg_seed;
        std::uint64_t check_seed;
        int n;
    };
    std::vector<Job> jobs;
    for (int i = 0; i < opts.configs; ++i) {
        Job job;
        job.n = 1 + static_cast<int>(master() % static_cast<std::uint64_t>(opts.max_solitons));
        job.cfg_seed = master();
        job.check_seed = master();
        jobs.push_back(job);
    }
    std::vector<std::future<std::vector<VerificationReport>>> futures;
    for (const Job& job : jobs) {
        futures.push_back(std::async(std::launch::async, [job, opts] {
            const SolitonConfig cfg = random_config(job.cfg_seed, job.n, opts);
            const double half = opts.grid_halfwidth_over_k1 / cfg.k.front();
            return verify_all(cfg, job.check_seed, linspace(-half, half, opts.grid_points));
        }));
    }
    std::vector<VerificationReport> out;
    for (auto& f : futures) {
        auto part = f.get();
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

}  // namespace refl

#include "reflectionless/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "reflectionless/errors.hpp"
#include "reflectionless/identities.hpp"
#include "reflectionless/numerics.hpp"

namespace refl {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::darboux_ground: return "darboux_ground";
        case Scheme::krein_adler: return "krein_adler";
        case Scheme::am_delete: return "am_delete";
        case Scheme::am_add: return "am_add";
        case Scheme::generic_darboux: return "generic_darboux";
        case Scheme::generic_am: return "generic_am";
    }
    return "unknown";
}

namespace {

void require_index_set(const SolitonConfig& cfg, const std::vector<int>& deleted) {
    std::set<int> seen;
    for (int d : deleted) {
        if (d < 1 || d > cfg.size()) {
            std::ostringstream os;
            os << "deletion index " << d << " outside 1.." << cfg.size();
            throw UsageError(os.str());
        }
        if (!seen.insert(d).second) throw UsageError("deletion index " + std::to_string(d) + " repeated");
    }
}

TransformResult delete_with_rule(const SolitonConfig& cfg, const std::vector<int>& deleted, int xi,
                                 Scheme scheme) {
    require_index_set(cfg, deleted);
    const std::vector<double> rewritten = deletion_rule(cfg, deleted, xi).apply(cfg.c);
    TransformResult r;
    r.before = cfg;
    r.scheme = scheme;
    r.deleted = deleted;
    std::sort(r.deleted.begin(), r.deleted.end());
    r.xi_exponent = xi;
    r.after.times = cfg.times;
    for (int m = 1; m <= cfg.size(); ++m) {
        if (std::binary_search(r.deleted.begin(), r.deleted.end(), m)) continue;
        r.after.k.push_back(cfg.k[static_cast<std::size_t>(m - 1)]);
        r.after.c.push_back(rewritten[static_cast<std::size_t>(m - 1)]);
    }
    return r;
}

Jet cos_jet(double k, double x, int order, double phase) {
    Jet j = Jet::constant(0.0, x, order);
    double scale = 1.0;
    for (int n = 0; n <= order; ++n) {
        if (n > 0) scale *= k / n;
        j[n] = scale * std::cos(k * x + phase + n * M_PI / 2.0);
    }
    return j;
}

}  // namespace

TransformResult darboux_ground(const SolitonConfig& cfg) {
    if (cfg.size() == 0) throw UsageError("darboux_ground: N = 0, nothing to delete");
    return delete_with_rule(cfg, {cfg.size()}, 1, Scheme::darboux_ground);
}

std::optional<int> krein_adler_violation(int n, const std::vector<int>& deleted) {
    for (int m = 1; m <= n; ++m) {
        int negatives = 0;
        bool zero = false;
        for (int d : deleted) {
            if (d == m) zero = true;
            if (d < m) ++negatives;
        }
        if (!zero && negatives % 2 == 1) return m;
    }
    return std::nullopt;
}

bool krein_adler_check(int n, const std::vector<int>& deleted) {
    return !krein_adler_violation(n, deleted).has_value();
}

TransformResult krein_adler_delete(const SolitonConfig& cfg, const std::vector<int>& deleted, bool unsafe) {
    require_index_set(cfg, deleted);
    const auto bad = krein_adler_violation(cfg.size(), deleted);
    if (bad && !unsafe) {
        std::ostringstream os;
        os << "Krein-Adler condition fails at m=" << *bad << ": prod_j (d_j - m) < 0";
        throw ValidationError(os.str());
    }
    TransformResult r = delete_with_rule(cfg, deleted, 1, Scheme::krein_adler);
    r.singular = bad.has_value();
    if (!r.singular) validate(r.after);
    return r;
}

TransformResult am_delete(const SolitonConfig& cfg, const std::vector<int>& deleted) {
    TransformResult r = delete_with_rule(cfg, deleted, 2, Scheme::am_delete);
    validate(r.after);
    return r;
}

TransformResult am_add(const SolitonConfig& cfg, const std::map<int, double>& params) {
    const CoefficientRule rule = addition_rule(cfg, params);
    TransformResult r;
    r.before = cfg;
    r.scheme = Scheme::am_add;
    r.xi_exponent = 0;
    r.am_params = params;
    r.after = SolitonConfig{cfg.k, rule.apply(cfg.c), cfg.times};
    validate(r.after);
    return r;
}

SeedFunction eigenfunction_seed(const SolitonConfig& cfg, int j) {
    if (j < 1 || j > cfg.size()) throw UsageError("eigenfunction_seed: index out of range");
    const double kj = cfg.k[static_cast<std::size_t>(j - 1)];
    return {[cfg, j](double x, int order) { return eigenfunction_scaled(cfg, j, x, order); }, -kj * kj,
            "phi_" + std::to_string(j)};
}

SeedFunction normalized_eigenfunction_seed(const SolitonConfig& cfg, int j) {
    SeedFunction s = eigenfunction_seed(cfg, j);
    const double half_log_c = 0.5 * std::log(apply_time_flows(cfg).c[static_cast<std::size_t>(j - 1)]);
    s.evaluate = [inner = s.evaluate, half_log_c](double x, int order) {
        ScaledJet v = inner(x, order);
        v.log_scale += half_log_c;
        return v;
    };
    s.label = "phihat_" + std::to_string(j);
    return s;
}

SeedFunction free_seed(double k, double c_tilde) {
    auto eval = [k, c_tilde](double x, int order) {
        const double grow = k * x;
        if (c_tilde == 0.0) return ScaledJet{jet_exp_shape(k, x, order), grow};
        const double decay = std::log(std::abs(c_tilde)) - k * x;
        const double top = std::max(grow, decay);
        Jet j = jet_exp_shape(k, x, order) * std::exp(grow - top);
        j += jet_exp_shape(-k, x, order) * (std::copysign(1.0, c_tilde) * std::exp(decay - top));
        return ScaledJet{std::move(j), top};
    };
    std::ostringstream label;
    label << "exp(" << k << "x)+" << c_tilde << "exp(-" << k << "x)";
    return {eval, -k * k, label.str()};
}

SeedFunction exponential_seed(double rate) {
    return {[rate](double x, int order) { return ScaledJet{jet_exp_shape(rate, x, order), rate * x}; },
            -rate * rate, "exp"};
}

SeedFunction cosine_seed(double k) {
    return {[k](double x, int order) { return ScaledJet{cos_jet(k, x, order, 0.0), 0.0}; }, k * k, "cos"};
}

SeedFunction sine_seed(double k) {
    return {[k](double x, int order) { return ScaledJet{cos_jet(k, x, order, -M_PI / 2.0), 0.0}; }, k * k,
            "sin"};
}

ScaledJet wronskian(const std::vector<SeedFunction>& fns, double x, int order) {
    const int m = static_cast<int>(fns.size());
    if (m == 0) return {Jet::constant(1.0, x, order), 0.0};
    JetMatrix w(m, x, order);
    double log_scale = 0.0;
    for (int col = 0; col < m; ++col) {
        const ScaledJet f = fns[static_cast<std::size_t>(col)].evaluate(x, m - 1 + order);
        if (f.jet.order() != m - 1 + order) throw UsageError("seed returned a jet of the wrong order");
        log_scale += f.log_scale;
        Jet d = f.jet;
        for (int row = 0; row < m; ++row) {
            if (row > 0) d = differentiate(d);
            w(row, col) = truncate(d, order);
        }
    }
    return {determinant(w), log_scale};
}

ScaledJet generic_darboux(const std::vector<SeedFunction>& seeds, const SeedFunction& target, double x,
                          int order) {
    if (seeds.empty()) return target.evaluate(x, order);
    std::vector<SeedFunction> all = seeds;
    all.push_back(target);
    const ScaledJet num = wronskian(all, x, order);
    const ScaledJet den = wronskian(seeds, x, order);
    return num / den;
}

ScaledJet deleted_seed_image(const std::vector<SeedFunction>& seeds, std::size_t j, double x, int order) {
    if (j >= seeds.size()) throw UsageError("deleted_seed_image: index out of range");
    std::vector<SeedFunction> rest = seeds;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
    return wronskian(rest, x, order) / wronskian(seeds, x, order);
}

double darboux_potential(const std::function<double(double)>& base, const std::vector<SeedFunction>& seeds,
                         double x) {
    Jet w = wronskian(seeds, x, 2).jet;
    if (w[0] == 0.0) throw SingularityError("seed Wronskian vanishes", x);
    if (w[0] < 0.0) w *= -1.0;
    return base(x) - 2.0 * jet_log_d2(w);
}

namespace {

GenericAmResult am_from_f(const std::function<double(double)>& base, const std::vector<SeedFunction>& seeds,
                          double sign, const OverlapJet& f_entry, double x, int order, const SeedFunction* target,
                          const TargetOverlapJet& target_overlaps) {
    const std::size_t m = seeds.size();
    const int ord = std::max(order, 2);
    const int n = static_cast<int>(m);

    JetMatrix f(n, x, ord);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t l = 0; l < m; ++l) f(static_cast<int>(j), static_cast<int>(l)) = f_entry(j, l, x, ord);

    // Positive definiteness of the constant-term matrix, by Cholesky.
    std::vector<double> chol(m * m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t l = 0; l <= j; ++l) {
            double s = f(static_cast<int>(j), static_cast<int>(l))[0];
            for (std::size_t p = 0; p < l; ++p) s -= chol[j * m + p] * chol[l * m + p];
            if (j == l) {
                if (!(s > 0.0)) throw SingularityError("F_M is not positive definite", x);
                chol[j * m + j] = std::sqrt(s);
            } else {
                chol[j * m + l] = s / chol[l * m + l];
            }
        }
    }

    GenericAmResult out;
    out.det_f = m ? determinant(f) : Jet::constant(1.0, x, ord);
    out.potential = base(x) - 2.0 * jet_log_d2(out.det_f);
    if (target) {
        if (!target_overlaps) throw UsageError("generic_am: target given without its overlaps");
        std::vector<Jet> rhs;
        for (std::size_t l = 0; l < m; ++l) rhs.push_back(target_overlaps(l, x, ord));
        const std::vector<Jet> y = m ? solve(f, rhs) : std::vector<Jet>{};
        Jet psi = target->evaluate(x, ord).expanded();
        for (std::size_t j = 0; j < m; ++j) psi -= seeds[j].evaluate(x, ord).expanded() * y[j] * sign;
        out.target = truncate(psi, order);
    }
    return out;
}

}  // namespace

GenericAmResult generic_am(const std::function<double(double)>& base, const std::vector<SeedFunction>& seeds,
                           AmMode mode, const std::vector<double>& e, const OverlapJet& overlaps, double x,
                           int order, const SeedFunction* target, const TargetOverlapJet& target_overlaps) {
    if (e.size() != seeds.size()) throw UsageError("generic_am: need one e per seed");
    for (double ej : e) {
        if (!(ej > 0.0)) throw ValidationError("generic_am: e_j must be positive");
    }
    const double sign = mode == AmMode::add ? 1.0 : -1.0;
    const OverlapJet entry = [&](std::size_t j, std::size_t l, double y, int ord) {
        Jet v = overlaps(j, l, y, ord) * sign;
        if (j == l) v += e[j];
        return v;
    };
    return am_from_f(base, seeds, sign, entry, x, order, target, target_overlaps);
}

GenericAmResult generic_am_deletion(const std::function<double(double)>& base,
                                    const std::vector<SeedFunction>& seeds, const OverlapJet& tails, double x,
                                    int order, const SeedFunction* target, const TargetOverlapJet& target_overlaps) {
    return am_from_f(base, seeds, -1.0, tails, x, order, target, target_overlaps);
}

OverlapJet soliton_tails(const SolitonConfig& cfg, const std::vector<int>& indices, bool normalized) {
    const std::vector<double> c = apply_time_flows(cfg).c;
    return [cfg, indices, normalized, c](std::size_t j, std::size_t l, double x, int order) {
        const int a = indices.at(j);
        const int b = indices.at(l);
        Jet v = inner_tail_jet(cfg, a, b, x, order).expanded();
        if (normalized) v *= std::sqrt(c[static_cast<std::size_t>(a - 1)] * c[static_cast<std::size_t>(b - 1)]);
        return v;
    };
}

OverlapJet soliton_overlaps(const SolitonConfig& cfg, const std::vector<int>& indices, bool normalized) {
    const std::vector<double> c = apply_time_flows(cfg).c;
    return [cfg, indices, normalized, c](std::size_t j, std::size_t l, double x, int order) {
        const int a = indices.at(j);
        const int b = indices.at(l);
        // <phi_a, phi_b>(x) = (phi_a, phi_b) - tail_ab(x), with (phi_a, phi_b) = delta_ab / c_a.
        Jet v = inner_tail_jet(cfg, a, b, x, order).expanded() * -1.0;
        const double ca = c[static_cast<std::size_t>(a - 1)];
        const double cb = c[static_cast<std::size_t>(b - 1)];
        if (a == b) v += 1.0 / ca;
        if (normalized) v *= std::sqrt(ca * cb);
        return v;
    };
}

OverlapJet quadrature_overlaps(const std::vector<SeedFunction>& seeds, double lower, double tol) {
    return [seeds, lower, tol](std::size_t j, std::size_t l, double x, int order) {
        const SeedFunction& fj = seeds.at(j);
        const SeedFunction& fl = seeds.at(l);
        auto integrand = [&](double y) {
            return fj.evaluate(y, 0).expanded()[0] * fl.evaluate(y, 0).expanded()[0];
        };
        Jet v = Jet::constant(quadrature(integrand, lower, x, tol), x, order);
        if (order > 0) {
            const Jet prod = fj.evaluate(x, order - 1).expanded() * fl.evaluate(x, order - 1).expanded();
            for (int n = 0; n < order; ++n) v[n + 1] = prod[n] / (n + 1);
        }
        return v;
    };
}

std::vector<double> soliton_norms(const SolitonConfig& cfg, const std::vector<int>& indices, bool normalized) {
    const std::vector<double> c = apply_time_flows(cfg).c;
    std::vector<double> out;
    for (int a : indices) {
        if (a < 1 || a > cfg.size()) throw UsageError("soliton_norms: index out of range");
        out.push_back(normalized ? 1.0 : 1.0 / c[static_cast<std::size_t>(a - 1)]);
    }
    return out;
}

}  // namespace refl

#include "reflectionless/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>
#include <lapacke.h>

#include "reflectionless/errors.hpp"

namespace refl {

SpectrumResult bound_spectrum(const Potential& u, double halfwidth, double grid_step) {
    if (!(halfwidth > 0.0) || !(grid_step > 0.0) || grid_step >= halfwidth)
        throw UsageError("bound_spectrum: need 0 < grid_step < halfwidth");
    for (double end : {-halfwidth, halfwidth}) {
        if (!(std::abs(u(end)) < 1e-8)) {
            std::ostringstream os;
            os << "domain too small: |U(" << end << ")| = " << std::abs(u(end)) << " >= 1e-8";
            throw DomainError(os.str());
        }
    }
    const auto n = static_cast<lapack_int>(std::llround(2.0 * halfwidth / grid_step)) - 1;
    const double h = 2.0 * halfwidth / static_cast<double>(n + 1);
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> off(static_cast<std::size_t>(std::max<lapack_int>(n - 1, 1)), -1.0 / (h * h));
    double lowest = 0.0;
    for (lapack_int i = 0; i < n; ++i) {
        const double ui = u(-halfwidth + h * static_cast<double>(i + 1));
        diag[static_cast<std::size_t>(i)] = 2.0 / (h * h) + ui;
        lowest = std::min(lowest, ui);
    }
    SpectrumResult out;
    out.grid_step = h;
    out.domain_halfwidth = halfwidth;
    if (lowest >= 0.0) return out;  // no eigenvalue below min U

    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> iblock(static_cast<std::size_t>(n)), isplit(static_cast<std::size_t>(n));
    lapack_int found = 0, nsplit = 0;
    const lapack_int info =
        LAPACKE_dstebz('V', 'E', n, lowest - 1.0, 0.0, 0, 0, 0.0, diag.data(), off.data(), &found, &nsplit,
                       w.data(), iblock.data(), isplit.data());
    if (info != 0) throw SolverError("tridiagonal bisection failed, info = " + std::to_string(info));
    out.energies.assign(w.begin(), w.begin() + found);
    std::erase_if(out.energies, [](double e) { return !(e < 0.0); });
    return out;
}

SpectrumResult bound_spectrum(const SolitonConfig& cfg, double grid_step) {
    auto u = [&cfg](double x) { return potential(cfg, x); };
    double half = cfg.size() ? 12.0 / cfg.k.front() : 12.0;
    while (std::abs(u(half)) >= 1e-8 || std::abs(u(-half)) >= 1e-8) {
        half *= 1.25;
        if (half > 1e4) throw DomainError("bound_spectrum: potential does not decay within |x| < 1e4");
    }
    return bound_spectrum(u, half, grid_step);
}

ScatteringResult scatter(const Potential& u, double k, const ScatterOptions& opts) {
    namespace ode = boost::numeric::odeint;
    if (!(k > 0.0)) throw UsageError("scatter: k must be positive");
    double half = opts.halfwidth;
    if (half <= 0.0) {
        half = 10.0;
        while (std::abs(u(half)) >= opts.decay_tol || std::abs(u(-half)) >= opts.decay_tol) {
            half *= 1.25;
            if (half > 1e4) throw DomainError("scatter: potential does not decay within |x| < 1e4");
        }
    }

    // state: Re psi, Im psi, Re psi', Im psi'
    using State = std::array<double, 4>;
    const double k2 = k * k;
    auto rhs = [&u, k2](const State& s, State& ds, double x) {
        const double q = u(x) - k2;
        ds[0] = s[2];
        ds[1] = s[3];
        ds[2] = q * s[0];
        ds[3] = q * s[1];
    };
    const std::complex<double> ik(0.0, k);
    const std::complex<double> right = std::exp(ik * half);
    const std::complex<double> right_d = ik * right;
    State s{right.real(), right.imag(), right_d.real(), right_d.imag()};

    std::size_t steps = 0;
    constexpr std::size_t kMaxSteps = 10'000'000;
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(opts.rk_tol, opts.rk_tol);
    try {
        steps = ode::integrate_adaptive(stepper, rhs, s, half, -half, -0.01, [&](const State&, double) {
            if (++steps > kMaxSteps) throw SolverError("scatter: step budget exhausted");
        });
    } catch (const SolverError& e) {
        std::ostringstream os;
        os << e.what() << " (k=" << k << ", halfwidth=" << half << ", steps=" << steps << ")";
        throw SolverError(os.str());
    } catch (const std::exception& e) {
        std::ostringstream os;
        os << "scatter: integration failed after " << steps << " steps: " << e.what();
        throw SolverError(os.str());
    }

    const std::complex<double> psi(s[0], s[1]);
    const std::complex<double> dpsi(s[2], s[3]);
    const double xl = -half;
    const std::complex<double> a = (ik * psi + dpsi) / (2.0 * ik) * std::exp(-ik * xl);
    const std::complex<double> b = (ik * psi - dpsi) / (2.0 * ik) * std::exp(ik * xl);
    if (std::abs(a) == 0.0) throw SolverError("scatter: incident amplitude vanished");

    ScatteringResult out;
    out.k = k;
    out.transmission_amp = 1.0 / a;
    out.reflection_amp = b / a;
    out.unitarity_defect = std::abs(std::norm(out.reflection_amp) + std::norm(out.transmission_amp) - 1.0);
    out.halfwidth = half;
    out.steps = steps;
    return out;
}

std::complex<double> reflectionless_transmission(const std::vector<double>& kappa, double k) {
    std::complex<double> t(1.0, 0.0);
    const std::complex<double> ik(0.0, k);
    for (double kj : kappa) t *= (ik - kj) / (ik + kj);
    return t;
}

double quadrature(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double err = 0.0, l1 = 0.0;
    const double v =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 30, tol, &err, &l1);
    if (!std::isfinite(v) || err > tol * std::max(1.0, l1)) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << a << ", " << b << "]: error estimate " << err;
        throw SolverError(os.str());
    }
    return v;
}

double quadrature_line(const std::function<double(double)>& f, double start, double tol) {
    if (!(start > 0.0)) throw UsageError("quadrature_line: start must be positive");
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) peak = std::max(peak, std::abs(f(-start + start * i / 1000.0)));
    if (peak == 0.0) return 0.0;
    auto negligible = [&](double x) {
        for (double s : {1.0, 0.97, 0.93}) {
            if (std::abs(f(x * s)) >= 1e-14 * peak) return false;
        }
        return true;
    };
    double lo = -start, hi = start;
    while (!negligible(lo)) {
        lo *= 1.5;
        if (lo < -1e6) throw DomainError("quadrature_line: integrand does not decay at -infinity");
    }
    while (!negligible(hi)) {
        hi *= 1.5;
        if (hi > 1e6) throw DomainError("quadrature_line: integrand does not decay at +infinity");
    }
    // split at the old ends so the bulk is not missed
    return quadrature(f, lo, -start, tol) + quadrature(f, -start, start, tol) + quadrature(f, start, hi, tol);
}

namespace {

SolitonConfig shifted(const SolitonConfig& cfg, double t) {
    SolitonConfig out = cfg;
    out.times[3] += t;
    return out;
}

}  // namespace

double kdv_residual(const SolitonConfig& cfg, double x, double t) {
    if (cfg.size() == 0) return 0.0;
    const SolitonConfig at = shifted(cfg, t);
    const Jet uj = potential_jet(at, x, 3);
    return std::abs(dt_potential(at, x) - 6.0 * uj[0] * uj[1] + uj.derivative(3));
}

double dt_potential_fd(const SolitonConfig& cfg, double x, double h) {
    return (potential(shifted(cfg, h), x) - potential(shifted(cfg, -h), x)) / (2.0 * h);
}

PhaseShiftReport phase_shift_check(const SolitonConfig& cfg, double big_t) {
    if (cfg.size() != 2) throw UsageError("phase_shift_check needs N = 2");
    if (!(big_t > 0.0)) throw UsageError("phase_shift_check: T must be positive");
    const double k1 = cfg.k[0], k2 = cfg.k[1];
    const double a12 = std::log((k2 - k1) * (k2 - k1) / ((k2 + k1) * (k2 + k1)));

    PhaseShiftReport rep;
    rep.expected_shift_fast = a12 / (2.0 * k2);
    rep.expected_shift_slow = a12 / (2.0 * k1);
    // expected[soliton][time]
    const double expected[2][2] = {{0.0, rep.expected_shift_slow}, {rep.expected_shift_fast, 0.0}};

    const double times[2] = {-big_t, big_t};
    for (int ti = 0; ti < 2; ++ti) {
        const SolitonConfig at = shifted(cfg, times[ti]);
        const SolitonConfig flowed = apply_time_flows(at);
        double free_center[2];
        for (int j = 0; j < 2; ++j)
            free_center[j] = std::log(flowed.c[static_cast<std::size_t>(j)] / (2.0 * cfg.k[static_cast<std::size_t>(j)])) /
                             (2.0 * cfg.k[static_cast<std::size_t>(j)]);
        if (std::abs(free_center[0] - free_center[1]) < 5.0 / k1) {
            std::ostringstream os;
            os << "T too small: soliton centers " << std::abs(free_center[0] - free_center[1]) << " apart at t="
               << times[ti] << ", need 5/k1 = " << 5.0 / k1;
            throw DomainError(os.str());
        }
        auto u = [&at](double x) { return potential(at, x); };
        for (int j = 0; j < 2; ++j) {
            const double guess = free_center[j] + expected[j][ti];
            const double w = 2.0 / cfg.k[static_cast<std::size_t>(j)];
            const auto [xmin, umin] = boost::math::tools::brent_find_minima(u, guess - w, guess + w, 26);
            (void)umin;
            rep.measured[j][ti] = xmin - free_center[j];
            rep.max_deviation = std::max(rep.max_deviation, std::abs(rep.measured[j][ti] - expected[j][ti]));
        }
    }
    return rep;
}

}  // namespace refl

#include "reflectionless/jet.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <utility>

#include "reflectionless/errors.hpp"

namespace refl {

Jet::Jet(double center, std::vector<double> coeffs) : center_(center), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw UsageError("jet needs at least one coefficient");
}

Jet Jet::constant(double value, double center, int order) {
    if (order < 0) throw UsageError("jet order must be non-negative");
    std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
    c[0] = value;
    return Jet(center, std::move(c));
}

Jet Jet::variable(double center, int order) {
    Jet j = constant(center, center, order);
    if (order >= 1) j[1] = 1.0;
    return j;
}

double Jet::derivative(int n) const {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f * (*this)[n];
}

void Jet::require_compatible(const Jet& other) const {
    if (center_ != other.center_ || coeffs_.size() != other.coeffs_.size()) {
        std::ostringstream os;
        os << "jet mismatch: center " << center_ << " order " << order() << " vs center "
           << other.center_ << " order " << other.order();
        throw UsageError(os.str());
    }
}

Jet& Jet::operator+=(const Jet& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& other) {
    require_compatible(other);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

Jet& Jet::operator*=(const Jet& other) {
    require_compatible(other);
    // Cauchy product, descending so lower coefficients are still unmodified.
    for (std::size_t n = coeffs_.size(); n-- > 0;) {
        double s = 0.0;
        for (std::size_t i = 0; i <= n; ++i) s += coeffs_[i] * other.coeffs_[n - i];
        coeffs_[n] = s;
    }
    return *this;
}

Jet& Jet::operator/=(const Jet& other) {
    *this = divide(*this, other);
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
}

Jet& Jet::operator+=(double s) {
    coeffs_[0] += s;
    return *this;
}

Jet Jet::operator-() const {
    Jet r = *this;
    r *= -1.0;
    return r;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(const Jet& a, const Jet& b) {
    Jet r = a;
    r *= b;
    return r;
}
Jet operator/(const Jet& a, const Jet& b) { return divide(a, b); }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator+(Jet a, double s) { return a += s; }

Jet divide(const Jet& a, const Jet& b, double threshold) {
    if (a.center() != b.center() || a.order() != b.order()) {
        throw UsageError("jet mismatch in division");
    }
    const double b0 = b[0];
    if (!(std::abs(b0) >= threshold)) {
        std::ostringstream os;
        os << "division by singular jet at x=" << b.center() << " (|b0|=" << std::abs(b0) << ")";
        throw SingularityError(os.str(), b.center());
    }
    const int k = a.order();
    Jet c = Jet::constant(0.0, a.center(), k);
    for (int n = 0; n <= k; ++n) {
        double s = a[n];
        for (int i = 1; i <= n; ++i) s -= b[i] * c[n - i];
        c[n] = s / b0;
    }
    return c;
}

Jet jet_exp(double rate, double x0, int order) {
    Jet j = jet_exp_shape(rate, x0, order);
    j *= std::exp(rate * x0);
    return j;
}

Jet jet_exp_shape(double rate, double x0, int order) {
    Jet j = Jet::constant(1.0, x0, order);
    for (int n = 1; n <= order; ++n) j[n] = j[n - 1] * rate / n;
    return j;
}

double jet_log_d2(const Jet& a) {
    if (a.order() < 2) throw UsageError("jet_log_d2 needs order >= 2");
    if (!(a[0] > 0.0)) {
        std::ostringstream os;
        os << "log of non-positive jet at x=" << a.center() << " (a0=" << a[0] << ")";
        throw DomainError(os.str());
    }
    const double r1 = a[1] / a[0];
    const double r2 = a[2] / a[0];
    return 2.0 * r2 - r1 * r1;
}

Jet differentiate(const Jet& a) {
    if (a.order() < 1) throw UsageError("cannot differentiate an order-0 jet");
    std::vector<double> c(static_cast<std::size_t>(a.order()));
    for (int n = 0; n < a.order(); ++n) c[static_cast<std::size_t>(n)] = (n + 1) * a[n + 1];
    return Jet(a.center(), std::move(c));
}

Jet truncate(const Jet& a, int order) {
    if (order < 0 || order > a.order()) throw UsageError("truncate: order out of range");
    std::vector<double> c(a.coeffs().begin(), a.coeffs().begin() + order + 1);
    return Jet(a.center(), std::move(c));
}

Jet ScaledJet::expanded() const {
    Jet r = jet;
    r *= std::exp(log_scale);
    return r;
}

ScaledJet operator*(const ScaledJet& a, const ScaledJet& b) {
    return {a.jet * b.jet, a.log_scale + b.log_scale};
}

ScaledJet operator/(const ScaledJet& a, const ScaledJet& b) {
    return {a.jet / b.jet, a.log_scale - b.log_scale};
}

JetMatrix::JetMatrix(int n, double center, int order)
    : n_(n), center_(center), order_(order),
      data_(static_cast<std::size_t>(n * n), Jet::constant(0.0, center, order)) {
    if (n < 0) throw UsageError("negative matrix size");
}

Jet determinant_laplace(const JetMatrix& m) {
    const int n = m.size();
    if (n == 0) return Jet::constant(1.0, m.center(), m.order());
    if (n > 20) throw UsageError("cofactor expansion limited to n <= 20");
    // dp[mask]: signed sum over placements of the first popcount(mask) rows
    // into the columns in mask.
    const std::size_t full = (std::size_t{1} << n) - 1;
    std::vector<Jet> dp(full + 1, Jet::constant(0.0, m.center(), m.order()));
    std::vector<bool> live(full + 1, false);
    dp[0] = Jet::constant(1.0, m.center(), m.order());
    live[0] = true;
    for (std::size_t mask = 0; mask < full; ++mask) {
        if (!live[mask]) continue;
        const int row = std::popcount(mask);
        for (int col = 0; col < n; ++col) {
            const std::size_t bit = std::size_t{1} << col;
            if (mask & bit) continue;
            const int inversions = std::popcount(mask >> (col + 1));
            Jet term = dp[mask] * m(row, col);
            if (inversions % 2) term *= -1.0;
            dp[mask | bit] += term;
            live[mask | bit] = true;
        }
    }
    return dp[full];
}

namespace {

Jet determinant_lu(JetMatrix a) {
    const int n = a.size();
    Jet det = Jet::constant(1.0, a.center(), a.order());
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        for (int r = k + 1; r < n; ++r) {
            if (std::abs(a(r, k)[0]) > std::abs(a(pivot, k)[0])) pivot = r;
        }
        if (!(std::abs(a(pivot, k)[0]) >= kSingularJetThreshold)) {
            // Constant-term pivot vanished; the jet determinant may still be
            // well defined, which cofactor expansion handles.
            return determinant_laplace(a);
        }
        if (pivot != k) {
            for (int c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
            det *= -1.0;
        }
        det *= a(k, k);
        for (int r = k + 1; r < n; ++r) {
            const Jet factor = a(r, k) / a(k, k);
            for (int c = k + 1; c < n; ++c) a(r, c) -= factor * a(k, c);
        }
    }
    return det;
}

}  // namespace

std::vector<Jet> solve(JetMatrix a, std::vector<Jet> b) {
    const int n = a.size();
    if (static_cast<int>(b.size()) != n) throw UsageError("solve: right-hand side size mismatch");
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        for (int r = k + 1; r < n; ++r) {
            if (std::abs(a(r, k)[0]) > std::abs(a(pivot, k)[0])) pivot = r;
        }
        if (!(std::abs(a(pivot, k)[0]) >= kSingularJetThreshold)) {
            throw SingularityError("solve: singular jet matrix", a.center());
        }
        if (pivot != k) {
            for (int c = 0; c < n; ++c) std::swap(a(k, c), a(pivot, c));
            std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(pivot)]);
        }
        for (int r = k + 1; r < n; ++r) {
            const Jet factor = a(r, k) / a(k, k);
            for (int c = k + 1; c < n; ++c) a(r, c) -= factor * a(k, c);
            b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(k)];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        Jet s = b[static_cast<std::size_t>(k)];
        for (int c = k + 1; c < n; ++c) s -= a(k, c) * b[static_cast<std::size_t>(c)];
        b[static_cast<std::size_t>(k)] = s / a(k, k);
    }
    return b;
}

Jet determinant(const JetMatrix& m) {
    if (m.size() <= 6) return determinant_laplace(m);
    return determinant_lu(m);
}

}  // namespace refl

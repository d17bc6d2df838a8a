#pragma once

#include <span>
#include <vector>

namespace refl {

/// Truncated Taylor expansion of a scalar function about `center`.
///
/// coeffs()[n] holds f^(n)(center) / n!. All arithmetic between jets keeps
/// the order fixed and silently drops terms above it; the retained
/// coefficients are exact.
class Jet {
public:
    Jet() = default;
    Jet(double center, std::vector<double> coeffs);

    static Jet constant(double value, double center, int order);
    /// The identity function x, expanded about `center`.
    static Jet variable(double center, int order);

    double center() const { return center_; }
    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const { return coeffs_; }
    double operator[](int n) const { return coeffs_[static_cast<std::size_t>(n)]; }
    double& operator[](int n) { return coeffs_[static_cast<std::size_t>(n)]; }
    double value() const { return coeffs_.front(); }
    /// n-th derivative at the center, n! * coeffs[n].
    double derivative(int n) const;

    Jet& operator+=(const Jet& other);
    Jet& operator-=(const Jet& other);
    Jet& operator*=(const Jet& other);
    Jet& operator/=(const Jet& other);
    Jet& operator*=(double s);
    Jet& operator+=(double s);

    Jet operator-() const;

private:
    void require_compatible(const Jet& other) const;

    double center_ = 0.0;
    std::vector<double> coeffs_{0.0};
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator+(Jet a, double s);

/// |b0| below this is treated as a zero of the divisor.
inline constexpr double kSingularJetThreshold = 1e-300;

/// Quotient a/b through the common order; throws SingularityError when the
/// constant term of b is below `threshold` in magnitude.
Jet divide(const Jet& a, const Jet& b, double threshold = kSingularJetThreshold);

/// Jet of exp(rate * x) about x0.
Jet jet_exp(double rate, double x0, int order);

/// Jet of exp(rate * (x - x0)) about x0; never overflows.
Jet jet_exp_shape(double rate, double x0, int order);

/// Second derivative of log(a) at the center: 2 a2/a0 - (a1/a0)^2.
double jet_log_d2(const Jet& a);

/// Jet of f' about the same center, one order lower.
Jet differentiate(const Jet& a);

/// Keep coefficients 0..order.
Jet truncate(const Jet& a, int order);

/// Jet carrying a separate exponent: the represented function is
/// exp(log_scale) * jet. Products of such values add exponents, which keeps
/// quantities like exp(k x) * (bounded) representable far from the origin.
struct ScaledJet {
    Jet jet;
    double log_scale = 0.0;

    /// Collapse the exponent into the coefficients (may under/overflow).
    Jet expanded() const;
};

ScaledJet operator*(const ScaledJet& a, const ScaledJet& b);
ScaledJet operator/(const ScaledJet& a, const ScaledJet& b);

/// Square matrix of jets, row-major.
class JetMatrix {
public:
    JetMatrix(int n, double center, int order);

    int size() const { return n_; }
    Jet& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * n_ + c)]; }
    const Jet& operator()(int r, int c) const {
        return data_[static_cast<std::size_t>(r * n_ + c)];
    }
    double center() const { return center_; }
    int order() const { return order_; }

private:
    int n_;
    double center_;
    int order_;
    std::vector<Jet> data_;
};

/// Determinant over jet entries. Laplace (cofactor) expansion for n <= 6,
/// LU with partial pivoting on the constant terms above that.
Jet determinant(const JetMatrix& m);

/// Cofactor expansion regardless of size; exponential cost.
Jet determinant_laplace(const JetMatrix& m);

/// Solve a x = b over jets by elimination with partial pivoting on the
/// constant terms.
std::vector<Jet> solve(JetMatrix a, std::vector<Jet> b);

}  // namespace refl

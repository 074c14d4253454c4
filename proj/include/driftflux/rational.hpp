#ifndef DRIFTFLUX_RATIONAL_HPP
#define DRIFTFLUX_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfx {

// Exact rational arithmetic on 64-bit numerator/denominator, normalized with
// den > 0 and gcd(|num|, den) = 1. Intermediate products go through __int128;
// anything that cannot be renormalized back into 64 bits throws.
class Rational {
public:
    constexpr Rational() = default;
    Rational(long long n) : num_(n), den_(1) {}
    Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    bool is_zero() const { return num_ == 0; }

    Rational operator-() const { return Rational(-num_, den_, already_normalized_tag{}); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    using i128 = __int128;
    struct already_normalized_tag {};
    Rational(long long n, long long d, already_normalized_tag) : num_(n), den_(d) {}

    static Rational from128(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw std::overflow_error("Rational: 64-bit overflow");
        return Rational(static_cast<long long>(n), static_cast<long long>(d), already_normalized_tag{});
    }
    static i128 gcd128(i128 a, i128 b) {
        while (b != 0) { i128 t = a % b; a = b; b = t; }
        return a;
    }
    void normalize() { *this = from128(num_, den_); }

    long long num_ = 0;
    long long den_ = 1;
};

// Polynomial in one variable with rational coefficients, coeffs_[k] on w^k.
// Zero polynomial has an empty coefficient list.
class Poly {
public:
    Poly() = default;
    Poly(Rational constant) { if (!constant.is_zero()) coeffs_ = {constant}; }
    explicit Poly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Poly monomial(Rational c, int degree) {
        if (c.is_zero()) return {};
        std::vector<Rational> v(static_cast<size_t>(degree) + 1);
        v.back() = c;
        return Poly(std::move(v));
    }
    static Poly variable() { return monomial(Rational(1), 1); }

    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }
    int degree() const { return coeffs_.empty() ? -1 : static_cast<int>(coeffs_.size()) - 1; }
    Rational coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<size_t>(k)] : Rational();
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<Rational> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return Poly(std::move(v));
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        std::vector<Rational> v(std::max(a.coeffs_.size(), b.coeffs_.size()));
        for (size_t i = 0; i < v.size(); ++i) v[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
        return Poly(std::move(v));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> v(a.coeffs_.size() + b.coeffs_.size() - 1);
        for (size_t i = 0; i < a.coeffs_.size(); ++i)
            for (size_t j = 0; j < b.coeffs_.size(); ++j)
                v[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Poly(std::move(v));
    }
    friend Poly operator*(const Rational& c, const Poly& p) { return Poly(Rational(c)) * p; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    Poly derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<Rational> v(coeffs_.size() - 1);
        for (size_t k = 1; k < coeffs_.size(); ++k) v[k - 1] = Rational(static_cast<long long>(k)) * coeffs_[k];
        return Poly(std::move(v));
    }

    Rational eval(const Rational& x) const {
        Rational r;
        for (size_t k = coeffs_.size(); k-- > 0;) r = r * x + coeffs_[k];
        return r;
    }
    double eval(double x) const {
        double r = 0;
        for (size_t k = coeffs_.size(); k-- > 0;) r = r * x + coeffs_[k].to_double();
        return r;
    }

    // Substitution w -> alpha*w + beta, exact.
    Poly compose_affine(const Rational& alpha, const Rational& beta) const {
        Poly arg = Poly::monomial(alpha, 1) + Poly(beta);
        Poly r, pw(Rational(1));
        for (size_t k = 0; k < coeffs_.size(); ++k) {
            r = r + coeffs_[k] * pw;
            pw = pw * arg;
        }
        return r;
    }

    std::string str() const {
        if (is_zero()) return "0";
        std::string s;
        for (size_t k = coeffs_.size(); k-- > 0;) {
            const Rational& c = coeffs_[k];
            if (c.is_zero()) continue;
            const bool neg = c < Rational();
            const Rational mag = neg ? -c : c;
            if (s.empty()) s += neg ? "-" : "";
            else s += neg ? " - " : " + ";
            if (k == 0) { s += mag.str(); continue; }
            if (mag != Rational(1)) s += mag.str() + "*";
            s += "w";
            if (k > 1) s += "^" + std::to_string(k);
        }
        return s;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }
    std::vector<Rational> coeffs_;
};

}  // namespace dfx

#endif

#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace freeprod {

using Rational = mpq_class;

/// Exact complex number with rational real and imaginary parts.
class Complex {
public:
    Complex() = default;
    Complex(long value) : re_(value), im_(0) {}
    Complex(Rational re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }
    Complex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    const Rational& re() const noexcept { return re_; }
    const Rational& im() const noexcept { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }

    Complex conj() const { return Complex(re_, -im_); }
    /// |z|^2
    Rational norm2() const { return Rational(re_ * re_ + im_ * im_); }

    Complex& operator+=(const Complex& o);
    Complex& operator-=(const Complex& o);
    Complex& operator*=(const Complex& o);
    Complex& operator/=(const Complex& o);

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator-(const Complex& a) { return Complex(-a.re_, -a.im_); }

    friend bool operator==(const Complex& a, const Complex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    Rational re_{0};
    Rational im_{0};
};

/// Parses "3", "-3/2", "0.125", "-.5" into a canonical rational.
Rational parse_rational(std::string_view text);

/// Parses "re", "im i", "re+im i" or "re-im i" with rational or decimal
/// parts. Whitespace is ignored; "i" alone stands for 1 i.
Complex parse_scalar(std::string_view text);

/// "-3/2", "1/2+1/3 i", "-2 i"; zero prints as "0".
std::string to_string(const Rational& q);
std::string to_string(const Complex& z);

} // namespace freeprod

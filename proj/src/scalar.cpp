#include "freeprod/scalar.hpp"

#include "freeprod/errors.hpp"

#include <algorithm>
#include <cctype>

namespace freeprod {

Complex& Complex::operator+=(const Complex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

Complex& Complex::operator-=(const Complex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

Complex& Complex::operator*=(const Complex& o) {
    if (o.is_real()) {
        re_ *= o.re_;
        im_ *= o.re_;
        return *this;
    }
    Rational re = re_ * o.re_ - im_ * o.im_;
    Rational im = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

Complex& Complex::operator/=(const Complex& o) {
    if (o.is_zero()) {
        throw std::domain_error("complex division by zero");
    }
    const Rational d = o.norm2();
    return *this *= Complex(Rational(o.re_ / d), Rational(-o.im_ / d));
}

namespace {

std::string strip(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
        }
    }
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
}

} // namespace

Rational parse_rational(std::string_view raw) {
    const std::string text = strip(raw);
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    Rational value;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = s.substr(0, slash);
        const auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            throw ParseError("invalid rational '" + std::string(raw) + "'");
        }
        const mpz_class d(std::string(den), 10);
        if (d == 0) {
            throw ParseError("zero denominator in '" + std::string(raw) + "'");
        }
        value = Rational(mpz_class(std::string(num), 10), d);
        value.canonicalize();
    } else {
        const auto dot = s.find('.');
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
            (!frac.empty() && !all_digits(frac)) || (dot != std::string_view::npos && frac.empty())) {
            throw ParseError("invalid number '" + std::string(raw) + "'");
        }
        const mpz_class num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        value = Rational(num, den);
        value.canonicalize();
    }
    return negative ? Rational(-value) : value;
}

Complex parse_scalar(std::string_view raw) {
    const std::string text = strip(raw);
    if (text.empty()) {
        throw ParseError("empty scalar");
    }
    if (text.back() != 'i') {
        return Complex(parse_rational(text));
    }
    std::string_view body(text.data(), text.size() - 1);
    // Split at the last sign that is not the leading one.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if (body[k] == '+' || body[k] == '-') {
            split = k;
            break;
        }
    }
    auto imaginary = [&](std::string_view part) -> Rational {
        if (part.empty() || part == "+") {
            return Rational(1);
        }
        if (part == "-") {
            return Rational(-1);
        }
        return parse_rational(part);
    };
    if (split == std::string_view::npos) {
        return Complex(Rational(0), imaginary(body));
    }
    return Complex(parse_rational(body.substr(0, split)), imaginary(body.substr(split)));
}

std::string to_string(const Rational& q) {
    return q.get_str();
}

std::string to_string(const Complex& z) {
    if (z.is_real()) {
        return to_string(z.re());
    }
    const std::string im = to_string(z.im()) + " i";
    if (sgn(z.re()) == 0) {
        return im;
    }
    return to_string(z.re()) + (sgn(z.im()) > 0 ? "+" : "") + im;
}

} // namespace freeprod

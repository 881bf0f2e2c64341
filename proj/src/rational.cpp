#include "bsynth/rational.hpp"

#include <cctype>

#include "bsynth/error.hpp"

namespace bsynth {

std::string to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    Rational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) {
            throw Error(ErrorKind::ParseError, "bad rational '" + std::string(text) + "'");
        }
        Integer d{std::string(den)};
        if (d == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
        value = Rational(Integer(std::string(num)), d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto whole = s.substr(0, dot);
        auto frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) {
            throw Error(ErrorKind::ParseError, "bad decimal '" + std::string(text) + "'");
        }
        Integer num(std::string(whole.empty() ? "0" : whole) + std::string(frac));
        value = Rational(num, power(10, frac.size()));
    } else {
        if (!all_digits(s)) throw Error(ErrorKind::ParseError, "bad number '" + std::string(text) + "'");
        value = Rational(Integer(std::string(s)));
    }
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Integer lcm(const Integer& a, const Integer& b) {
    Integer out;
    mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return out;
}

Integer power(std::uint64_t n, std::uint64_t k) {
    Integer out;
    mpz_ui_pow_ui(out.get_mpz_t(), n, k);
    return out;
}

Integer falling_factorial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    Integer out = 1;
    for (std::uint64_t i = 0; i < k; ++i) out *= static_cast<unsigned long>(n - i);
    return out;
}

Integer factorial(std::uint64_t n) {
    Integer out;
    mpz_fac_ui(out.get_mpz_t(), n);
    return out;
}

Rational round_to_grid(const Rational& q, const Integer& grid) {
    // floor(q * grid + 1/2) for q >= 0, mirrored for negatives.
    Rational scaled = abs(q) * grid + Rational(1, 2);
    Integer whole;
    mpz_fdiv_q(whole.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    Rational out(whole, grid);
    out.canonicalize();
    return q < 0 ? Rational(-out) : out;
}

Rational limit_denominator(const Rational& q, const Integer& max_denominator) {
    if (q.get_den() <= max_denominator) return q;
    if (q < 0) return -limit_denominator(-q, max_denominator);
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    Integer n = q.get_num(), d = q.get_den();
    while (true) {
        Integer a = n / d;
        Integer q2 = q0 + a * q1;
        if (q2 > max_denominator) break;
        Integer p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        Integer rest = n - a * d;
        n = d;
        d = rest;
    }
    Integer k = (max_denominator - q0) / q1;
    Rational semi(p0 + k * p1, q0 + k * q1);
    Rational conv(p1, q1);
    semi.canonicalize();
    conv.canonicalize();
    return abs(conv - q) <= abs(semi - q) ? conv : semi;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace bsynth

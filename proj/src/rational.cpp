#include "mqrank/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "mqrank/errors.hpp"

namespace mqrank {

namespace {

mpz_class pow10(unsigned long exponent) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), 10, exponent);
    return out;
}

Rational parse_decimal(std::string_view text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw InputError("not a number: '" + std::string(text) + "'");

    long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        const auto* first = text.data() + pos;
        const auto* last = text.data() + text.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, exponent);
        if (ec != std::errc() || ptr != last) {
            throw InputError("bad exponent in '" + std::string(text) + "'");
        }
        pos = text.size();
    }
    if (pos != text.size()) throw InputError("trailing characters in '" + std::string(text) + "'");

    mpz_class numerator(digits, 10);
    if (negative) numerator = -numerator;
    const long shift = exponent - frac_digits;
    Rational out;
    if (shift >= 0) {
        out = Rational(numerator * pow10(static_cast<unsigned long>(shift)));
    } else {
        out = Rational(numerator, pow10(static_cast<unsigned long>(-shift)));
        out.canonicalize();
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);
    const Rational num = parse_decimal(text.substr(0, slash));
    const Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
    Rational out = num / den;
    return out;
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) throw InputError("non-finite number");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw InputError("cannot format number");
    return parse_decimal(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

std::string to_string(const Rational& value) {
    return value.get_str();
}

double to_double(const Rational& value) {
    return value.get_d();
}

std::string terminating_decimal(const Rational& value) {
    mpz_class den = value.get_den();
    unsigned long twos = 0;
    unsigned long fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) return {};
    const unsigned long scale = std::max(twos, fives);
    const mpz_class scaled = value.get_num() * pow10(scale) / value.get_den();
    const bool negative = scaled < 0;
    std::string digits = mpz_class(abs(scaled)).get_str();
    if (scale > 0) {
        if (digits.size() <= scale) digits.insert(0, scale - digits.size() + 1, '0');
        digits.insert(digits.size() - scale, ".");
        while (digits.back() == '0') digits.pop_back();
        if (digits.back() == '.') digits.pop_back();
    }
    return negative ? "-" + digits : digits;
}

std::string display(const Rational& value) {
    auto decimal = terminating_decimal(value);
    return decimal.empty() ? to_string(value) : decimal;
}

nlohmann::json to_json(const Rational& value) {
    if (value.get_den() == 1 && value.get_num().fits_slong_p()) {
        return value.get_num().get_si();
    }
    if (!terminating_decimal(value).empty()) {
        const double d = std::stod(terminating_decimal(value));
        if (std::isfinite(d) && rational_from_double(d) == value) return d;
    }
    return to_string(value);
}

Rational rational_from_json(const nlohmann::json& value) {
    if (value.is_number_integer()) return Rational(value.get<long>());
    if (value.is_number()) return rational_from_double(value.get<double>());
    if (value.is_string()) return parse_rational(value.get<std::string>());
    throw InputError("expected a number or rational string, got " + value.dump());
}

}  // namespace mqrank

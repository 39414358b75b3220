#include "fpmc/rational.h"

#include <cstdio>
#include <cstdlib>

#include "fpmc/errors.h"

namespace fpmc {

ParseError::ParseError(std::string const& message, std::size_t line, std::size_t column)
    : Error(line == 0 ? "column " + std::to_string(column) + ": " + message
                      : "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

mpz_class pow10(long exponent) {
    mpz_class result;
    mpz_ui_pow_ui(result.get_mpz_t(), 10, static_cast<unsigned long>(exponent));
    return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::size_t pos = 0;
    auto fail = [&](std::string const& what) -> Rational { throw ParseError(what, 0, pos + 1); };

    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long scale = 0;
    bool seen_digit = false;
    while (pos < text.size() && is_digit(text[pos])) {
        digits.push_back(text[pos++]);
        seen_digit = true;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && is_digit(text[pos])) {
            digits.push_back(text[pos++]);
            ++scale;
            seen_digit = true;
        }
    }
    if (!seen_digit) {
        return fail("expected a number");
    }
    long exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool negative_exponent = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            negative_exponent = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size() || !is_digit(text[pos])) {
            return fail("expected exponent digits");
        }
        while (pos < text.size() && is_digit(text[pos])) {
            exponent = exponent * 10 + (text[pos++] - '0');
            if (exponent > 10000) {
                return fail("exponent out of range");
            }
        }
        if (negative_exponent) {
            exponent = -exponent;
        }
    }
    Rational value(mpz_class(digits, 10), pow10(scale));
    if (exponent > 0) {
        value *= Rational(pow10(exponent));
    } else if (exponent < 0) {
        value /= Rational(pow10(-exponent));
    }
    if (pos < text.size() && text[pos] == '/') {
        if (scale != 0 || exponent != 0) {
            return fail("fraction numerator must be an integer");
        }
        ++pos;
        std::string denominator;
        while (pos < text.size() && is_digit(text[pos])) {
            denominator.push_back(text[pos++]);
        }
        if (denominator.empty()) {
            return fail("expected denominator");
        }
        mpz_class den(denominator, 10);
        if (den == 0) {
            return fail("zero denominator");
        }
        value /= Rational(den);
    }
    if (pos != text.size()) {
        return fail("unexpected character '" + std::string(1, text[pos]) + "'");
    }
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

std::string to_fraction_string(Rational const& value) {
    if (value.get_den() == 1) {
        return value.get_num().get_str();
    }
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string to_string(Rational const& value) {
    mpz_class den = value.get_den();
    long twos = 0;
    long fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) {
        return to_fraction_string(value);
    }
    long const digits = std::max(twos, fives);
    if (digits == 0) {
        return value.get_num().get_str();
    }
    mpz_class scaled = value.get_num() * pow10(digits) / value.get_den();
    bool const negative = scaled < 0;
    if (negative) {
        scaled = -scaled;
    }
    std::string text = scaled.get_str();
    if (static_cast<long>(text.size()) <= digits) {
        text.insert(0, static_cast<std::size_t>(digits - static_cast<long>(text.size()) + 1), '0');
    }
    text.insert(text.size() - static_cast<std::size_t>(digits), ".");
    return negative ? "-" + text : text;
}

double to_double(Rational const& value) { return value.get_d(); }

std::string to_fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

std::size_t bit_size(Rational const& value) {
    return mpz_sizeinbase(value.get_num_mpz_t(), 2) + mpz_sizeinbase(value.get_den_mpz_t(), 2);
}

}  // namespace fpmc

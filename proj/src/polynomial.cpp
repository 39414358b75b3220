#include "fpmc/polynomial.h"

#include <algorithm>
#include <bit>

#include "fpmc/errors.h"

namespace fpmc {

namespace {

std::vector<Polynomial::Term> merge_sorted(std::vector<Polynomial::Term> terms) {
    std::sort(terms.begin(), terms.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    std::vector<Polynomial::Term> merged;
    for (auto& term : terms) {
        if (!merged.empty() && merged.back().first == term.first) {
            merged.back().second += term.second;
        } else {
            if (!merged.empty() && merged.back().second == 0) {
                merged.pop_back();
            }
            merged.push_back(std::move(term));
        }
    }
    if (!merged.empty() && merged.back().second == 0) {
        merged.pop_back();
    }
    return merged;
}

std::string monomial_string(std::uint64_t mask, std::vector<std::string> const& signature) {
    std::string out;
    for (std::size_t i = 0; i < signature.size(); ++i) {
        if (mask >> i & 1) {
            if (!out.empty()) {
                out += "*";
            }
            out += signature[i];
        }
    }
    return out;
}

bool printed_before(std::uint64_t a, std::uint64_t b) {
    int da = std::popcount(a);
    int db = std::popcount(b);
    if (da != db) {
        return da > db;
    }
    // Lexicographic on ascending feature indices.
    while (a != 0 && b != 0) {
        int ia = std::countr_zero(a);
        int ib = std::countr_zero(b);
        if (ia != ib) {
            return ia < ib;
        }
        a &= a - 1;
        b &= b - 1;
    }
    return false;
}

Polynomial normalize_constant_denominator(Polynomial const& num, Polynomial const& den, Polynomial& out_den) {
    if (den.is_constant() && !den.is_zero()) {
        out_den = Polynomial(1);
        Rational c = den.constant_term();
        return c == 1 ? num : num.scaled(1 / c);
    }
    out_den = den;
    return num;
}

constexpr std::size_t kMaxTransformSupport = 16;

std::size_t compress(std::uint64_t mask, std::vector<unsigned> const& bits) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if ((mask >> bits[k]) & 1U) {
            index |= std::size_t{1} << k;
        }
    }
    return index;
}

// Coefficients to values at every point of the support cube, in place.
void zeta(std::vector<Rational>& a, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t const bit = std::size_t{1} << i;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if ((j & bit) && a[j ^ bit] != 0) {
                a[j] += a[j ^ bit];
            }
        }
    }
}

void moebius(std::vector<Rational>& a, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t const bit = std::size_t{1} << i;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if ((j & bit) && a[j ^ bit] != 0) {
                a[j] -= a[j ^ bit];
            }
        }
    }
}

}  // namespace

// Multiplies pointwise on the Boolean cube of the joint support.
Polynomial transform_product(Polynomial const& a, Polynomial const& b, std::uint64_t support) {
    std::vector<unsigned> bits;
    for (unsigned i = 0; i < 64; ++i) {
        if ((support >> i) & 1U) {
            bits.push_back(i);
        }
    }
    std::size_t const k = bits.size();
    std::vector<Rational> x(std::size_t{1} << k);
    std::vector<Rational> y(x.size());
    for (auto const& [m, c] : a.terms()) {
        x[compress(m, bits)] = c;
    }
    for (auto const& [m, c] : b.terms()) {
        y[compress(m, bits)] = c;
    }
    zeta(x, k);
    zeta(y, k);
    for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] *= y[j];
    }
    moebius(x, k);
    std::vector<Polynomial::Term> terms;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != 0) {
            std::uint64_t mask = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if ((j >> i) & 1U) {
                    mask |= std::uint64_t{1} << bits[i];
                }
            }
            terms.emplace_back(mask, std::move(x[j]));
        }
    }
    Polynomial p;
    p.terms_ = std::move(terms);
    std::sort(p.terms_.begin(), p.terms_.end(), [](auto const& l, auto const& r) { return l.first < r.first; });
    return p;
}

Polynomial::Polynomial(Rational constant) {
    if (constant != 0) {
        terms_.emplace_back(0, std::move(constant));
    }
}

Polynomial Polynomial::variable(unsigned index) {
    if (index >= 64) {
        throw ModelError("at most 64 features are supported");
    }
    Polynomial p;
    p.terms_.emplace_back(std::uint64_t{1} << index, Rational(1));
    return p;
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
    Polynomial p;
    p.terms_ = merge_sorted(std::move(terms));
    return p;
}

Rational Polynomial::constant_term() const {
    if (!terms_.empty() && terms_[0].first == 0) {
        return terms_[0].second;
    }
    return 0;
}

std::uint64_t Polynomial::support() const {
    std::uint64_t mask = 0;
    for (auto const& [m, c] : terms_) {
        mask |= m;
    }
    return mask;
}

Rational Polynomial::eval(std::uint64_t mask) const {
    Rational sum = 0;
    for (auto const& [m, c] : terms_) {
        if ((m & ~mask) == 0) {
            sum += c;
        }
    }
    return sum;
}

Polynomial Polynomial::operator-() const {
    Polynomial p = *this;
    for (auto& term : p.terms_) {
        term.second = -term.second;
    }
    return p;
}

Polynomial operator+(Polynomial const& a, Polynomial const& b) {
    Polynomial p;
    auto i = a.terms_.begin();
    auto j = b.terms_.begin();
    while (i != a.terms_.end() || j != b.terms_.end()) {
        if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
            p.terms_.push_back(*i++);
        } else if (i == a.terms_.end() || j->first < i->first) {
            p.terms_.push_back(*j++);
        } else {
            Rational c = i->second + j->second;
            if (c != 0) {
                p.terms_.emplace_back(i->first, std::move(c));
            }
            ++i;
            ++j;
        }
    }
    return p;
}

Polynomial operator-(Polynomial const& a, Polynomial const& b) { return a + (-b); }

Polynomial operator*(Polynomial const& a, Polynomial const& b) {
    if (a.is_zero() || b.is_zero()) {
        return Polynomial();
    }
    if (a.is_constant()) {
        return b.scaled(a.constant_term());
    }
    if (b.is_constant()) {
        return a.scaled(b.constant_term());
    }
    std::uint64_t const support = a.support() | b.support();
    std::size_t const k = static_cast<std::size_t>(std::popcount(support));
    if (k <= kMaxTransformSupport && a.terms_.size() * b.terms_.size() > (k + 1) * (std::size_t{1} << k)) {
        return transform_product(a, b, support);
    }
    std::vector<Polynomial::Term> terms;
    terms.reserve(a.terms_.size() * b.terms_.size());
    for (auto const& [ma, ca] : a.terms_) {
        for (auto const& [mb, cb] : b.terms_) {
            terms.emplace_back(ma | mb, ca * cb);
        }
    }
    return Polynomial::from_terms(std::move(terms));
}

Polynomial Polynomial::scaled(Rational const& factor) const {
    if (factor == 0) {
        return Polynomial();
    }
    Polynomial p = *this;
    for (auto& term : p.terms_) {
        term.second *= factor;
    }
    return p;
}

std::string Polynomial::to_string(std::vector<std::string> const& signature) const {
    if (terms_.empty()) {
        return "0";
    }
    std::vector<Term> ordered = terms_;
    std::sort(ordered.begin(), ordered.end(), [](auto const& a, auto const& b) { return printed_before(a.first, b.first); });
    std::string out;
    for (auto const& [mask, coefficient] : ordered) {
        bool negative = coefficient < 0;
        Rational magnitude = negative ? Rational(-coefficient) : coefficient;
        if (out.empty()) {
            out += negative ? "-" : "";
        } else {
            out += negative ? " - " : " + ";
        }
        std::string monomial = monomial_string(mask, signature);
        if (monomial.empty()) {
            out += fpmc::to_string(magnitude);
        } else if (magnitude == 1) {
            out += monomial;
        } else {
            out += fpmc::to_string(magnitude) + "*" + monomial;
        }
    }
    return out;
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) {
    if (den.is_zero()) {
        throw Error("rational function with zero denominator");
    }
    numerator = normalize_constant_denominator(num, den, denominator);
    if (numerator.is_zero()) {
        denominator = Polynomial(1);
    }
}

std::optional<Rational> RationalFunction::eval(std::uint64_t mask) const {
    Rational den = denominator.eval(mask);
    if (den == 0) {
        return std::nullopt;
    }
    return numerator.eval(mask) / den;
}

RationalFunction operator+(RationalFunction const& a, RationalFunction const& b) {
    if (a.numerator.is_zero()) {
        return b;
    }
    if (b.numerator.is_zero()) {
        return a;
    }
    if (a.denominator == b.denominator) {
        return RationalFunction(a.numerator + b.numerator, a.denominator);
    }
    return RationalFunction(a.numerator * b.denominator + b.numerator * a.denominator,
                            a.denominator * b.denominator);
}

RationalFunction operator*(RationalFunction const& a, RationalFunction const& b) {
    if (a.numerator.is_zero() || b.numerator.is_zero()) {
        return RationalFunction();
    }
    if (a.denominator == b.numerator && !a.denominator.is_constant()) {
        return RationalFunction(a.numerator, b.denominator);
    }
    if (b.denominator == a.numerator && !b.denominator.is_constant()) {
        return RationalFunction(b.numerator, a.denominator);
    }
    return RationalFunction(a.numerator * b.numerator, a.denominator * b.denominator);
}

namespace {

constexpr unsigned kMaxInversionSupport = 12;

// Multilinear 1/d over the support of d, nullopt if d vanishes at a Boolean point.
std::optional<Polynomial> multilinear_inverse(Polynomial const& d) {
    std::vector<unsigned> bits;
    for (unsigned i = 0; i < 64; ++i) {
        if ((d.support() >> i) & 1U) {
            bits.push_back(i);
        }
    }
    if (bits.size() > kMaxInversionSupport) {
        return std::nullopt;
    }
    std::size_t const points = std::size_t{1} << bits.size();
    auto scatter = [&](std::size_t j) {
        std::uint64_t mask = 0;
        for (std::size_t k = 0; k < bits.size(); ++k) {
            if ((j >> k) & 1U) {
                mask |= std::uint64_t{1} << bits[k];
            }
        }
        return mask;
    };
    std::vector<Rational> a(points);
    for (std::size_t j = 0; j < points; ++j) {
        Rational v = d.eval(scatter(j));
        if (v == 0) {
            return std::nullopt;
        }
        a[j] = 1 / v;
    }
    for (std::size_t k = 0; k < bits.size(); ++k) {
        std::size_t const bit = std::size_t{1} << k;
        for (std::size_t j = 0; j < points; ++j) {
            if (j & bit) {
                a[j] -= a[j ^ bit];
            }
        }
    }
    std::vector<Polynomial::Term> terms;
    for (std::size_t j = 0; j < points; ++j) {
        if (a[j] != 0) {
            terms.emplace_back(scatter(j), std::move(a[j]));
        }
    }
    return Polynomial::from_terms(std::move(terms));
}

}  // namespace

RationalFunction geometric(RationalFunction const& a) {
    Polynomial rest = a.denominator - a.numerator;
    if (rest.is_zero()) {
        throw Error("geometric series of a certain loop");
    }
    if (auto inverse = multilinear_inverse(rest)) {
        return RationalFunction(a.denominator * *inverse);
    }
    return RationalFunction(a.denominator, rest);
}

Polynomial epsilon(FeatureDiagram const& diagram, std::uint64_t mask) {
    Polynomial result(1);
    for (unsigned i = 0; i < diagram.feature_count(); ++i) {
        Polynomial f = Polynomial::variable(i);
        result = result * ((mask >> i & 1) ? f : Polynomial(1) - f);
    }
    return result;
}

Polynomial expr_to_polynomial(Expr const& expr, FeatureDiagram const& diagram) {
    switch (expr.kind()) {
        case Expr::Kind::Constant:
            return Polynomial(expr.constant_value() ? 1 : 0);
        case Expr::Kind::Variable: {
            auto index = diagram.feature_index(expr.name());
            if (!index) {
                throw ModelError("unknown feature '" + expr.name() + "'");
            }
            return Polynomial::variable(*index);
        }
        case Expr::Kind::Not:
            return Polynomial(1) - expr_to_polynomial(expr.left(), diagram);
        default:
            break;
    }
    Polynomial a = expr_to_polynomial(expr.left(), diagram);
    Polynomial b = expr_to_polynomial(expr.right(), diagram);
    switch (expr.kind()) {
        case Expr::Kind::And:
            return a * b;
        case Expr::Kind::Or:
            return a + b - a * b;
        case Expr::Kind::Implies:
            return Polynomial(1) - a + a * b;
        case Expr::Kind::Xor:
            return a + b - (a * b).scaled(2);
        default:
            break;
    }
    throw Error("unexpected expression kind");
}

Polynomial profile_to_polynomial(Profile const& profile) {
    FeatureDiagram const& diagram = *profile.diagram();
    Polynomial result;
    Polynomial remaining(1);
    for (auto const& c : profile.cases()) {
        Polynomial guard = expr_to_polynomial(c.guard, diagram);
        Polynomial selected = remaining * guard;
        if (c.value != 0) {
            result = result + selected.scaled(c.value);
        }
        remaining = remaining - selected;
    }
    return result + remaining.scaled(profile.default_value());
}

Polynomial epsilon_sum(FeatureDiagram const& diagram, std::vector<Rational> const& values) {
    std::size_t n = diagram.feature_count();
    if (n > kMaxInterpolationFeatures) {
        throw ModelError("interpolation is limited to " + std::to_string(kMaxInterpolationFeatures) + " features");
    }
    if (values.size() != diagram.product_count()) {
        throw ModelError("value vector length does not match the product count");
    }
    std::vector<Rational> a(std::size_t{1} << n, Rational(0));
    for (std::size_t p = 0; p < values.size(); ++p) {
        a[diagram.mask(p)] = values[p];
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t bit = std::size_t{1} << i;
        for (std::size_t mask = 0; mask < a.size(); ++mask) {
            if ((mask & bit) && a[mask ^ bit] != 0) {
                a[mask] -= a[mask ^ bit];
            }
        }
    }
    std::vector<Polynomial::Term> terms;
    for (std::size_t mask = 0; mask < a.size(); ++mask) {
        if (a[mask] != 0) {
            terms.emplace_back(mask, std::move(a[mask]));
        }
    }
    return Polynomial::from_terms(std::move(terms));
}

std::vector<Rational> eval_products(Polynomial const& polynomial, FeatureDiagram const& diagram) {
    std::size_t const n = diagram.feature_count();
    std::size_t const count = diagram.product_count();
    std::vector<Rational> values;
    values.reserve(count);
    if (n > kMaxInterpolationFeatures || polynomial.size() * count < (n + 1) * (std::size_t{1} << n)) {
        for (std::size_t p = 0; p < count; ++p) {
            values.push_back(polynomial.eval(diagram.mask(p)));
        }
        return values;
    }
    std::vector<Rational> cube(std::size_t{1} << n);
    for (auto const& [m, c] : polynomial.terms()) {
        cube[m] = c;
    }
    zeta(cube, n);
    for (std::size_t p = 0; p < count; ++p) {
        values.push_back(cube[diagram.mask(p)]);
    }
    return values;
}

std::string integer_scaled(Polynomial const& polynomial, std::vector<std::string> const& signature) {
    mpz_class common = 1;
    for (auto const& [mask, c] : polynomial.terms()) {
        mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), c.get_den_mpz_t());
    }
    if (common == 1) {
        return polynomial.to_string(signature);
    }
    Polynomial scaled = polynomial.scaled(Rational(common));
    return "(" + scaled.to_string(signature) + ") / " + common.get_str();
}

}  // namespace fpmc

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpmc/expression.h"
#include "fpmc/feature_model.h"
#include "fpmc/profile.h"
#include "fpmc/rational.h"

namespace fpmc {

/// Multilinear polynomial over Boolean feature variables with exact
/// coefficients. A monomial is a bitmask over the diagram's signature;
/// products reduce by f·f = f.
class Polynomial {
public:
    using Term = std::pair<std::uint64_t, Rational>;

    Polynomial() = default;
    Polynomial(Rational constant);  // NOLINT: implicit by design
    Polynomial(int constant) : Polynomial(Rational(constant)) {}  // NOLINT

    static Polynomial variable(unsigned index);
    /// Builds from arbitrary terms, merging duplicates and dropping zeros.
    static Polynomial from_terms(std::vector<Term> terms);

    /// Sorted by monomial mask; coefficients nonzero.
    std::vector<Term> const& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
    Rational constant_term() const;
    std::uint64_t support() const;
    std::size_t size() const { return terms_.size(); }

    /// Substitutes 1 for features in `mask` and 0 for the others.
    Rational eval(std::uint64_t mask) const;

    Polynomial operator-() const;
    friend Polynomial operator+(Polynomial const& a, Polynomial const& b);
    friend Polynomial operator-(Polynomial const& a, Polynomial const& b);
    friend Polynomial operator*(Polynomial const& a, Polynomial const& b);
    Polynomial scaled(Rational const& factor) const;

    friend bool operator==(Polynomial const& a, Polynomial const& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(Polynomial const& a, Polynomial const& b) { return !(a == b); }

    /// `coef*f1*f2` terms joined by ` + ` / ` - `, monomials by decreasing
    /// degree, features in signature order.
    std::string to_string(std::vector<std::string> const& signature) const;

private:
    friend Polynomial transform_product(Polynomial const& a, Polynomial const& b, std::uint64_t support);

    std::vector<Term> terms_;
};

/// Quotient of two multilinear polynomials; no cancellation is attempted.
struct RationalFunction {
    Polynomial numerator;
    Polynomial denominator = Polynomial(1);

    RationalFunction() = default;
    RationalFunction(Polynomial num) : numerator(std::move(num)) {}  // NOLINT
    RationalFunction(Polynomial num, Polynomial den);

    bool is_polynomial() const { return denominator == Polynomial(1); }
    /// nullopt when the denominator vanishes at the point.
    std::optional<Rational> eval(std::uint64_t mask) const;

    friend RationalFunction operator+(RationalFunction const& a, RationalFunction const& b);
    friend RationalFunction operator*(RationalFunction const& a, RationalFunction const& b);
    /// 1 / (1 - a).
    friend RationalFunction geometric(RationalFunction const& a);
};

/// Π_{f∈p} f · Π_{f∉p} (1−f) over the signature.
Polynomial epsilon(FeatureDiagram const& diagram, std::uint64_t mask);

/// 0/1 polynomial agreeing with the expression at every Boolean point.
Polynomial expr_to_polynomial(Expr const& expr, FeatureDiagram const& diagram);

/// Agrees with the profile at every valid product; built from the guards.
Polynomial profile_to_polynomial(Profile const& profile);

/// Σ_p ε(p)·value(p) over the valid products, computed by a Möbius
/// transform over all 2^n points (invalid points contribute 0).
/// Requires at most 20 features.
Polynomial epsilon_sum(FeatureDiagram const& diagram, std::vector<Rational> const& values);

inline constexpr std::size_t kMaxInterpolationFeatures = 20;

/// Values at every valid product, canonically indexed.
std::vector<Rational> eval_products(Polynomial const& polynomial, FeatureDiagram const& diagram);

/// Integer-scaled form "(n1*f + n2) / d", or the numerator alone when d is 1.
std::string integer_scaled(Polynomial const& polynomial, std::vector<std::string> const& signature);

}  // namespace fpmc

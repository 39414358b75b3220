#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fpmc/expression.h"

namespace fpmc {

/// A total Boolean assignment over some ordered set of feature names.
class Product {
public:
    Product() = default;
    explicit Product(std::vector<std::pair<std::string, bool>> assignment);

    std::optional<bool> value(std::string const& feature) const;
    std::vector<std::pair<std::string, bool>> const& assignment() const { return assignment_; }
    std::vector<std::string> names() const;
    std::size_t size() const { return assignment_.size(); }

    /// Enabled features in assignment order, e.g. "{spd2,very}".
    std::string to_string() const;

    friend bool operator==(Product const& a, Product const& b) { return a.assignment_ == b.assignment_; }

private:
    std::vector<std::pair<std::string, bool>> assignment_;
};

/// Throws ModelError naming the first unbound variable.
bool evaluate_expr(Expr const& expr, Product const& product);

/// Keeps only the bindings named in `sub`, in the order of `sub`.
Product restrict(Product const& product, std::vector<std::string> const& sub);

inline constexpr std::size_t kDefaultEnumerationLimit = 24;

/// A feature diagram in its semantic form: an ordered signature plus a
/// Boolean constraint. Valid products are enumerated eagerly in canonical
/// order (lexicographic by signature position, false before true).
///
/// Products are also handled as bitmasks where bit i is the value of the
/// i-th signature feature.
class FeatureDiagram {
public:
    FeatureDiagram(std::vector<std::string> signature, Expr constraint,
                   std::size_t enumeration_limit = kDefaultEnumerationLimit);

    std::vector<std::string> const& signature() const { return signature_; }
    Expr const& constraint() const { return constraint_; }
    std::size_t feature_count() const { return signature_.size(); }
    std::optional<unsigned> feature_index(std::string const& name) const;

    std::size_t product_count() const { return masks_.size(); }
    std::vector<std::uint64_t> const& product_masks() const { return masks_; }
    std::uint64_t mask(std::size_t product) const { return masks_[product]; }

    Product product(std::size_t index) const;
    Product product_of_mask(std::uint64_t mask) const;
    std::optional<std::size_t> index_of(std::uint64_t mask) const;
    /// The product must assign every signature feature; extra names are ignored.
    std::optional<std::size_t> index_of(Product const& product) const;
    std::uint64_t mask_of(Product const& product) const;

    /// Compiles an expression over this signature; unknown names raise ModelError.
    MaskExpr compile(Expr const& expr) const;

    std::string render(std::uint64_t mask) const;

private:
    std::vector<std::string> signature_;
    Expr constraint_;
    std::unordered_map<std::string, unsigned> positions_;
    std::vector<std::uint64_t> masks_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    bool unconstrained_ = false;
};

using DiagramPtr = std::shared_ptr<FeatureDiagram const>;

DiagramPtr make_diagram(std::vector<std::string> signature, Expr constraint = Expr::constant(true),
                        std::size_t enumeration_limit = kDefaultEnumerationLimit);

/// Diagram with an empty signature and exactly one (empty) product.
DiagramPtr single_product_diagram();

std::vector<Product> valid_products(FeatureDiagram const& diagram);

/// Signature is the first signature followed by the new names of the second;
/// the constraint is the conjunction of both.
DiagramPtr conjoin(DiagramPtr const& first, DiagramPtr const& second);

bool same_diagram(FeatureDiagram const& a, FeatureDiagram const& b);

}  // namespace fpmc

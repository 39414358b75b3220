#include "fpmc/feature_model.h"

#include <algorithm>

#include "fpmc/errors.h"

namespace fpmc {

Product::Product(std::vector<std::pair<std::string, bool>> assignment) : assignment_(std::move(assignment)) {}

std::optional<bool> Product::value(std::string const& feature) const {
    for (auto const& [name, value] : assignment_) {
        if (name == feature) {
            return value;
        }
    }
    return std::nullopt;
}

std::vector<std::string> Product::names() const {
    std::vector<std::string> result;
    result.reserve(assignment_.size());
    for (auto const& binding : assignment_) {
        result.push_back(binding.first);
    }
    return result;
}

std::string Product::to_string() const {
    std::string text = "{";
    bool first = true;
    for (auto const& [name, value] : assignment_) {
        if (value) {
            if (!first) text += ",";
            text += name;
            first = false;
        }
    }
    return text + "}";
}

bool evaluate_expr(Expr const& expr, Product const& product) {
    return expr.evaluate([&](std::string const& name) { return product.value(name); });
}

Product restrict(Product const& product, std::vector<std::string> const& sub) {
    std::vector<std::pair<std::string, bool>> kept;
    kept.reserve(sub.size());
    for (auto const& name : sub) {
        auto const value = product.value(name);
        if (!value) {
            throw ModelError("cannot restrict product " + product.to_string() + " to unknown feature '" + name + "'");
        }
        kept.emplace_back(name, *value);
    }
    return Product(std::move(kept));
}

FeatureDiagram::FeatureDiagram(std::vector<std::string> signature, Expr constraint, std::size_t enumeration_limit)
    : signature_(std::move(signature)), constraint_(std::move(constraint)) {
    for (unsigned i = 0; i < signature_.size(); ++i) {
        if (!positions_.emplace(signature_[i], i).second) {
            throw ModelError("duplicate feature '" + signature_[i] + "' in signature");
        }
    }
    for (auto const& name : constraint_.variables()) {
        if (!positions_.count(name)) {
            throw ModelError("constraint references undeclared feature '" + name + "'");
        }
    }
    std::size_t const n = signature_.size();
    if (n > enumeration_limit || n > 62) {
        throw ModelError("diagram has " + std::to_string(n) + " features, above the enumeration limit of " +
                         std::to_string(enumeration_limit) + "; raise the limit to enumerate its products");
    }
    MaskExpr const check = compile(constraint_);
    unconstrained_ = constraint_.simplified().is_true();
    std::uint64_t const total = std::uint64_t{1} << n;
    for (std::uint64_t key = 0; key < total; ++key) {
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((key >> (n - 1 - i)) & 1U) {
                mask |= std::uint64_t{1} << i;
            }
        }
        if (check(mask)) {
            if (!unconstrained_) {
                index_.emplace(mask, masks_.size());
            }
            masks_.push_back(mask);
        }
    }
}

std::optional<unsigned> FeatureDiagram::feature_index(std::string const& name) const {
    auto const it = positions_.find(name);
    if (it == positions_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Product FeatureDiagram::product(std::size_t index) const { return product_of_mask(masks_.at(index)); }

Product FeatureDiagram::product_of_mask(std::uint64_t mask) const {
    std::vector<std::pair<std::string, bool>> assignment;
    assignment.reserve(signature_.size());
    for (std::size_t i = 0; i < signature_.size(); ++i) {
        assignment.emplace_back(signature_[i], (mask >> i) & 1U);
    }
    return Product(std::move(assignment));
}

std::optional<std::size_t> FeatureDiagram::index_of(std::uint64_t mask) const {
    std::size_t const n = signature_.size();
    if (n < 64 && (mask >> n) != 0) {
        return std::nullopt;
    }
    if (unconstrained_) {
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if ((mask >> i) & 1U) {
                key |= std::uint64_t{1} << (n - 1 - i);
            }
        }
        return static_cast<std::size_t>(key);
    }
    auto const it = index_.find(mask);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::uint64_t FeatureDiagram::mask_of(Product const& product) const {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < signature_.size(); ++i) {
        auto const value = product.value(signature_[i]);
        if (!value) {
            throw ModelError("product " + product.to_string() + " does not assign feature '" + signature_[i] + "'");
        }
        if (*value) {
            mask |= std::uint64_t{1} << i;
        }
    }
    return mask;
}

std::optional<std::size_t> FeatureDiagram::index_of(Product const& product) const {
    for (auto const& name : signature_) {
        if (!product.value(name)) {
            return std::nullopt;
        }
    }
    return index_of(mask_of(product));
}

MaskExpr FeatureDiagram::compile(Expr const& expr) const {
    return MaskExpr(expr, [this](std::string const& name) { return feature_index(name); });
}

std::string FeatureDiagram::render(std::uint64_t mask) const { return product_of_mask(mask).to_string(); }

DiagramPtr make_diagram(std::vector<std::string> signature, Expr constraint, std::size_t enumeration_limit) {
    return std::make_shared<FeatureDiagram const>(std::move(signature), std::move(constraint), enumeration_limit);
}

DiagramPtr single_product_diagram() {
    static DiagramPtr const instance = make_diagram({}, Expr::constant(true));
    return instance;
}

std::vector<Product> valid_products(FeatureDiagram const& diagram) {
    std::vector<Product> result;
    result.reserve(diagram.product_count());
    for (std::size_t i = 0; i < diagram.product_count(); ++i) {
        result.push_back(diagram.product(i));
    }
    return result;
}

bool same_diagram(FeatureDiagram const& a, FeatureDiagram const& b) {
    return &a == &b || (a.signature() == b.signature() && a.constraint() == b.constraint());
}

DiagramPtr conjoin(DiagramPtr const& first, DiagramPtr const& second) {
    if (same_diagram(*first, *second)) {
        return first;
    }
    std::vector<std::string> signature = first->signature();
    for (auto const& name : second->signature()) {
        if (std::find(signature.begin(), signature.end(), name) == signature.end()) {
            signature.push_back(name);
        }
    }
    Expr constraint = Expr::conj(first->constraint(), second->constraint()).simplified();
    return make_diagram(std::move(signature), std::move(constraint));
}

}  // namespace fpmc

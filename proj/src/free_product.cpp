#include "freeprod/free_product.hpp"

#include "freeprod/errors.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace freeprod {

ProductSpace::ProductSpace(std::vector<FactorState> factors, int degree_bound) : degree_bound_(degree_bound) {
    if (degree_bound < 1) {
        throw ValidationError("degree bound must be positive, got " + std::to_string(degree_bound));
    }
    if (factors.empty()) {
        throw ValidationError("a product space needs at least one factor");
    }
    for (auto& f : factors) {
        if (f.degree_bound() < degree_bound) {
            throw ValidationError("factor '" + f.name() + "' is given up to degree " +
                                  std::to_string(f.degree_bound()) + " but the product needs " +
                                  std::to_string(degree_bound));
        }
        alphabet_.add_factor(f.index(), f.name(), f.generators());
        auto shared = std::make_shared<const FactorState>(std::move(f));
        cumulants_.emplace_back(shared);
        factors_.push_back(std::move(shared));
    }
}

std::vector<FactorIndex> ProductSpace::factor_indices() const {
    std::vector<FactorIndex> out;
    for (const auto& f : factors_) {
        out.push_back(f->index());
    }
    return out;
}

std::size_t ProductSpace::slot(FactorIndex index) const {
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        if (factors_[k]->index() == index) {
            return k;
        }
    }
    throw FactorMismatchError("unknown factor index " + std::to_string(index));
}

const FactorState& ProductSpace::factor(FactorIndex index) const {
    return *factors_[slot(index)];
}

const CumulantTable& ProductSpace::cumulants(FactorIndex index) const {
    return cumulants_[slot(index)];
}

// ---------------------------------------------------------------------------

TensorWord::TensorWord(std::vector<Word> components) : components_(std::move(components)) {
    for (std::size_t u = 0; u < components_.size(); ++u) {
        if (components_[u].empty()) {
            throw ValidationError("tensor word component " + std::to_string(u + 1) + " is the identity");
        }
        if (!components_[u].factor()) {
            throw ValidationError("tensor word component " + std::to_string(u + 1) + " mixes factors");
        }
        if (u > 0 && factor(u) == factor(u - 1)) {
            throw ValidationError("tensor word components " + std::to_string(u) + " and " + std::to_string(u + 1) +
                                  " come from the same factor");
        }
    }
}

std::vector<FactorIndex> TensorWord::pattern() const {
    std::vector<FactorIndex> out;
    for (std::size_t u = 0; u < length(); ++u) {
        out.push_back(factor(u));
    }
    return out;
}

std::size_t TensorWord::degree() const {
    std::size_t d = 0;
    for (const auto& w : components_) {
        d += w.degree();
    }
    return d;
}

TensorWord TensorWord::star() const {
    std::vector<Word> out;
    out.reserve(components_.size());
    for (auto it = components_.rbegin(); it != components_.rend(); ++it) {
        out.push_back(it->star());
    }
    return TensorWord(std::move(out));
}

// ---------------------------------------------------------------------------

FreeElement FreeElement::scalar(const Complex& c) {
    FreeElement x;
    x.scalar_ = c;
    return x;
}

FreeElement FreeElement::basis(const TensorWord& t, const Complex& c) {
    FreeElement x;
    x.add_term(t, c);
    return x;
}

Complex FreeElement::coefficient(const TensorWord& t) const {
    if (t.empty()) {
        return scalar_;
    }
    auto it = words_.find(t);
    return it == words_.end() ? Complex(0) : it->second;
}

void FreeElement::add_term(const TensorWord& t, const Complex& c) {
    if (c.is_zero()) {
        return;
    }
    if (t.empty()) {
        scalar_ += c;
        return;
    }
    auto [it, inserted] = words_.try_emplace(t, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            words_.erase(it);
        }
    }
}

FreeElement& FreeElement::operator+=(const FreeElement& o) {
    o.for_each_term([this](const TensorWord& t, const Complex& c) { add_term(t, c); });
    return *this;
}

FreeElement& FreeElement::operator-=(const FreeElement& o) {
    o.for_each_term([this](const TensorWord& t, const Complex& c) { add_term(t, -c); });
    return *this;
}

FreeElement& FreeElement::operator*=(const Complex& c) {
    if (c.is_zero()) {
        *this = FreeElement{};
        return *this;
    }
    scalar_ *= c;
    for (auto& [t, v] : words_) {
        v *= c;
    }
    return *this;
}

std::string format(const Alphabet& alphabet, const TensorWord& t) {
    if (t.empty()) {
        return "1";
    }
    std::string out;
    for (const auto& w : t.components()) {
        if (!out.empty()) {
            out += " ⊗ ";
        }
        out += "(" + alphabet.format(w) + ")°";
    }
    return out;
}

std::string format(const Alphabet& alphabet, const FreeElement& x) {
    if (x.is_zero()) {
        return "0";
    }
    std::string out;
    x.for_each_term([&](const TensorWord& t, const Complex& c) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + to_string(c) + ") " + format(alphabet, t);
    });
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_degree(const ProductSpace& space, std::size_t degree, const char* what) {
    if (static_cast<int>(degree) > space.degree_bound()) {
        throw TruncationError(std::string(what) + " has degree " + std::to_string(degree) + " > bound " +
                              std::to_string(space.degree_bound()));
    }
}

/// Writes p = phi_i(p) 1 + sum_{w != 1} c_w w° into `out`, scaled by `weight`,
/// with each w° placed between `prefix` and `suffix`.
void add_decomposed(const ProductSpace& space, FactorIndex index, const Polynomial& p, const Complex& weight,
                    const std::vector<Word>& prefix, const std::vector<Word>& suffix, FreeElement& out,
                    Complex& scalar) {
    const auto& state = space.factor(index);
    for (const auto& [w, c] : p.terms()) {
        if (w.empty()) {
            continue;
        }
        if (!w.within(index)) {
            throw FactorMismatchError("'" + space.alphabet().format(w) + "' is not a word of factor '" +
                                      state.name() + "'");
        }
        require_degree(space, w.degree(), "tensor component");
        std::vector<Word> components = prefix;
        components.push_back(w);
        components.insert(components.end(), suffix.begin(), suffix.end());
        out.add_term(TensorWord(std::move(components)), weight * c);
    }
    scalar = state.phi(p);
}

FreeElement multiply_basis(const ProductSpace& space, const TensorWord& a, const TensorWord& b) {
    if (a.empty()) {
        return FreeElement::basis(b);
    }
    if (b.empty()) {
        return FreeElement::basis(a);
    }
    const FactorIndex left = a.factor(a.length() - 1);
    const FactorIndex right = b.factor(0);
    std::vector<Word> prefix(a.components().begin(), a.components().end() - 1);
    std::vector<Word> suffix(b.components().begin() + 1, b.components().end());
    if (left != right) {
        std::vector<Word> joined = a.components();
        joined.insert(joined.end(), b.components().begin(), b.components().end());
        return FreeElement::basis(TensorWord(std::move(joined)));
    }
    // a_k° b_1° = (a_k° b_1°)° + phi(a_k° b_1°) 1, and the scalar part
    // multiplies the shorter words on either side.
    const Polynomial inner = component_polynomial(space, a, a.length() - 1) * component_polynomial(space, b, 0);
    FreeElement out;
    Complex scalar;
    add_decomposed(space, left, inner, Complex(1), prefix, suffix, out, scalar);
    if (!scalar.is_zero()) {
        FreeElement tail = multiply_basis(space, TensorWord(std::move(prefix)), TensorWord(std::move(suffix)));
        tail *= scalar;
        out += tail;
    }
    return out;
}

std::vector<PureElement> restrict_items(std::span<const PureElement> args, const std::vector<int>& block) {
    std::vector<PureElement> out;
    out.reserve(block.size());
    for (int i : block) {
        out.push_back(args[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::size_t items_degree(std::span<const PureElement> args) {
    std::size_t d = 0;
    for (const auto& a : args) {
        d += a.value.degree();
    }
    return d;
}

} // namespace

Polynomial component_polynomial(const ProductSpace& space, const TensorWord& t, std::size_t u) {
    const Word& w = t.components()[u];
    return center(space.factor(t.factor(u)), Polynomial(w));
}

FreeElement embed(const ProductSpace& space, FactorIndex index, const Polynomial& p) {
    FreeElement out;
    Complex scalar;
    add_decomposed(space, index, p, Complex(1), {}, {}, out, scalar);
    out.add_term(TensorWord{}, scalar);
    return out;
}

FreeElement multiply(const ProductSpace& space, const FreeElement& x, const FreeElement& y) {
    FreeElement out;
    x.for_each_term([&](const TensorWord& a, const Complex& ca) {
        y.for_each_term([&](const TensorWord& b, const Complex& cb) {
            FreeElement term = multiply_basis(space, a, b);
            term *= ca * cb;
            out += term;
        });
    });
    return out;
}

FreeElement star_element(const FreeElement& x) {
    FreeElement out;
    x.for_each_term([&](const TensorWord& t, const Complex& c) { out.add_term(t.star(), c.conj()); });
    return out;
}

FreeElement element_from_word(const ProductSpace& space, const Word& w) {
    FreeElement out = FreeElement::identity();
    for (const auto& l : w.letters()) {
        space.alphabet().check(l);
        out = multiply(space, out, embed(space, l.factor, Polynomial(Word{l})));
    }
    return out;
}

// ---------------------------------------------------------------------------

GroupedWord::GroupedWord(std::vector<PureElement> items, std::vector<std::size_t> boundaries)
    : items_(std::move(items)), boundaries_(std::move(boundaries)) {
    if (boundaries_.empty() || boundaries_.back() != items_.size()) {
        throw ValidationError("group boundaries must end at the number of items");
    }
    std::size_t start = 0;
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
        if (boundaries_[j] <= start && !(j == 0 && boundaries_[j] > 0)) {
            throw ValidationError("group boundaries must be strictly increasing and groups non-empty");
        }
        for (std::size_t u = start + 1; u < boundaries_[j]; ++u) {
            const auto& prev = items_[u - 1].factor;
            const auto& cur = items_[u].factor;
            if (prev && cur && *prev == *cur) {
                throw ValidationError("neighbouring items " + std::to_string(u) + " and " + std::to_string(u + 1) +
                                      " of group " + std::to_string(j + 1) + " come from the same factor");
            }
        }
        start = boundaries_[j];
    }
}

namespace {

std::vector<PureElement> flatten(const std::vector<std::vector<PureElement>>& groups) {
    std::vector<PureElement> out;
    for (const auto& g : groups) {
        out.insert(out.end(), g.begin(), g.end());
    }
    return out;
}

std::vector<std::size_t> cumulative(const std::vector<std::vector<PureElement>>& groups) {
    std::vector<std::size_t> out;
    std::size_t s = 0;
    for (const auto& g : groups) {
        s += g.size();
        out.push_back(s);
    }
    return out;
}

} // namespace

GroupedWord::GroupedWord(const std::vector<std::vector<PureElement>>& groups)
    : GroupedWord(flatten(groups), cumulative(groups)) {}

std::vector<PureElement> GroupedWord::group(std::size_t j) const {
    const std::size_t begin = j == 0 ? 0 : boundaries_[j - 1];
    return std::vector<PureElement>(items_.begin() + static_cast<std::ptrdiff_t>(begin),
                                    items_.begin() + static_cast<std::ptrdiff_t>(boundaries_[j]));
}

Partition GroupedWord::interval_partition() const {
    std::vector<int> sizes;
    std::size_t start = 0;
    for (std::size_t b : boundaries_) {
        sizes.push_back(static_cast<int>(b - start));
        start = b;
    }
    return Partition::interval(sizes);
}

std::size_t GroupedWord::degree() const {
    return items_degree(items_);
}

// ---------------------------------------------------------------------------

Complex kappa_base(const ProductSpace& space, std::span<const PureElement> args) {
    if (args.empty()) {
        throw ValidationError("cumulant with no arguments");
    }
    std::optional<FactorIndex> common;
    for (const auto& a : args) {
        if (!a.factor) {
            for (const auto& [w, c] : a.value.terms()) {
                if (!w.empty()) {
                    throw ValidationError("untagged pure element must be a multiple of the identity");
                }
            }
            continue;
        }
        if (common && *common != *a.factor) {
            return Complex(0);
        }
        common = a.factor;
    }
    require_degree(space, items_degree(args), "cumulant argument list");
    if (!common) {
        return args.size() == 1 ? args.front().value.coefficient(Word{}) : Complex(0);
    }
    std::vector<Polynomial> polys;
    polys.reserve(args.size());
    for (const auto& a : args) {
        for (const auto& [w, c] : a.value.terms()) {
            if (!w.within(*common)) {
                throw FactorMismatchError("'" + space.alphabet().format(w) + "' is tagged with factor '" +
                                          space.factor(*common).name() + "' but is not one of its words");
            }
        }
        polys.push_back(a.value);
    }
    return space.cumulants(*common).value(std::span<const Polynomial>(polys));
}

Complex kappa_base(const ProductSpace& space, std::span<const Letter> letters) {
    std::vector<PureElement> items;
    for (const auto& l : letters) {
        space.alphabet().check(l);
        items.push_back(PureElement::of(l));
    }
    return kappa_base(space, std::span<const PureElement>(items));
}

Complex kappa_pure_pi(const ProductSpace& space, const Partition& pi, std::span<const PureElement> args) {
    if (pi.size() != static_cast<int>(args.size())) {
        throw DimensionError("partition of " + std::to_string(pi.size()) + " elements applied to " +
                             std::to_string(args.size()) + " arguments");
    }
    Complex product(1);
    for (const auto& block : pi.blocks()) {
        const auto sub = restrict_items(args, block);
        const Complex k = kappa_base(space, std::span<const PureElement>(sub));
        if (k.is_zero()) {
            return Complex(0);
        }
        product *= k;
    }
    return product;
}

Complex kappa_products(const ProductSpace& space, const GroupedWord& gw) {
    require_degree(space, gw.degree(), "grouped word");
    const Partition sigma = gw.interval_partition();
    const auto& lattice = enumerate_nc(sigma.size());
    Complex sum;
    for (std::size_t k : connecting_partitions(sigma)) {
        sum += kappa_pure_pi(space, lattice[k], gw.items());
    }
    return sum;
}

Complex kappa_pi_products(const ProductSpace& space, const Partition& pi, const GroupedWord& gw) {
    if (pi.size() != static_cast<int>(gw.group_count())) {
        throw DimensionError("partition of " + std::to_string(pi.size()) + " elements applied to " +
                             std::to_string(gw.group_count()) + " groups");
    }
    Complex product(1);
    for (const auto& block : pi.blocks()) {
        std::vector<std::vector<PureElement>> groups;
        for (int j : block) {
            groups.push_back(gw.group(static_cast<std::size_t>(j)));
        }
        const Complex k = kappa_products(space, GroupedWord(groups));
        if (k.is_zero()) {
            return Complex(0);
        }
        product *= k;
    }
    return product;
}

std::vector<PureElement> tensor_items(const ProductSpace& space, const TensorWord& t) {
    if (t.empty()) {
        return {PureElement::identity()};
    }
    std::vector<PureElement> out;
    for (std::size_t u = 0; u < t.length(); ++u) {
        out.push_back(PureElement{t.factor(u), component_polynomial(space, t, u)});
    }
    return out;
}

namespace {

/// Calls f(groups, weight) for every choice of one term per element.
template <class F>
void for_each_term_choice(const ProductSpace& space, std::span<const FreeElement> xs, F&& f) {
    std::vector<std::vector<PureElement>> groups(xs.size());
    auto recurse = [&](auto&& self, std::size_t k, const Complex& weight) -> void {
        if (k == xs.size()) {
            f(groups, weight);
            return;
        }
        xs[k].for_each_term([&](const TensorWord& t, const Complex& c) {
            groups[k] = tensor_items(space, t);
            self(self, k + 1, weight * c);
        });
    };
    recurse(recurse, 0, Complex(1));
}

} // namespace

Complex kappa_elements(const ProductSpace& space, std::span<const FreeElement> args) {
    Complex total;
    for_each_term_choice(space, args, [&](const std::vector<std::vector<PureElement>>& groups, const Complex& w) {
        total += w * kappa_products(space, GroupedWord(groups));
    });
    return total;
}

Complex state_eval(const ProductSpace&, const FreeElement& x) {
    return x.scalar();
}

Complex state_eval_pure(const ProductSpace& space, std::span<const PureElement> args) {
    if (args.empty()) {
        return Complex(1);
    }
    require_degree(space, items_degree(args), "product");
    Complex sum;
    for (const auto& sigma : enumerate_nc(static_cast<int>(args.size()))) {
        sum += kappa_pure_pi(space, sigma, args);
    }
    return sum;
}

Complex state_eval_word(const ProductSpace& space, const Word& w) {
    std::vector<PureElement> items;
    items.reserve(w.degree());
    for (const auto& l : w.letters()) {
        space.alphabet().check(l);
        items.push_back(PureElement::of(l));
    }
    return state_eval_pure(space, items);
}

Complex state_eval_product(const ProductSpace& space, std::span<const FreeElement> xs) {
    if (xs.empty()) {
        return Complex(1);
    }
    const auto& lattice = enumerate_nc(static_cast<int>(xs.size()));
    Complex total;
    for_each_term_choice(space, xs, [&](const std::vector<std::vector<PureElement>>& groups, const Complex& w) {
        // kappa over each subset of groups, shared between the partitions.
        std::map<unsigned, Complex> by_block;
        Complex sum;
        for (const auto& pi : lattice) {
            Complex product(1);
            for (const auto& block : pi.blocks()) {
                unsigned mask = 0;
                for (int j : block) {
                    mask |= 1U << j;
                }
                auto it = by_block.find(mask);
                if (it == by_block.end()) {
                    std::vector<std::vector<PureElement>> sub;
                    for (int j : block) {
                        sub.push_back(groups[static_cast<std::size_t>(j)]);
                    }
                    it = by_block.emplace(mask, kappa_products(space, GroupedWord(sub))).first;
                }
                product *= it->second;
                if (product.is_zero()) {
                    break;
                }
            }
            sum += product;
        }
        total += w * sum;
    });
    return total;
}

Complex state_eval_reduced(const ProductSpace& space, std::span<const FreeElement> xs) {
    FreeElement product = FreeElement::identity();
    for (const auto& x : xs) {
        product = multiply(space, product, x);
    }
    return state_eval(space, product);
}

} // namespace freeprod

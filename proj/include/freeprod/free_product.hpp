#pragma once

#include "freeprod/cumulant_calculus.hpp"
#include "freeprod/moment_space.hpp"
#include "freeprod/nc_lattice.hpp"

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freeprod {

/// A family of factor states sharing one degree bound, together with the
/// combined alphabet and a lazily filled cumulant table per factor.
class ProductSpace {
public:
    /// Each factor's own degree bound must be at least `degree_bound`.
    ProductSpace(std::vector<FactorState> factors, int degree_bound);

    int degree_bound() const noexcept { return degree_bound_; }
    std::size_t factor_count() const noexcept { return factors_.size(); }
    std::vector<FactorIndex> factor_indices() const;
    const FactorState& factor(FactorIndex index) const;
    const CumulantTable& cumulants(FactorIndex index) const;
    const Alphabet& alphabet() const noexcept { return alphabet_; }

private:
    std::size_t slot(FactorIndex index) const;

    int degree_bound_ = 0;
    std::vector<std::shared_ptr<const FactorState>> factors_;
    std::vector<CumulantTable> cumulants_;
    Alphabet alphabet_;
};

/// Basis tensor w_1° ⊗ ... ⊗ w_k° of the free product: each component is a
/// non-empty monomial of one factor, standing for its centered version
/// w - phi(w) 1, and neighbouring components come from different factors.
/// The empty tensor word is the identity.
class TensorWord {
public:
    TensorWord() = default;
    explicit TensorWord(std::vector<Word> components);

    std::size_t length() const noexcept { return components_.size(); }
    bool empty() const noexcept { return components_.empty(); }
    const std::vector<Word>& components() const noexcept { return components_; }
    FactorIndex factor(std::size_t u) const { return *components_[u].factor(); }
    std::vector<FactorIndex> pattern() const;
    std::size_t degree() const;

    /// (w_1° ⊗ ... ⊗ w_k°)* = (w_k*)° ⊗ ... ⊗ (w_1*)°
    TensorWord star() const;

    friend bool operator==(const TensorWord&, const TensorWord&) = default;
    friend auto operator<=>(const TensorWord& a, const TensorWord& b) {
        if (a.components_.size() != b.components_.size()) {
            return a.components_.size() <=> b.components_.size();
        }
        return a.components_ <=> b.components_;
    }

private:
    std::vector<Word> components_;
};

/// c 1 ⊕ sum of coefficients times basis tensor words. Canonical by
/// construction: the basis is fixed and zero coefficients are dropped, so
/// equality is structural.
class FreeElement {
public:
    FreeElement() = default;
    static FreeElement identity() { return scalar(Complex(1)); }
    static FreeElement scalar(const Complex& c);
    static FreeElement basis(const TensorWord& t, const Complex& c = Complex(1));

    const Complex& scalar() const noexcept { return scalar_; }
    const std::map<TensorWord, Complex>& words() const noexcept { return words_; }
    bool is_zero() const { return scalar_.is_zero() && words_.empty(); }
    Complex coefficient(const TensorWord& t) const;

    void add_term(const TensorWord& t, const Complex& c);
    /// Visits the scalar part (as the empty tensor word) and then every word.
    template <class F>
    void for_each_term(F&& f) const {
        if (!scalar_.is_zero()) {
            f(TensorWord{}, scalar_);
        }
        for (const auto& [t, c] : words_) {
            f(t, c);
        }
    }

    FreeElement& operator+=(const FreeElement& o);
    FreeElement& operator-=(const FreeElement& o);
    FreeElement& operator*=(const Complex& c);
    friend FreeElement operator+(FreeElement a, const FreeElement& b) { return a += b; }
    friend FreeElement operator-(FreeElement a, const FreeElement& b) { return a -= b; }
    friend FreeElement operator*(const Complex& c, FreeElement a) { return a *= c; }
    friend bool operator==(const FreeElement&, const FreeElement&) = default;

private:
    Complex scalar_;
    std::map<TensorWord, Complex> words_;
};

std::string format(const Alphabet& alphabet, const TensorWord& t);
std::string format(const Alphabet& alphabet, const FreeElement& x);

/// The centered polynomial w - phi(w) 1 standing for component u.
Polynomial component_polynomial(const ProductSpace& space, const TensorWord& t, std::size_t u);

/// phi_i(p) 1 ⊕ (p - phi_i(p) 1) written in the tensor basis.
FreeElement embed(const ProductSpace& space, FactorIndex index, const Polynomial& p);

/// Concatenation followed by reduction at equal neighbouring factors.
FreeElement multiply(const ProductSpace& space, const FreeElement& x, const FreeElement& y);

FreeElement star_element(const FreeElement& x);

/// Product of embedded letters.
FreeElement element_from_word(const ProductSpace& space, const Word& w);

/// An element of a single factor algebra. `factor` is empty for scalar
/// multiples of the identity, which belong to every factor.
struct PureElement {
    std::optional<FactorIndex> factor;
    Polynomial value;

    static PureElement identity() { return {std::nullopt, Polynomial::constant(Complex(1))}; }
    static PureElement of(const Letter& l) { return {l.factor, Polynomial(Word{l})}; }
};

/// A flat sequence of pure elements cut into consecutive groups; group j is the
/// product of its items. Inside a group neighbouring items come from different
/// factors.
class GroupedWord {
public:
    GroupedWord(std::vector<PureElement> items, std::vector<std::size_t> boundaries);
    explicit GroupedWord(const std::vector<std::vector<PureElement>>& groups);

    const std::vector<PureElement>& items() const noexcept { return items_; }
    /// s_1 < s_2 < ... < s_m = items().size()
    const std::vector<std::size_t>& boundaries() const noexcept { return boundaries_; }
    std::size_t group_count() const noexcept { return boundaries_.size(); }
    std::vector<PureElement> group(std::size_t j) const;
    /// {1..s_1}{s_1+1..s_2}...
    Partition interval_partition() const;
    std::size_t degree() const;

private:
    std::vector<PureElement> items_;
    std::vector<std::size_t> boundaries_;
};

/// Cumulant of pure arguments: the factor cumulant when all arguments lie in
/// one factor, zero when two come from different factors.
Complex kappa_base(const ProductSpace& space, std::span<const PureElement> args);
Complex kappa_base(const ProductSpace& space, std::span<const Letter> letters);

/// Multiplicative extension of kappa_base.
Complex kappa_pure_pi(const ProductSpace& space, const Partition& pi, std::span<const PureElement> args);

/// kappa_m(b_1, ..., b_m) for the groups b_j: the sum of kappa_pure_pi over
/// pi in NC(s_m) with pi joined with the interval partition equal to 1.
Complex kappa_products(const ProductSpace& space, const GroupedWord& gw);

/// Product over the blocks of pi (a partition of the groups) of kappa_products.
Complex kappa_pi_products(const ProductSpace& space, const Partition& pi, const GroupedWord& gw);

/// kappa_m(x_1, ..., x_m) for free-product elements, multilinear in each slot.
Complex kappa_elements(const ProductSpace& space, std::span<const FreeElement> args);

/// phi of a bare element: its scalar part.
Complex state_eval(const ProductSpace& space, const FreeElement& x);

/// phi(a_1 ... a_n) = sum over sigma in NC(n) of kappa_sigma[a] for pure a_j.
Complex state_eval_pure(const ProductSpace& space, std::span<const PureElement> args);
Complex state_eval_word(const ProductSpace& space, const Word& w);

/// phi(x_1 ... x_m) with each x_j kept as a group of pure elements; the sum
/// over pi in NC(m) of kappa_pi[x_1, ..., x_m].
Complex state_eval_product(const ProductSpace& space, std::span<const FreeElement> xs);

/// phi(x_1 ... x_m) by multiplying out in the algebra first.
Complex state_eval_reduced(const ProductSpace& space, std::span<const FreeElement> xs);

/// Items of a basis tensor word: one pure element per centered component, or
/// the identity for the empty tensor word.
std::vector<PureElement> tensor_items(const ProductSpace& space, const TensorWord& t);

} // namespace freeprod

#pragma once

#include "freeprod/free_product.hpp"
#include "freeprod/moment_space.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace freeprod {

/// A state on the algebra generated by several factors' letters, given by its
/// moments on every word up to a degree bound. Used both for constructed free
/// products and for hand-built joint distributions.
class JointState {
public:
    JointState(Alphabet alphabet, int degree_bound, const std::map<Word, Complex>& moments);

    static JointState from_function(Alphabet alphabet, int degree_bound,
                                    const std::function<Complex(const Word&)>& moment);
    /// Tabulates the free product state on every word of degree <= degree_bound.
    static JointState of(const ProductSpace& space, int degree_bound);
    static JointState of(const ProductSpace& space) { return of(space, space.degree_bound()); }

    const Alphabet& alphabet() const noexcept { return functional_.alphabet(); }
    int degree_bound() const noexcept { return functional_.degree_bound(); }
    Complex moment(const Word& w) const { return functional_.moment(w); }
    const MomentFunctional& functional() const noexcept { return functional_; }

    /// Copy with phi(w) replaced (and phi(w*) conjugated to match).
    JointState with_moment(const Word& w, const Complex& value) const;

    /// The restriction to one factor.
    FactorState restrict(FactorIndex index) const;

private:
    explicit JointState(MomentFunctional f) : functional_(std::move(f)) {}
    MomentFunctional functional_;
};

enum class FreenessMode { moments, cumulants };

std::string to_string(FreenessMode mode);

struct Violation {
    std::string word;
    Complex value;
};

struct FreenessReport {
    FreenessMode mode = FreenessMode::moments;
    std::size_t checked_words = 0;
    int max_degree = 0;
    std::vector<Violation> violations;

    bool holds() const noexcept { return violations.empty(); }
};

/// phi(w_1° w_2° ... w_k°) for every alternating tuple of non-empty factor
/// monomials with total degree <= max_degree.
FreenessReport check_freeness_moments(const JointState& state, int max_degree);
FreenessReport check_freeness_moments(const ProductSpace& space, int max_degree);

/// kappa_n(l_1, ..., l_n) from the joint moments for every letter tuple with
/// 2 <= n <= max_degree that touches at least two factors.
FreenessReport check_freeness_cumulants(const JointState& state, int max_degree);
FreenessReport check_freeness_cumulants(const ProductSpace& space, int max_degree);

/// True when the two reports above agree.
bool check_equivalence(const JointState& state, int max_degree);

/// kappa_2(a*, b) by the pairing formula: the product over slots of the factor
/// variances of the centered components when a and b have the same factor
/// pattern, and 0 otherwise.
Complex variance_factorization(const ProductSpace& space, const TensorWord& a, const TensorWord& b);

/// The same value through the general cumulant formula for products.
Complex variance_general(const ProductSpace& space, const TensorWord& a, const TensorWord& b);

/// Every non-empty basis tensor word of degree <= max_degree, ordered by
/// length and then by components.
std::vector<TensorWord> tensor_words_up_to(const Alphabet& alphabet, int max_degree);
std::vector<TensorWord> tensor_words_up_to(const ProductSpace& space, int max_degree);

using ComplexMatrix = std::vector<std::vector<Complex>>;

/// entries[s][t] = phi(basis[s]* basis[t]).
struct GramMatrix {
    std::vector<std::string> labels;
    ComplexMatrix entries;

    std::size_t size() const noexcept { return entries.size(); }
};

/// Over 1 and every basis tensor word of degree <= max_degree.
GramMatrix gram_matrix(const ProductSpace& space, int max_degree);
/// Over every word of degree <= max_degree in the factor's letters.
GramMatrix gram_matrix(const FactorState& state, int max_degree);

struct PsdResult {
    bool psd = true;
    /// Positive pivots in elimination order.
    std::vector<Rational> pivots;
    std::size_t rank = 0;
    /// x with x* M x < 0 when the matrix is not PSD.
    std::optional<std::vector<Complex>> witness;
};

/// Exact LDL* with diagonal pivoting. Throws NotHermitianError.
PsdResult ldl_psd(const ComplexMatrix& m);

/// x* M x
Complex quadratic_form(const ComplexMatrix& m, std::span<const Complex> x);

void require_hermitian(const ComplexMatrix& m);

struct SchurCheck {
    std::vector<FactorIndex> pattern;
    std::vector<std::string> labels;
    /// kappa_2(a_s*, a_t) through the product cumulant formula.
    ComplexMatrix m;
    /// Per-slot factor variances of the centered components.
    std::vector<ComplexMatrix> slots;
    bool holds = true;
};

/// For each factor pattern of length >= 1 up to `max_degree`, compares M with
/// the entrywise product of the slot matrices.
std::vector<SchurCheck> check_schur_structure(const ProductSpace& space, int max_degree);

struct PositivityResult {
    GramMatrix gram;
    PsdResult psd;
    /// Empty for a single factor state.
    std::vector<SchurCheck> schur;

    bool schur_holds() const;
};

/// Requires 2 max_degree <= N.
PositivityResult check_positivity(const ProductSpace& space, int max_degree);
PositivityResult check_positivity(const FactorState& state, int max_degree);

struct VarianceAudit {
    Complex total;
    /// kappa_2(a_p*, a_p) for the part a_p of a on each factor pattern.
    std::map<std::vector<FactorIndex>, Complex> by_pattern;

    Complex pattern_sum() const;
};

/// kappa_2(a*, a) next to its split by factor pattern; the two agree because
/// constants and mismatched patterns contribute nothing.
VarianceAudit audit_variance(const ProductSpace& space, const FreeElement& a);

} // namespace freeprod

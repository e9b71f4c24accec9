#pragma once

#include "freeprod/nc_lattice.hpp"
#include "freeprod/scalar.hpp"

#include <compare>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace freeprod {

using FactorIndex = int;

struct GeneratorSymbol {
    std::string name;
    bool selfadjoint = false;
};

/// One generator occurrence, tagged with the factor algebra it belongs to.
/// `starred` is never set on a selfadjoint generator; Word normalizes it.
struct Letter {
    FactorIndex factor = 0;
    int generator = 0;
    bool selfadjoint = false;
    bool starred = false;

    Letter star() const {
        Letter l = *this;
        l.starred = !selfadjoint && !starred;
        return l;
    }

    friend bool operator==(const Letter& a, const Letter& b) {
        return a.factor == b.factor && a.generator == b.generator && a.starred == b.starred;
    }
    friend auto operator<=>(const Letter& a, const Letter& b) {
        return std::tie(a.factor, a.generator, a.starred) <=> std::tie(b.factor, b.generator, b.starred);
    }
};

/// A monomial. The empty word is the identity.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Letter> letters);
    Word(std::initializer_list<Letter> letters) : Word(std::vector<Letter>(letters)) {}

    std::size_t degree() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    std::span<const Letter> letters() const noexcept { return letters_; }
    const Letter& operator[](std::size_t k) const { return letters_[k]; }

    /// (x_1 ... x_k)* = x_k* ... x_1*
    Word star() const;

    /// The factor shared by every letter; nullopt for the empty word or a
    /// word mixing factors.
    std::optional<FactorIndex> factor() const;
    bool within(FactorIndex f) const;

    friend Word operator*(const Word& a, const Word& b);
    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word& a, const Word& b) {
        if (a.degree() != b.degree()) {
            return a.degree() <=> b.degree();
        }
        return a.letters_ <=> b.letters_;
    }

private:
    std::vector<Letter> letters_;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept;
};

/// Finite linear combination of words. Zero coefficients are never stored.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(const Word& w, Complex coefficient = Complex(1));
    static Polynomial constant(const Complex& c);

    const std::map<Word, Complex>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    Complex coefficient(const Word& w) const;
    std::size_t degree() const;

    void add_term(const Word& w, const Complex& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Complex& c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Complex& c) { return a *= c; }
    friend Polynomial operator*(const Complex& c, Polynomial a) { return a *= c; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// Antilinear: conjugates coefficients and stars every word.
    Polynomial star() const;

private:
    std::map<Word, Complex> terms_;
};

inline Word star(const Word& w) { return w.star(); }
inline Polynomial star(const Polynomial& p) { return p.star(); }

/// Generator tables of one or more factors. Generator names are unique across
/// all factors, so a bare name resolves to exactly one letter.
class Alphabet {
public:
    struct Factor {
        FactorIndex index = 0;
        std::string name;
        std::vector<GeneratorSymbol> generators;
    };

    void add_factor(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators);

    const std::vector<Factor>& factors() const noexcept { return factors_; }
    const Factor& factor(FactorIndex index) const;
    bool has_factor(FactorIndex index) const;

    Letter letter(FactorIndex factor, int generator, bool starred = false) const;
    /// Every letter: per factor, per generator, unstarred then starred (the
    /// starred variant only for non-selfadjoint generators).
    std::vector<Letter> letters() const;
    std::vector<Letter> letters(FactorIndex factor) const;

    /// Throws FactorMismatchError when the letter is not from this alphabet.
    void check(const Letter& l) const;

    /// "a", "a*"
    Letter parse_letter(std::string_view token) const;
    /// Space-separated letters; "" and "1" give the empty word.
    Word parse_word(std::string_view text) const;

    std::string format(const Letter& l) const;
    /// Empty word prints as "1".
    std::string format(const Word& w) const;
    std::string format(const Polynomial& p) const;

private:
    std::vector<Factor> factors_;
    std::map<std::string, std::pair<FactorIndex, int>, std::less<>> by_name_;
};

/// Every word over `letters` with min_degree <= degree <= max_degree, by
/// degree and then lexicographically in the order of `letters`.
std::vector<Word> words_up_to(std::span<const Letter> letters, int max_degree, int min_degree = 0);

/// A unital, star-compatible moment table on all words of degree <= N over an
/// alphabet. Construction normalizes the input: phi(1) = 1 is enforced,
/// missing star-conjugates are filled in, conflicting entries are rejected and
/// every word up to N must end up with a value.
class MomentFunctional {
public:
    MomentFunctional(Alphabet alphabet, int degree_bound, const std::map<Word, Complex>& moments);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    int degree_bound() const noexcept { return degree_bound_; }

    /// Throws TruncationError past the degree bound and FactorMismatchError for
    /// letters outside the alphabet.
    Complex moment(const Word& w) const;

    const std::unordered_map<Word, Complex, WordHash>& table() const noexcept { return table_; }

private:
    Alphabet alphabet_;
    int degree_bound_ = 0;
    std::unordered_map<Word, Complex, WordHash> table_;
};

/// A factor (*-)probability space presented by generators and its moments up
/// to a degree bound.
class FactorState {
public:
    FactorState(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators, int degree_bound,
                const std::map<Word, Complex>& moments);

    /// Tabulates `moment` on every word up to the degree bound.
    static FactorState from_function(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators,
                                     int degree_bound, const std::function<Complex(const Word&)>& moment);

    FactorIndex index() const noexcept { return index_; }
    const std::string& name() const { return functional_.alphabet().factor(index_).name; }
    const std::vector<GeneratorSymbol>& generators() const { return functional_.alphabet().factor(index_).generators; }
    int degree_bound() const noexcept { return functional_.degree_bound(); }
    const Alphabet& alphabet() const noexcept { return functional_.alphabet(); }
    std::vector<Letter> letters() const { return alphabet().letters(index_); }
    Letter letter(int generator, bool starred = false) const { return alphabet().letter(index_, generator, starred); }

    Complex moment(const Word& w) const { return functional_.moment(w); }
    /// Linear extension of the moment table.
    Complex phi(const Polynomial& p) const;

    const MomentFunctional& functional() const noexcept { return functional_; }

private:
    FactorIndex index_;
    MomentFunctional functional_;
};

/// phi(a_1 a_2 ... a_n)
Complex eval_phi_n(const FactorState& state, std::span<const Polynomial> args);

/// Product over the blocks (i_1 < ... < i_s) of pi of phi(a_{i_1} ... a_{i_s}).
Complex eval_phi_pi(const FactorState& state, const Partition& pi, std::span<const Letter> letters);
Complex eval_phi_pi(const FactorState& state, const Partition& pi, std::span<const Word> args);

/// p - phi(p) 1
Polynomial center(const FactorState& state, const Polynomial& p);

} // namespace freeprod

namespace freeprod {

/// Multilinear extension of a function of words: the sum, over every choice of
/// one term from each argument, of the product of the chosen coefficients times
/// `f` on the chosen words.
Complex multilinear_extension(std::span<const Polynomial> args,
                              const std::function<Complex(std::span<const Word>)>& f);

} // namespace freeprod

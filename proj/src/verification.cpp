#include "freeprod/verification.hpp"

#include "freeprod/cumulant_calculus.hpp"
#include "freeprod/errors.hpp"

#include <algorithm>

namespace freeprod {

namespace {

void require_bound(int max_degree, int bound) {
    if (max_degree < 0) {
        throw ValidationError("degree must be non-negative, got " + std::to_string(max_degree));
    }
    if (max_degree > bound) {
        throw TruncationError("degree " + std::to_string(max_degree) + " exceeds the bound " + std::to_string(bound));
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k > 0) {
            out += sep;
        }
        out += parts[k];
    }
    return out;
}

/// Calls f on every alternating tuple of non-empty factor monomials with total
/// degree <= max_degree, depth first.
template <class F>
void for_each_alternating(const Alphabet& alphabet, int max_degree, F&& f) {
    std::vector<std::pair<FactorIndex, std::vector<Word>>> monomials;
    for (const auto& factor : alphabet.factors()) {
        const auto letters = alphabet.letters(factor.index);
        monomials.emplace_back(factor.index, words_up_to(letters, max_degree, 1));
    }
    std::vector<Word> tuple;
    auto recurse = [&](auto&& self, std::optional<FactorIndex> last, int degree) -> void {
        if (!tuple.empty()) {
            f(static_cast<const std::vector<Word>&>(tuple));
        }
        for (const auto& [index, words] : monomials) {
            if (last && *last == index) {
                continue;
            }
            for (const auto& w : words) {
                const int d = degree + static_cast<int>(w.degree());
                if (d > max_degree) {
                    break;
                }
                tuple.push_back(w);
                self(self, index, d);
                tuple.pop_back();
            }
        }
    };
    recurse(recurse, std::nullopt, 0);
}

} // namespace

// ---------------------------------------------------------------------------

JointState::JointState(Alphabet alphabet, int degree_bound, const std::map<Word, Complex>& moments)
    : functional_(std::move(alphabet), degree_bound, moments) {}

JointState JointState::from_function(Alphabet alphabet, int degree_bound,
                                     const std::function<Complex(const Word&)>& moment) {
    std::map<Word, Complex> table;
    for (const auto& w : words_up_to(alphabet.letters(), degree_bound)) {
        table.emplace(w, moment(w));
    }
    return JointState(std::move(alphabet), degree_bound, table);
}

JointState JointState::of(const ProductSpace& space, int degree_bound) {
    require_bound(degree_bound, space.degree_bound());
    return from_function(space.alphabet(), degree_bound,
                         [&](const Word& w) { return state_eval_word(space, w); });
}

JointState JointState::with_moment(const Word& w, const Complex& value) const {
    if (w.empty()) {
        throw ValidationError("phi(1) is fixed to 1");
    }
    const Word ws = w.star();
    if (ws == w && !value.is_real()) {
        throw ValidationError("'" + alphabet().format(w) + "' is selfadjoint, its moment must be real");
    }
    std::map<Word, Complex> table(functional_.table().begin(), functional_.table().end());
    table[w] = value;
    table[ws] = value.conj();
    return JointState(MomentFunctional(alphabet(), degree_bound(), table));
}

FactorState JointState::restrict(FactorIndex index) const {
    const auto& factor = alphabet().factor(index);
    std::map<Word, Complex> table;
    for (const auto& [w, c] : functional_.table()) {
        if (w.within(index)) {
            table.emplace(w, c);
        }
    }
    return FactorState(index, factor.name, factor.generators, degree_bound(), table);
}

std::string to_string(FreenessMode mode) {
    return mode == FreenessMode::moments ? "moments" : "cumulants";
}

// ---------------------------------------------------------------------------

FreenessReport check_freeness_moments(const JointState& state, int max_degree) {
    require_bound(max_degree, state.degree_bound());
    FreenessReport report;
    report.mode = FreenessMode::moments;
    report.max_degree = max_degree;
    const Alphabet& alphabet = state.alphabet();
    for_each_alternating(alphabet, max_degree, [&](const std::vector<Word>& tuple) {
        const std::size_t k = tuple.size();
        std::vector<Complex> means;
        for (const auto& w : tuple) {
            means.push_back(state.moment(w));
        }
        // prod_j (w_j - phi(w_j)) expanded over the subsets kept as words.
        Complex value;
        for (unsigned mask = 0; mask < (1U << k); ++mask) {
            Complex weight(1);
            Word kept;
            for (std::size_t j = 0; j < k; ++j) {
                if (mask & (1U << j)) {
                    kept = kept * tuple[j];
                } else {
                    weight *= -means[j];
                }
            }
            if (!weight.is_zero()) {
                value += weight * state.moment(kept);
            }
        }
        ++report.checked_words;
        if (!value.is_zero()) {
            std::vector<std::string> parts;
            for (const auto& w : tuple) {
                parts.push_back("(" + alphabet.format(w) + ")°");
            }
            report.violations.push_back({join(parts, " "), value});
        }
    });
    return report;
}

FreenessReport check_freeness_moments(const ProductSpace& space, int max_degree) {
    return check_freeness_moments(JointState::of(space, max_degree), max_degree);
}

FreenessReport check_freeness_cumulants(const JointState& state, int max_degree) {
    require_bound(max_degree, state.degree_bound());
    FreenessReport report;
    report.mode = FreenessMode::cumulants;
    report.max_degree = max_degree;
    const Alphabet& alphabet = state.alphabet();
    const auto letters = alphabet.letters();
    const MomentOracle phi = [&](const Word& w) { return state.moment(w); };
    for (int n = 2; n <= max_degree; ++n) {
        std::vector<std::size_t> odometer(static_cast<std::size_t>(n), 0);
        while (true) {
            bool mixed = false;
            for (std::size_t j = 1; j < odometer.size(); ++j) {
                mixed = mixed || letters[odometer[j]].factor != letters[odometer[0]].factor;
            }
            if (mixed) {
                std::vector<Word> args;
                for (std::size_t j : odometer) {
                    args.push_back(Word{{letters[j]}});
                }
                const Complex value = free_cumulant(args, phi);
                ++report.checked_words;
                if (!value.is_zero()) {
                    std::vector<std::string> parts;
                    for (const auto& w : args) {
                        parts.push_back(alphabet.format(w));
                    }
                    report.violations.push_back({"kappa(" + join(parts, ", ") + ")", value});
                }
            }
            std::size_t j = odometer.size();
            while (j > 0 && ++odometer[j - 1] == letters.size()) {
                odometer[j - 1] = 0;
                --j;
            }
            if (j == 0) {
                break;
            }
        }
    }
    return report;
}

FreenessReport check_freeness_cumulants(const ProductSpace& space, int max_degree) {
    return check_freeness_cumulants(JointState::of(space, max_degree), max_degree);
}

bool check_equivalence(const JointState& state, int max_degree) {
    return check_freeness_moments(state, max_degree).holds() == check_freeness_cumulants(state, max_degree).holds();
}

// ---------------------------------------------------------------------------

Complex variance_factorization(const ProductSpace& space, const TensorWord& a, const TensorWord& b) {
    for (std::size_t u = 0; u < std::min(a.length(), b.length()); ++u) {
        if (static_cast<int>(a.components()[u].degree() + b.components()[u].degree()) > space.degree_bound()) {
            throw TruncationError("slot " + std::to_string(u + 1) + " exceeds the degree bound");
        }
    }
    if (a.empty() || b.empty() || a.pattern() != b.pattern()) {
        return Complex(0);
    }
    Complex product(1);
    for (std::size_t u = 0; u < a.length(); ++u) {
        const std::vector<Polynomial> args{component_polynomial(space, a, u).star(), component_polynomial(space, b, u)};
        product *= space.cumulants(a.factor(u)).value(std::span<const Polynomial>(args));
        if (product.is_zero()) {
            break;
        }
    }
    return product;
}

Complex variance_general(const ProductSpace& space, const TensorWord& a, const TensorWord& b) {
    return kappa_products(space, GroupedWord({tensor_items(space, a.star()), tensor_items(space, b)}));
}

// ---------------------------------------------------------------------------

std::vector<TensorWord> tensor_words_up_to(const Alphabet& alphabet, int max_degree) {
    std::vector<TensorWord> out;
    for_each_alternating(alphabet, max_degree, [&](const std::vector<Word>& tuple) { out.emplace_back(tuple); });
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TensorWord> tensor_words_up_to(const ProductSpace& space, int max_degree) {
    require_bound(max_degree, space.degree_bound());
    return tensor_words_up_to(space.alphabet(), max_degree);
}

void require_hermitian(const ComplexMatrix& m) {
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (m[s].size() != m.size()) {
            throw DimensionError("matrix is not square");
        }
        for (std::size_t t = s; t < m.size(); ++t) {
            if (!(m[t][s] == m[s][t].conj())) {
                throw NotHermitianError("entries (" + std::to_string(s + 1) + "," + std::to_string(t + 1) +
                                        ") and (" + std::to_string(t + 1) + "," + std::to_string(s + 1) +
                                        ") are not conjugate");
            }
        }
    }
}

GramMatrix gram_matrix(const ProductSpace& space, int max_degree) {
    require_bound(2 * max_degree, space.degree_bound());
    std::vector<FreeElement> basis{FreeElement::identity()};
    GramMatrix g;
    g.labels.push_back("1");
    for (const auto& t : tensor_words_up_to(space, max_degree)) {
        basis.push_back(FreeElement::basis(t));
        g.labels.push_back(format(space.alphabet(), t));
    }
    std::vector<FreeElement> starred;
    for (const auto& b : basis) {
        starred.push_back(star_element(b));
    }
    g.entries.assign(basis.size(), std::vector<Complex>(basis.size()));
    for (std::size_t s = 0; s < basis.size(); ++s) {
        for (std::size_t t = 0; t < basis.size(); ++t) {
            g.entries[s][t] = state_eval(space, multiply(space, starred[s], basis[t]));
        }
    }
    require_hermitian(g.entries);
    return g;
}

GramMatrix gram_matrix(const FactorState& state, int max_degree) {
    require_bound(2 * max_degree, state.degree_bound());
    const auto letters = state.letters();
    const auto words = words_up_to(letters, max_degree);
    GramMatrix g;
    for (const auto& w : words) {
        g.labels.push_back(state.alphabet().format(w));
    }
    g.entries.assign(words.size(), std::vector<Complex>(words.size()));
    for (std::size_t s = 0; s < words.size(); ++s) {
        for (std::size_t t = 0; t < words.size(); ++t) {
            g.entries[s][t] = state.moment(words[s].star() * words[t]);
        }
    }
    require_hermitian(g.entries);
    return g;
}

Complex quadratic_form(const ComplexMatrix& m, std::span<const Complex> x) {
    if (x.size() != m.size()) {
        throw DimensionError("vector of length " + std::to_string(x.size()) + " against a matrix of size " +
                             std::to_string(m.size()));
    }
    Complex sum;
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (x[s].is_zero()) {
            continue;
        }
        Complex row;
        for (std::size_t t = 0; t < m.size(); ++t) {
            row += m[s][t] * x[t];
        }
        sum += x[s].conj() * row;
    }
    return sum;
}

PsdResult ldl_psd(const ComplexMatrix& m) {
    require_hermitian(m);
    const std::size_t n = m.size();
    ComplexMatrix s = m;
    // v[j] is the vector whose quadratic form the current s[j][j] is.
    std::vector<std::vector<Complex>> v(n, std::vector<Complex>(n));
    for (std::size_t j = 0; j < n; ++j) {
        v[j][j] = Complex(1);
    }
    std::vector<bool> active(n, true);
    PsdResult result;
    auto fail = [&](std::vector<Complex> x) {
        result.psd = false;
        result.witness = std::move(x);
        return result;
    };
    while (true) {
        std::optional<std::size_t> pivot;
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j]) {
                continue;
            }
            const Rational& d = s[j][j].re();
            if (sgn(d) < 0) {
                return fail(v[j]);
            }
            if (sgn(d) > 0 && !pivot) {
                pivot = j;
            }
        }
        if (!pivot) {
            // Every remaining diagonal entry is zero, so the rest must vanish.
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; active[i] && j < n; ++j) {
                    if (!active[j] || j == i || s[i][j].is_zero()) {
                        continue;
                    }
                    const Rational t = (abs(s[j][j].re()) + 1) / s[i][j].norm2();
                    const Complex alpha = -(Complex(t) * s[i][j]);
                    std::vector<Complex> x = v[j];
                    for (std::size_t k = 0; k < n; ++k) {
                        x[k] += alpha * v[i][k];
                    }
                    return fail(std::move(x));
                }
            }
            return result;
        }
        const std::size_t p = *pivot;
        const Complex d = s[p][p];
        result.pivots.push_back(d.re());
        ++result.rank;
        active[p] = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (!active[j] || s[p][j].is_zero()) {
                continue;
            }
            const Complex c = s[p][j] / d;
            for (std::size_t i = 0; i < n; ++i) {
                if (active[i]) {
                    s[i][j] -= s[i][p] * c;
                }
            }
            for (std::size_t k = 0; k < n; ++k) {
                v[j][k] -= c * v[p][k];
            }
        }
    }
}

// ---------------------------------------------------------------------------

std::vector<SchurCheck> check_schur_structure(const ProductSpace& space, int max_degree) {
    require_bound(2 * max_degree, space.degree_bound());
    std::map<std::vector<FactorIndex>, std::vector<TensorWord>> by_pattern;
    for (const auto& t : tensor_words_up_to(space, max_degree)) {
        by_pattern[t.pattern()].push_back(t);
    }
    std::vector<SchurCheck> out;
    for (const auto& [pattern, basis] : by_pattern) {
        SchurCheck check;
        check.pattern = pattern;
        const std::size_t r = basis.size();
        for (const auto& t : basis) {
            check.labels.push_back(format(space.alphabet(), t));
        }
        check.m.assign(r, std::vector<Complex>(r));
        for (std::size_t s = 0; s < r; ++s) {
            for (std::size_t t = 0; t < r; ++t) {
                check.m[s][t] = variance_general(space, basis[s], basis[t]);
            }
        }
        for (std::size_t u = 0; u < pattern.size(); ++u) {
            ComplexMatrix slot(r, std::vector<Complex>(r));
            std::vector<Polynomial> centered;
            for (const auto& t : basis) {
                centered.push_back(component_polynomial(space, t, u));
            }
            for (std::size_t s = 0; s < r; ++s) {
                for (std::size_t t = 0; t < r; ++t) {
                    const std::vector<Polynomial> args{centered[s].star(), centered[t]};
                    slot[s][t] = space.cumulants(pattern[u]).value(std::span<const Polynomial>(args));
                }
            }
            check.slots.push_back(std::move(slot));
        }
        for (std::size_t s = 0; s < r; ++s) {
            for (std::size_t t = 0; t < r; ++t) {
                Complex product(1);
                for (const auto& slot : check.slots) {
                    product *= slot[s][t];
                }
                check.holds = check.holds && product == check.m[s][t];
            }
        }
        out.push_back(std::move(check));
    }
    return out;
}

bool PositivityResult::schur_holds() const {
    return std::all_of(schur.begin(), schur.end(), [](const SchurCheck& c) { return c.holds; });
}

PositivityResult check_positivity(const ProductSpace& space, int max_degree) {
    PositivityResult result;
    result.gram = gram_matrix(space, max_degree);
    result.psd = ldl_psd(result.gram.entries);
    result.schur = check_schur_structure(space, max_degree);
    return result;
}

PositivityResult check_positivity(const FactorState& state, int max_degree) {
    PositivityResult result;
    result.gram = gram_matrix(state, max_degree);
    result.psd = ldl_psd(result.gram.entries);
    return result;
}

// ---------------------------------------------------------------------------

Complex VarianceAudit::pattern_sum() const {
    Complex sum;
    for (const auto& [pattern, value] : by_pattern) {
        sum += value;
    }
    return sum;
}

VarianceAudit audit_variance(const ProductSpace& space, const FreeElement& a) {
    VarianceAudit audit;
    {
        const std::vector<FreeElement> args{star_element(a), a};
        audit.total = kappa_elements(space, args);
    }
    std::map<std::vector<FactorIndex>, FreeElement> parts;
    for (const auto& [t, c] : a.words()) {
        parts[t.pattern()].add_term(t, c);
    }
    for (const auto& [pattern, part] : parts) {
        const std::vector<FreeElement> args{star_element(part), part};
        audit.by_pattern.emplace(pattern, kappa_elements(space, args));
    }
    return audit;
}

} // namespace freeprod

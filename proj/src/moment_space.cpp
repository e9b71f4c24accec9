#include "freeprod/moment_space.hpp"

#include "freeprod/errors.hpp"

#include <algorithm>
#include <sstream>

namespace freeprod {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
    for (auto& l : letters_) {
        if (l.selfadjoint) {
            l.starred = false;
        }
    }
}

Word Word::star() const {
    Word out;
    out.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
        out.letters_.push_back(it->star());
    }
    return out;
}

std::optional<FactorIndex> Word::factor() const {
    if (letters_.empty()) {
        return std::nullopt;
    }
    const FactorIndex f = letters_.front().factor;
    if (!within(f)) {
        return std::nullopt;
    }
    return f;
}

bool Word::within(FactorIndex f) const {
    return std::all_of(letters_.begin(), letters_.end(), [f](const Letter& l) { return l.factor == f; });
}

Word operator*(const Word& a, const Word& b) {
    Word out = a;
    out.letters_.insert(out.letters_.end(), b.letters_.begin(), b.letters_.end());
    return out;
}

std::size_t WordHash::operator()(const Word& w) const noexcept {
    std::size_t h = w.degree();
    for (const auto& l : w.letters()) {
        const std::size_t v = (static_cast<std::size_t>(l.factor) << 20) ^
                              (static_cast<std::size_t>(l.generator) << 1) ^ static_cast<std::size_t>(l.starred);
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(const Word& w, Complex coefficient) {
    add_term(w, coefficient);
}

Polynomial Polynomial::constant(const Complex& c) {
    return Polynomial(Word{}, c);
}

Complex Polynomial::coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Complex(0) : it->second;
}

std::size_t Polynomial::degree() const {
    std::size_t d = 0;
    for (const auto& [w, c] : terms_) {
        d = std::max(d, w.degree());
    }
    return d;
}

void Polynomial::add_term(const Word& w, const Complex& c) {
    if (c.is_zero()) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) {
            terms_.erase(it);
        }
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (const auto& [w, c] : o.terms_) {
        add_term(w, c);
    }
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (const auto& [w, c] : o.terms_) {
        add_term(w, -c);
    }
    return *this;
}

Polynomial& Polynomial::operator*=(const Complex& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [w, v] : terms_) {
        v *= c;
    }
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [wa, ca] : a.terms_) {
        for (const auto& [wb, cb] : b.terms_) {
            out.add_term(wa * wb, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::star() const {
    Polynomial out;
    for (const auto& [w, c] : terms_) {
        out.add_term(w.star(), c.conj());
    }
    return out;
}

// ---------------------------------------------------------------------------

void Alphabet::add_factor(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators) {
    if (has_factor(index)) {
        throw ValidationError("duplicate factor index " + std::to_string(index));
    }
    for (const auto& f : factors_) {
        if (f.name == name) {
            throw ValidationError("duplicate factor name '" + name + "'");
        }
    }
    for (std::size_t g = 0; g < generators.size(); ++g) {
        const auto& gen = generators[g];
        if (gen.name.empty() || gen.name == "1" ||
            gen.name.find_first_of(" \t\n*") != std::string::npos) {
            throw ValidationError("invalid generator name '" + gen.name + "'");
        }
        auto [it, inserted] = by_name_.try_emplace(gen.name, index, static_cast<int>(g));
        if (!inserted) {
            throw ValidationError("generator name '" + gen.name + "' is ambiguous: it appears in factors '" +
                                  factor(it->second.first).name + "' and '" + name + "'");
        }
    }
    factors_.push_back(Factor{index, std::move(name), std::move(generators)});
}

const Alphabet::Factor& Alphabet::factor(FactorIndex index) const {
    for (const auto& f : factors_) {
        if (f.index == index) {
            return f;
        }
    }
    throw FactorMismatchError("unknown factor index " + std::to_string(index));
}

bool Alphabet::has_factor(FactorIndex index) const {
    return std::any_of(factors_.begin(), factors_.end(), [index](const Factor& f) { return f.index == index; });
}

Letter Alphabet::letter(FactorIndex f, int generator, bool starred) const {
    const auto& fac = factor(f);
    if (generator < 0 || generator >= static_cast<int>(fac.generators.size())) {
        throw FactorMismatchError("factor '" + fac.name + "' has no generator #" + std::to_string(generator));
    }
    const bool sa = fac.generators[static_cast<std::size_t>(generator)].selfadjoint;
    return Letter{f, generator, sa, starred && !sa};
}

std::vector<Letter> Alphabet::letters(FactorIndex f) const {
    std::vector<Letter> out;
    const auto& fac = factor(f);
    for (int g = 0; g < static_cast<int>(fac.generators.size()); ++g) {
        out.push_back(letter(f, g, false));
        if (!fac.generators[static_cast<std::size_t>(g)].selfadjoint) {
            out.push_back(letter(f, g, true));
        }
    }
    return out;
}

std::vector<Letter> Alphabet::letters() const {
    std::vector<Letter> out;
    for (const auto& f : factors_) {
        const auto part = letters(f.index);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

void Alphabet::check(const Letter& l) const {
    if (!has_factor(l.factor)) {
        throw FactorMismatchError("letter from unknown factor " + std::to_string(l.factor));
    }
    const auto& fac = factor(l.factor);
    if (l.generator < 0 || l.generator >= static_cast<int>(fac.generators.size())) {
        throw FactorMismatchError("factor '" + fac.name + "' has no generator #" + std::to_string(l.generator));
    }
}

Letter Alphabet::parse_letter(std::string_view token) const {
    bool starred = false;
    if (!token.empty() && token.back() == '*') {
        starred = true;
        token.remove_suffix(1);
    }
    auto it = by_name_.find(token);
    if (it == by_name_.end()) {
        throw ParseError("unknown generator '" + std::string(token) + "'");
    }
    return letter(it->second.first, it->second.second, starred);
}

Word Alphabet::parse_word(std::string_view text) const {
    std::istringstream in{std::string(text)};
    std::vector<std::string> tokens;
    for (std::string token; in >> token;) {
        tokens.push_back(std::move(token));
    }
    if (tokens.size() == 1 && tokens.front() == "1") {
        return Word{};
    }
    std::vector<Letter> letters;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        try {
            letters.push_back(parse_letter(tokens[k]));
        } catch (const ParseError& e) {
            throw ParseError(e.message(), "token " + std::to_string(k + 1) + " of \"" + std::string(text) + "\"");
        }
    }
    return Word(std::move(letters));
}

std::string Alphabet::format(const Letter& l) const {
    check(l);
    std::string out = factor(l.factor).generators[static_cast<std::size_t>(l.generator)].name;
    if (l.starred) {
        out.push_back('*');
    }
    return out;
}

std::string Alphabet::format(const Word& w) const {
    if (w.empty()) {
        return "1";
    }
    std::string out;
    for (const auto& l : w.letters()) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out += format(l);
    }
    return out;
}

std::string Alphabet::format(const Polynomial& p) const {
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    for (const auto& [w, c] : p.terms()) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + to_string(c) + ")";
        if (!w.empty()) {
            out += " " + format(w);
        }
    }
    return out;
}

std::vector<Word> words_up_to(std::span<const Letter> letters, int max_degree, int min_degree) {
    std::vector<Word> out;
    std::vector<std::vector<Letter>> layer{{}};
    for (int d = 0; d <= max_degree; ++d) {
        if (d >= min_degree) {
            for (const auto& ls : layer) {
                out.emplace_back(ls);
            }
        }
        if (d == max_degree) {
            break;
        }
        std::vector<std::vector<Letter>> next;
        next.reserve(layer.size() * letters.size());
        for (const auto& ls : layer) {
            for (const auto& l : letters) {
                auto extended = ls;
                extended.push_back(l);
                next.push_back(std::move(extended));
            }
        }
        layer = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------

MomentFunctional::MomentFunctional(Alphabet alphabet, int degree_bound, const std::map<Word, Complex>& moments)
    : alphabet_(std::move(alphabet)), degree_bound_(degree_bound) {
    if (degree_bound < 1) {
        throw ValidationError("degree bound must be positive, got " + std::to_string(degree_bound));
    }
    auto insert = [&](const Word& w, const Complex& value) {
        auto [it, inserted] = table_.try_emplace(w, value);
        if (!inserted && !(it->second == value)) {
            throw ValidationError("conflicting moments for '" + alphabet_.format(w) + "': " + to_string(it->second) +
                                  " vs " + to_string(value));
        }
    };
    for (const auto& [w, value] : moments) {
        for (const auto& l : w.letters()) {
            alphabet_.check(l);
        }
        if (static_cast<int>(w.degree()) > degree_bound_) {
            throw ValidationError("moment '" + alphabet_.format(w) + "' exceeds degree bound " +
                                  std::to_string(degree_bound_));
        }
        if (w.empty() && !(value == Complex(1))) {
            throw ValidationError("phi(1) must be 1, got " + to_string(value));
        }
        insert(w, value);
        insert(w.star(), value.conj());
    }
    insert(Word{}, Complex(1));
    const auto letters = alphabet_.letters();
    for (const auto& w : words_up_to(letters, degree_bound_)) {
        if (!table_.contains(w)) {
            throw ValidationError("missing moment for '" + alphabet_.format(w) + "' (degree bound " +
                                  std::to_string(degree_bound_) + ")");
        }
    }
}

Complex MomentFunctional::moment(const Word& w) const {
    if (static_cast<int>(w.degree()) > degree_bound_) {
        throw TruncationError("moment of '" + alphabet_.format(w) + "' needs degree " + std::to_string(w.degree()) +
                              " > bound " + std::to_string(degree_bound_));
    }
    auto it = table_.find(w);
    if (it == table_.end()) {
        for (const auto& l : w.letters()) {
            alphabet_.check(l);
        }
        throw FactorMismatchError("word outside this state's alphabet");
    }
    return it->second;
}

// ---------------------------------------------------------------------------

namespace {

Alphabet single_factor(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators) {
    Alphabet a;
    a.add_factor(index, std::move(name), std::move(generators));
    return a;
}

} // namespace

FactorState::FactorState(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators,
                         int degree_bound, const std::map<Word, Complex>& moments)
    : index_(index),
      functional_(single_factor(index, std::move(name), std::move(generators)), degree_bound, moments) {
    if (functional_.alphabet().factor(index_).generators.empty()) {
        throw ValidationError("factor '" + this->name() + "' has no generators");
    }
}

FactorState FactorState::from_function(FactorIndex index, std::string name, std::vector<GeneratorSymbol> generators,
                                       int degree_bound, const std::function<Complex(const Word&)>& moment) {
    const Alphabet a = single_factor(index, name, generators);
    std::map<Word, Complex> table;
    for (const auto& w : words_up_to(a.letters(index), degree_bound)) {
        table.emplace(w, moment(w));
    }
    return FactorState(index, std::move(name), std::move(generators), degree_bound, table);
}

Complex FactorState::phi(const Polynomial& p) const {
    Complex sum;
    for (const auto& [w, c] : p.terms()) {
        if (!w.within(index_)) {
            throw FactorMismatchError("'" + alphabet().format(w) + "' is not a word of factor '" + name() + "'");
        }
        sum += c * moment(w);
    }
    return sum;
}

Complex eval_phi_n(const FactorState& state, std::span<const Polynomial> args) {
    Polynomial product = Polynomial::constant(Complex(1));
    for (const auto& a : args) {
        product = product * a;
    }
    return state.phi(product);
}

Complex eval_phi_pi(const FactorState& state, const Partition& pi, std::span<const Word> args) {
    if (static_cast<int>(args.size()) != pi.size()) {
        throw DimensionError("partition of " + std::to_string(pi.size()) + " elements applied to " +
                             std::to_string(args.size()) + " arguments");
    }
    Complex product(1);
    for (const auto& block : pi.blocks()) {
        Word w;
        for (int i : block) {
            w = w * args[static_cast<std::size_t>(i)];
        }
        product *= state.phi(Polynomial(w));
    }
    return product;
}

Complex eval_phi_pi(const FactorState& state, const Partition& pi, std::span<const Letter> letters) {
    std::vector<Word> args;
    args.reserve(letters.size());
    for (const auto& l : letters) {
        args.push_back(Word{l});
    }
    return eval_phi_pi(state, pi, args);
}

Polynomial center(const FactorState& state, const Polynomial& p) {
    return p - Polynomial::constant(state.phi(p));
}

} // namespace freeprod

namespace freeprod {

Complex multilinear_extension(std::span<const Polynomial> args,
                              const std::function<Complex(std::span<const Word>)>& f) {
    std::vector<Word> chosen(args.size());
    Complex total;
    auto recurse = [&](auto&& self, std::size_t k, const Complex& weight) -> void {
        if (k == args.size()) {
            total += weight * f(chosen);
            return;
        }
        for (const auto& [w, c] : args[k].terms()) {
            chosen[k] = w;
            self(self, k + 1, weight * c);
        }
    };
    recurse(recurse, 0, Complex(1));
    return total;
}

} // namespace freeprod

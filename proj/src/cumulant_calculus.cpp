#include "freeprod/cumulant_calculus.hpp"

#include "freeprod/errors.hpp"

#include <mutex>
#include <optional>
#include <shared_mutex>

namespace freeprod {

namespace {

std::vector<Word> as_words(std::span<const Letter> letters) {
    std::vector<Word> out;
    out.reserve(letters.size());
    for (const auto& l : letters) {
        out.push_back(Word{l});
    }
    return out;
}

std::vector<unsigned> block_masks(const Partition& p) {
    std::vector<unsigned> masks(static_cast<std::size_t>(p.block_count()), 0U);
    for (int i = 0; i < p.size(); ++i) {
        masks[static_cast<std::size_t>(p.block_of(i))] |= 1U << i;
    }
    return masks;
}

/// phi of the concatenation of the arguments selected by `mask`, cached per
/// mask for the duration of one lattice sum.
class BlockMoments {
public:
    BlockMoments(std::span<const Word> args, const MomentOracle& phi)
        : args_(args), phi_(phi), cache_(std::size_t{1} << args.size()) {}

    const Complex& operator()(unsigned mask) {
        auto& slot = cache_[mask];
        if (!slot) {
            Word w;
            for (std::size_t i = 0; i < args_.size(); ++i) {
                if (mask & (1U << i)) {
                    w = w * args_[i];
                }
            }
            slot = phi_(w);
        }
        return *slot;
    }

private:
    std::span<const Word> args_;
    const MomentOracle& phi_;
    std::vector<std::optional<Complex>> cache_;
};

Complex multiplicative(const Partition& p, BlockMoments& moments) {
    Complex product(1);
    for (unsigned mask : block_masks(p)) {
        const Complex& m = moments(mask);
        if (m.is_zero()) {
            return Complex(0);
        }
        product *= m;
    }
    return product;
}

MomentOracle oracle_of(const FactorState& state) {
    return [&state](const Word& w) { return state.moment(w); };
}

void check_factor(const FactorState& state, std::span<const Word> args) {
    for (const auto& w : args) {
        for (const auto& l : w.letters()) {
            if (l.factor != state.index()) {
                throw FactorMismatchError("letter '" + std::to_string(l.factor) + ":" + std::to_string(l.generator) +
                                          "' is not in factor '" + state.name() + "'");
            }
        }
    }
}

void check_degree(std::span<const Word> args, int bound) {
    std::size_t total = 0;
    for (const auto& w : args) {
        total += w.degree();
    }
    if (static_cast<int>(total) > bound) {
        throw TruncationError("cumulant of total degree " + std::to_string(total) + " exceeds degree bound " +
                              std::to_string(bound));
    }
}

} // namespace

Complex free_cumulant(std::span<const Word> args, const MomentOracle& phi) {
    const int n = static_cast<int>(args.size());
    const auto& lattice = enumerate_nc(n);
    const auto& mu = moebius_to_top(n);
    BlockMoments moments(args, phi);
    Complex sum;
    for (std::size_t k = 0; k < lattice.size(); ++k) {
        Complex term = multiplicative(lattice[k], moments);
        if (!term.is_zero()) {
            sum += term * Complex(Rational(mu[k]));
        }
    }
    return sum;
}

Complex free_cumulant_pi_moebius(const Partition& pi, std::span<const Word> args, const MomentOracle& phi) {
    const int n = static_cast<int>(args.size());
    if (pi.size() != n) {
        throw DimensionError("partition of " + std::to_string(pi.size()) + " elements applied to " +
                             std::to_string(n) + " arguments");
    }
    BlockMoments moments(args, phi);
    Complex sum;
    for (const auto& sigma : enumerate_nc(n)) {
        if (!leq(sigma, pi)) {
            continue;
        }
        Complex term = multiplicative(sigma, moments);
        if (!term.is_zero()) {
            sum += term * Complex(Rational(moebius(sigma, pi)));
        }
    }
    return sum;
}

Complex kappa_n(const FactorState& state, std::span<const Word> args) {
    check_factor(state, args);
    check_degree(args, state.degree_bound());
    return free_cumulant(args, oracle_of(state));
}

Complex kappa_n(const FactorState& state, std::span<const Letter> letters) {
    const auto args = as_words(letters);
    return kappa_n(state, std::span<const Word>(args));
}

Complex kappa_n(const FactorState& state, std::span<const Polynomial> args) {
    return multilinear_extension(args, [&](std::span<const Word> words) { return kappa_n(state, words); });
}

Complex kappa_pi(const FactorState& state, const Partition& pi, std::span<const Letter> letters) {
    if (pi.size() != static_cast<int>(letters.size())) {
        throw DimensionError("partition of " + std::to_string(pi.size()) + " elements applied to " +
                             std::to_string(letters.size()) + " letters");
    }
    Complex product(1);
    for (const auto& block : pi.blocks()) {
        std::vector<Letter> sub;
        for (int i : block) {
            sub.push_back(letters[static_cast<std::size_t>(i)]);
        }
        product *= kappa_n(state, std::span<const Letter>(sub));
    }
    return product;
}

Complex kappa_pi_moebius(const FactorState& state, const Partition& pi, std::span<const Letter> letters) {
    const auto args = as_words(letters);
    check_factor(state, args);
    check_degree(args, state.degree_bound());
    return free_cumulant_pi_moebius(pi, args, oracle_of(state));
}

// ---------------------------------------------------------------------------

struct CumulantTable::Memo {
    mutable std::shared_mutex mutex;
    std::map<Key, Complex> values;
};

CumulantTable::CumulantTable(std::shared_ptr<const FactorState> source, int max_order)
    : factor_(source->index()),
      degree_bound_(source->degree_bound()),
      max_order_(std::min(max_order, kMaxGroundSet)),
      source_(std::move(source)),
      memo_(std::make_shared<Memo>()) {}

CumulantTable::CumulantTable(const FactorState& source, int max_order)
    : CumulantTable(std::make_shared<const FactorState>(source), max_order) {}

CumulantTable::CumulantTable(FactorIndex factor, int degree_bound, std::map<Key, Complex> values)
    : factor_(factor), degree_bound_(degree_bound), memo_(std::make_shared<Memo>()) {
    for (const auto& [key, value] : values) {
        if (key.empty()) {
            throw ValidationError("cumulant entry with no arguments");
        }
        check_degree(key, degree_bound_);
        for (const auto& w : key) {
            for (const auto& l : w.letters()) {
                if (l.factor != factor_) {
                    throw FactorMismatchError("cumulant entry mixes in factor " + std::to_string(l.factor));
                }
            }
        }
    }
    memo_->values = std::move(values);
}

CumulantTable CumulantTable::tabulate(const FactorState& state) {
    std::map<Key, Complex> values;
    const auto letters = state.letters();
    for (const auto& w : words_up_to(letters, state.degree_bound(), 1)) {
        const auto key = as_words(w.letters());
        values.emplace(key, kappa_n(state, std::span<const Word>(key)));
    }
    return CumulantTable(state.index(), state.degree_bound(), std::move(values));
}

Complex CumulantTable::value(std::span<const Word> args) const {
    if (args.empty()) {
        throw ValidationError("cumulant with no arguments");
    }
    for (const auto& w : args) {
        for (const auto& l : w.letters()) {
            if (l.factor != factor_) {
                throw FactorMismatchError("argument from factor " + std::to_string(l.factor) +
                                          " given to the cumulants of factor " + std::to_string(factor_));
            }
        }
    }
    check_degree(args, degree_bound_);
    if (static_cast<int>(args.size()) > max_order_) {
        throw SizeError("cumulant of order " + std::to_string(args.size()) + " exceeds the lattice cap " +
                        std::to_string(max_order_));
    }
    Key key(args.begin(), args.end());
    {
        std::shared_lock lock(memo_->mutex);
        if (auto it = memo_->values.find(key); it != memo_->values.end()) {
            return it->second;
        }
    }
    if (!source_) {
        throw ValidationError("cumulant table has no entry for a tuple of " + std::to_string(args.size()) +
                              " arguments");
    }
    Complex v = free_cumulant(args, oracle_of(*source_));
    std::unique_lock lock(memo_->mutex);
    memo_->values.emplace(std::move(key), v);
    return v;
}

Complex CumulantTable::value(std::span<const Letter> letters) const {
    const auto args = as_words(letters);
    return value(std::span<const Word>(args));
}

Complex CumulantTable::value(std::span<const Polynomial> args) const {
    return multilinear_extension(args, [this](std::span<const Word> words) { return value(words); });
}

std::map<CumulantTable::Key, Complex> CumulantTable::entries() const {
    std::shared_lock lock(memo_->mutex);
    return memo_->values;
}

// ---------------------------------------------------------------------------

Complex moments_from_cumulants(const CumulantTable& table, std::span<const Word> args) {
    const int n = static_cast<int>(args.size());
    if (n == 0) {
        return Complex(1);
    }
    check_degree(args, table.degree_bound());
    Complex sum;
    for (const auto& sigma : enumerate_nc(n)) {
        Complex product(1);
        for (const auto& block : sigma.blocks()) {
            std::vector<Word> sub;
            sub.reserve(block.size());
            for (int i : block) {
                sub.push_back(args[static_cast<std::size_t>(i)]);
            }
            product *= table.value(std::span<const Word>(sub));
            if (product.is_zero()) {
                break;
            }
        }
        sum += product;
    }
    return sum;
}

Complex moments_from_cumulants(const CumulantTable& table, std::span<const Letter> letters) {
    const auto args = as_words(letters);
    return moments_from_cumulants(table, std::span<const Word>(args));
}

namespace {

std::vector<Letter> repeated_x(std::size_t n) {
    return std::vector<Letter>(n, Letter{0, 0, true, false});
}

} // namespace

// A sequence is the distribution of one variable in a plain algebra, so there
// is no star structure and complex values are allowed.
CumulantSequence cumulants_from_moments(const MomentSequence& m) {
    if (m.values.empty()) {
        throw ValidationError("empty moment sequence");
    }
    const MomentOracle phi = [&](const Word& w) { return w.empty() ? Complex(1) : m.values[w.degree() - 1]; };
    CumulantSequence out;
    for (int n = 1; n <= m.degree_bound(); ++n) {
        const auto args = as_words(repeated_x(static_cast<std::size_t>(n)));
        out.values.push_back(free_cumulant(args, phi));
    }
    return out;
}

MomentSequence moments_from_cumulants(const CumulantSequence& k) {
    if (k.values.empty()) {
        throw ValidationError("empty cumulant sequence");
    }
    std::map<CumulantTable::Key, Complex> values;
    for (int n = 1; n <= k.degree_bound(); ++n) {
        values.emplace(as_words(repeated_x(static_cast<std::size_t>(n))), k.values[static_cast<std::size_t>(n - 1)]);
    }
    const CumulantTable table(0, k.degree_bound(), std::move(values));
    MomentSequence out;
    for (int n = 1; n <= k.degree_bound(); ++n) {
        const auto letters = repeated_x(static_cast<std::size_t>(n));
        out.values.push_back(moments_from_cumulants(table, std::span<const Letter>(letters)));
    }
    return out;
}

MomentSequence free_convolve_additive(const MomentSequence& x, const MomentSequence& y) {
    if (x.degree_bound() != y.degree_bound()) {
        throw DimensionError("free convolution of sequences with degree bounds " + std::to_string(x.degree_bound()) +
                             " and " + std::to_string(y.degree_bound()));
    }
    const auto kx = cumulants_from_moments(x);
    const auto ky = cumulants_from_moments(y);
    CumulantSequence sum;
    for (std::size_t n = 0; n < kx.values.size(); ++n) {
        sum.values.push_back(kx.values[n] + ky.values[n]);
    }
    return moments_from_cumulants(sum);
}

} // namespace freeprod

#include "freeprod/errors.hpp"
#include "freeprod/free_product.hpp"
#include "support/oracles.hpp"
#include "support/printing.hpp"

#include <doctest.h>

using namespace freeprod;

namespace {

FactorState semicircle(FactorIndex index, const std::string& name, const std::string& gen, int n) {
    return FactorState::from_function(index, name, {{gen, true}}, n, [](const Word& w) {
        const int d = static_cast<int>(w.degree());
        return d % 2 == 1 ? Complex(0) : Complex(static_cast<long>(oracle::catalan(d / 2)));
    });
}

ProductSpace random_space(oracle::Rng& rng, int factors, int n) {
    std::vector<FactorState> states;
    const char* names[] = {"a", "b", "c"};
    for (int f = 0; f < factors; ++f) {
        const bool sa = rng.coin();
        states.push_back(oracle::random_state(rng, f, std::string("F") + std::to_string(f),
                                              {{names[f], sa}}, n));
    }
    return ProductSpace(std::move(states), n);
}

FreeElement random_element(oracle::Rng& rng, const ProductSpace& space, int max_degree, int terms) {
    FreeElement x = FreeElement::scalar(rng.complex(false));
    const auto letters = space.alphabet().letters();
    for (int k = 0; k < terms; ++k) {
        std::vector<Letter> ls;
        const int d = rng.uniform(1, max_degree);
        for (int j = 0; j < d; ++j) {
            ls.push_back(letters[static_cast<std::size_t>(rng.uniform(0, static_cast<int>(letters.size()) - 1))]);
        }
        FreeElement w = element_from_word(space, Word(ls));
        w *= rng.complex(false);
        x += w;
    }
    return x;
}

} // namespace

TEST_CASE("tensor word invariants") {
    Alphabet a;
    a.add_factor(0, "A", {{"a", true}});
    a.add_factor(1, "B", {{"b", true}});
    const Word wa = a.parse_word("a a");
    const Word wb = a.parse_word("b");
    const TensorWord t({wa, wb, wa});
    CHECK(t.length() == 3);
    CHECK(t.degree() == 5);
    CHECK(t.pattern() == std::vector<FactorIndex>{0, 1, 0});
    CHECK(t.star() == TensorWord({wa, wb, wa}));
    CHECK_THROWS_AS(TensorWord({wa, wa}), ValidationError);
    CHECK_THROWS_AS(TensorWord({Word{}}), ValidationError);
    CHECK_THROWS_AS(TensorWord({a.parse_word("a b")}), ValidationError);
}

TEST_CASE("product of two elements from different factors") {
    oracle::Rng rng(1);
    const ProductSpace space = random_space(rng, 2, 4);
    const Alphabet& al = space.alphabet();
    const Polynomial p1 = Polynomial(al.parse_word("a a")) + Polynomial(al.parse_word("a"), Complex(2));
    const Polynomial p2 = Polynomial(al.parse_word("b")) + Polynomial::constant(Complex(Rational(1, 3)));
    const Complex m1 = space.factor(0).phi(p1);
    const Complex m2 = space.factor(1).phi(p2);

    FreeElement expected = FreeElement::scalar(m1 * m2);
    // a_1° keeps the scalar phi_2(a_2), a_2° keeps phi_1(a_1)
    for (const auto& [w, c] : p1.terms()) {
        if (!w.empty()) {
            expected.add_term(TensorWord({w}), m2 * c);
        }
    }
    for (const auto& [w, c] : p2.terms()) {
        if (!w.empty()) {
            expected.add_term(TensorWord({w}), m1 * c);
        }
    }
    for (const auto& [w1, c1] : p1.terms()) {
        for (const auto& [w2, c2] : p2.terms()) {
            if (!w1.empty() && !w2.empty()) {
                expected.add_term(TensorWord({w1, w2}), c1 * c2);
            }
        }
    }
    CHECK(multiply(space, embed(space, 0, p1), embed(space, 1, p2)) == expected);
}

TEST_CASE("embedding is a unital homomorphism that restricts the state") {
    oracle::Rng rng(2);
    const ProductSpace space = random_space(rng, 2, 4);
    const auto letters = space.factor(0).letters();
    for (const auto& w : words_up_to(letters, 2)) {
        for (const auto& v : words_up_to(letters, 2)) {
            const FreeElement lhs = multiply(space, embed(space, 0, Polynomial(w)), embed(space, 0, Polynomial(v)));
            CHECK(lhs == embed(space, 0, Polynomial(w * v)));
            CHECK(state_eval(space, lhs) == space.factor(0).moment(w * v));
        }
    }
    CHECK(embed(space, 0, Polynomial::constant(Complex(3))) == FreeElement::scalar(Complex(3)));
    CHECK_THROWS_AS(embed(space, 0, Polynomial(space.alphabet().parse_word("b"))), FactorMismatchError);
}

TEST_CASE("multiplication is associative and star is an anti-homomorphism") {
    oracle::Rng rng(3);
    for (int trial = 0; trial < 15; ++trial) {
        const ProductSpace space = random_space(rng, 2 + trial % 2, 6);
        const FreeElement x = random_element(rng, space, 2, 2);
        const FreeElement y = random_element(rng, space, 2, 2);
        const FreeElement z = random_element(rng, space, 2, 2);
        CHECK(multiply(space, multiply(space, x, y), z) == multiply(space, x, multiply(space, y, z)));
        CHECK(star_element(multiply(space, x, y)) == multiply(space, star_element(y), star_element(x)));
        CHECK(multiply(space, FreeElement::identity(), x) == x);
        CHECK(star_element(star_element(x)) == x);
    }
}

TEST_CASE("two free semicircles") {
    std::vector<FactorState> f;
    f.push_back(semicircle(0, "A", "a", 6));
    f.push_back(semicircle(1, "B", "b", 6));
    const ProductSpace space(std::move(f), 6);
    const Alphabet& al = space.alphabet();
    CHECK(state_eval_word(space, al.parse_word("a b a b")) == Complex(0));
    CHECK(state_eval_word(space, al.parse_word("a a b b")) == Complex(1));
    CHECK(state_eval_word(space, al.parse_word("a b b a")) == Complex(1));
    // (a + b)/sqrt 2 is again semicircular, so phi((a+b)^4) = 4 * 2
    Complex sum;
    for (const auto& w : words_up_to(al.letters(), 4, 4)) {
        sum += state_eval_word(space, w);
    }
    CHECK(sum == Complex(8));
}

TEST_CASE("moments agree with the defining freeness recursion") {
    oracle::Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const ProductSpace space = random_space(rng, 2 + trial % 2, 5);
        std::vector<const FactorState*> fs;
        for (auto i : space.factor_indices()) {
            fs.push_back(&space.factor(i));
        }
        oracle::FreeProductMoments expected(fs);
        for (const auto& w : words_up_to(space.alphabet().letters(), 4)) {
            const Complex flat = state_eval_word(space, w);
            CHECK(flat == expected(w));
            CHECK(state_eval(space, element_from_word(space, w)) == flat);
        }
    }
}

TEST_CASE("grouped, flat and reduced evaluation agree") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const ProductSpace space = random_space(rng, 2, 6);
        std::vector<FreeElement> xs;
        for (int k = 0; k < 3; ++k) {
            xs.push_back(random_element(rng, space, 2, 2));
        }
        CHECK(state_eval_product(space, xs) == state_eval_reduced(space, xs));
    }
}

TEST_CASE("base cumulants") {
    oracle::Rng rng(6);
    const ProductSpace space = random_space(rng, 2, 4);
    const Letter a = space.alphabet().letter(0, 0);
    const Letter b = space.alphabet().letter(1, 0);
    const std::vector<Letter> mixed{a, b};
    CHECK(kappa_base(space, mixed).is_zero());
    const std::vector<Letter> pure{a, a};
    const auto& f = space.factor(0);
    const std::vector<Letter> pure_args{a, a};
    CHECK(kappa_base(space, pure) == kappa_n(f, pure_args));

    const std::vector<PureElement> unit{PureElement::identity()};
    CHECK(kappa_base(space, unit) == Complex(1));
    const std::vector<PureElement> unit_pair{PureElement::identity(), PureElement::of(a)};
    CHECK(kappa_base(space, unit_pair).is_zero());
}

TEST_CASE("cumulants involving the identity vanish") {
    oracle::Rng rng(8);
    const ProductSpace space = random_space(rng, 3, 5);
    for (const auto& w : words_up_to(space.alphabet().letters(), 3, 1)) {
        const FreeElement x = element_from_word(space, w);
        for (const auto& [t, c] : x.words()) {
            const GroupedWord left({{PureElement::identity()}, tensor_items(space, t)});
            const GroupedWord right({tensor_items(space, t), {PureElement::identity()}});
            CHECK(kappa_products(space, left).is_zero());
            CHECK(kappa_products(space, right).is_zero());
        }
    }
}

TEST_CASE("degree overflow") {
    oracle::Rng rng(10);
    const ProductSpace space = random_space(rng, 2, 3);
    CHECK_THROWS_AS(state_eval_word(space, space.alphabet().parse_word("a b a b")), TruncationError);
    CHECK_THROWS_AS(element_from_word(space, space.alphabet().parse_word("a a a a")), TruncationError);
    std::vector<FactorState> low;
    low.push_back(semicircle(0, "A", "a", 2));
    CHECK_THROWS_AS(ProductSpace(std::move(low), 4), ValidationError);
}

TEST_CASE("cumulants recomputed from the constructed state are the constructed cumulants") {
    oracle::Rng rng(11);
    for (int trial = 0; trial < 3; ++trial) {
        const ProductSpace space = random_space(rng, 2 + trial % 2, 5);
        const auto letters = space.alphabet().letters();
        const MomentOracle phi = [&](const Word& w) { return state_eval_word(space, w); };
        for (const auto& w : words_up_to(letters, trial == 0 ? 5 : 4, 1)) {
            std::vector<Word> args;
            for (const auto& l : w.letters()) {
                args.push_back(Word{{l}});
            }
            CHECK(free_cumulant(args, phi) == kappa_base(space, w.letters()));
        }
    }
}

TEST_CASE("centered tensor words are state-null through the cumulant route") {
    oracle::Rng rng(12);
    const ProductSpace space = random_space(rng, 3, 5);
    Alphabet al = space.alphabet();
    std::vector<TensorWord> words;
    for (const auto& w : words_up_to(al.letters(), 5, 1)) {
        const FreeElement x = element_from_word(space, w);
        for (const auto& [t, c] : x.words()) {
            words.push_back(t);
        }
    }
    for (const auto& t : words) {
        const std::vector<FreeElement> one{FreeElement::basis(t)};
        CHECK(state_eval_product(space, one).is_zero());
    }
}

TEST_CASE("kappa_base is multilinear in each slot") {
    oracle::Rng rng(13);
    std::vector<FactorState> states;
    states.push_back(oracle::random_state(rng, 0, "A", {{"x", true}, {"y", false}}, 4));
    const ProductSpace space(std::move(states), 4);
    const auto letters = space.alphabet().letters(0);
    for (int trial = 0; trial < 20; ++trial) {
        const Complex s = rng.complex(false);
        const Letter l1 = letters[static_cast<std::size_t>(rng.uniform(0, 2))];
        const Letter l2 = letters[static_cast<std::size_t>(rng.uniform(0, 2))];
        const Letter l3 = letters[static_cast<std::size_t>(rng.uniform(0, 2))];
        const std::vector<PureElement> combined{
            {0, Polynomial(Word{{l1}}) + Polynomial(Word{{l2}}) * s}, PureElement::of(l3)};
        const std::vector<Letter> first{l1, l3};
        const std::vector<Letter> second{l2, l3};
        CHECK(kappa_base(space, combined) == kappa_base(space, first) + s * kappa_base(space, second));
    }
}

TEST_CASE("partition extensions of the product cumulants") {
    oracle::Rng rng(14);
    const ProductSpace space = random_space(rng, 2, 4);
    const Letter a = space.alphabet().letter(0, 0);
    const Letter b = space.alphabet().letter(1, 0);
    const std::vector<Letter> abba{a, b, b, a};
    std::vector<PureElement> items;
    for (const auto& l : abba) {
        items.push_back(PureElement::of(l));
    }
    const std::vector<Letter> aa{a, a};
    const std::vector<Letter> bb{b, b};
    CHECK(kappa_pure_pi(space, parse_partition("{1,4}{2,3}"), items) ==
          kappa_base(space, aa) * kappa_base(space, bb));
    CHECK(kappa_pure_pi(space, Partition::top(4), items).is_zero());

    const GroupedWord gw({{PureElement::of(a)}, {PureElement::of(b)}});
    CHECK(kappa_pi_products(space, Partition::top(2), gw) == kappa_products(space, gw));
    CHECK(kappa_products(space, gw).is_zero());
    const std::vector<Letter> ja{a};
    const std::vector<Letter> jb{b};
    CHECK(kappa_pi_products(space, Partition::bottom(2), gw) == kappa_base(space, ja) * kappa_base(space, jb));
}

TEST_CASE("reduction at a matching inner factor") {
    oracle::Rng rng(15);
    const ProductSpace space = random_space(rng, 2, 6);
    const Alphabet& al = space.alphabet();
    const Word a = al.parse_word("a");
    const Word a2 = al.parse_word("a a");
    const Word b = al.parse_word("b");
    const Word b2 = al.parse_word("b b");
    // (a° ⊗ b°)(b° ⊗ (aa)°) = a° ⊗ (b°b°)° ⊗ (aa)° + phi(b°b°) a°(aa)°
    const FreeElement x = FreeElement::basis(TensorWord({a, b}));
    const FreeElement y = FreeElement::basis(TensorWord({b, a2}));
    const auto& fa = space.factor(0);
    const auto& fb = space.factor(1);
    const Polynomial bb = center(fb, Polynomial(b)) * center(fb, Polynomial(b));
    const Polynomial aa = center(fa, Polynomial(a)) * center(fa, Polynomial(a2));
    FreeElement expected;
    for (const auto& [w, c] : bb.terms()) {
        if (!w.empty()) {
            expected.add_term(TensorWord({a, w, a2}), c);
        }
    }
    FreeElement inner = embed(space, 0, aa);
    inner *= fb.phi(bb);
    expected += inner;
    CHECK(multiply(space, x, y) == expected);
    CHECK(multiply(space, x, FreeElement::identity()) == x);
}

TEST_CASE("embedding respects the star") {
    oracle::Rng rng(16);
    std::vector<FactorState> states;
    states.push_back(oracle::random_state(rng, 0, "U", {{"u", false}}, 3));
    const ProductSpace space(std::move(states), 3);
    const Polynomial p = Polynomial(space.alphabet().parse_word("u u*"), Complex(1, 2)) +
                         Polynomial(space.alphabet().parse_word("u"), Complex(0, 1));
    CHECK(embed(space, 0, star(p)) == star_element(embed(space, 0, p)));
    CHECK(star_element(FreeElement::identity()) == FreeElement::identity());
}

#include "freeprod/errors.hpp"
#include "freeprod/verification.hpp"
#include "support/oracles.hpp"
#include "support/printing.hpp"

#include <doctest.h>

using namespace freeprod;

namespace {

ProductSpace positive_space(oracle::Rng& rng, int factors, int n, bool allow_nonselfadjoint = true) {
    std::vector<FactorState> states;
    const char* names[] = {"a", "b", "c"};
    for (int f = 0; f < factors; ++f) {
        const bool sa = !allow_nonselfadjoint || rng.coin();
        states.push_back(oracle::matrix_state(rng, f, std::string("F") + std::to_string(f), {{names[f], sa}}, n));
    }
    return ProductSpace(std::move(states), n);
}

ProductSpace random_space(oracle::Rng& rng, int factors, int n) {
    std::vector<FactorState> states;
    const char* names[] = {"a", "b", "c"};
    for (int f = 0; f < factors; ++f) {
        states.push_back(oracle::random_state(rng, f, std::string("F") + std::to_string(f), {{names[f], true}}, n));
    }
    return ProductSpace(std::move(states), n);
}

ComplexMatrix ints(std::initializer_list<std::initializer_list<long>> rows) {
    ComplexMatrix m;
    for (const auto& r : rows) {
        m.emplace_back();
        for (long v : r) {
            m.back().emplace_back(v);
        }
    }
    return m;
}

void check_witness(const ComplexMatrix& m, const PsdResult& r) {
    REQUIRE_FALSE(r.psd);
    REQUIRE(r.witness.has_value());
    CHECK(sgn(quadratic_form(m, *r.witness).re()) < 0);
}

} // namespace

TEST_CASE("constructed free products pass both freeness checks") {
    oracle::Rng rng(100);
    for (int factors = 2; factors <= 3; ++factors) {
        const ProductSpace space = random_space(rng, factors, 5);
        const JointState joint = JointState::of(space);
        const auto moments = check_freeness_moments(joint, 5);
        const auto cumulants = check_freeness_cumulants(joint, 5);
        CHECK(moments.holds());
        CHECK(cumulants.holds());
        CHECK(moments.checked_words > 0);
        CHECK(cumulants.checked_words > 0);
        CHECK(check_equivalence(joint, 5));
        for (auto i : space.factor_indices()) {
            const FactorState r = joint.restrict(i);
            for (const auto& w : words_up_to(r.letters(), 5)) {
                CHECK(r.moment(w) == space.factor(i).moment(w));
            }
        }
    }
}

TEST_CASE("a perturbed alternating moment breaks both characterizations") {
    oracle::Rng rng(101);
    const ProductSpace space = random_space(rng, 2, 4);
    const JointState joint = JointState::of(space);
    const Word ab = space.alphabet().parse_word("a b");
    const JointState bad = joint.with_moment(ab, joint.moment(ab) + Complex(1));
    const auto moments = check_freeness_moments(bad, 2);
    // phi(b a) moves with phi(a b) since a and b are selfadjoint
    REQUIRE(moments.violations.size() == 2);
    CHECK(moments.violations[0].word == "(a)° (b)°");
    CHECK(moments.violations[0].value == Complex(1));
    CHECK(moments.violations[1].word == "(b)° (a)°");
    CHECK_FALSE(check_freeness_cumulants(bad, 2).holds());
    CHECK(check_equivalence(bad, 4));
}

TEST_CASE("classical independence is not freeness") {
    // a, b symmetric Bernoulli-like with nontrivial fourth moments, commuting
    // and tensor independent: kappa_4(a, b, a, b) = phi(a^2) phi(b^2) = 9.
    std::vector<FactorState> states;
    for (int f = 0; f < 2; ++f) {
        states.push_back(FactorState::from_function(f, f == 0 ? "A" : "B", {{f == 0 ? "a" : "b", true}}, 4,
                                                    [](const Word& w) {
                                                        const auto d = w.degree();
                                                        return d % 2 == 1 ? Complex(0) : Complex(static_cast<long>(d + 1));
                                                    }));
    }
    const std::vector<const FactorState*> fs{&states[0], &states[1]};
    Alphabet alphabet;
    alphabet.add_factor(0, "A", {{"a", true}});
    alphabet.add_factor(1, "B", {{"b", true}});
    const JointState joint = JointState::from_function(
        alphabet, 4, [&](const Word& w) { return oracle::tensor_independent_moment(fs, w); });
    const auto cumulants = check_freeness_cumulants(joint, 4);
    CHECK_FALSE(cumulants.holds());
    bool found = false;
    for (const auto& v : cumulants.violations) {
        if (v.word == "kappa(a, b, a, b)") {
            found = true;
            CHECK(v.value == Complex(9));
        }
    }
    CHECK(found);
    // the commuting state does not see mixed cumulants below order 4
    CHECK(check_freeness_cumulants(joint, 3).holds());
    CHECK_FALSE(check_freeness_moments(joint, 4).holds());
    CHECK(check_equivalence(joint, 4));
}

TEST_CASE("single factor states are vacuously free") {
    oracle::Rng rng(102);
    const ProductSpace space = random_space(rng, 1, 4);
    const JointState joint = JointState::of(space);
    CHECK(check_freeness_cumulants(joint, 4).checked_words == 0);
    CHECK(check_freeness_moments(joint, 4).holds());
    CHECK(check_equivalence(joint, 4));
    CHECK_THROWS_AS(check_freeness_moments(joint, 5), TruncationError);
}

TEST_CASE("pairing formula for variances") {
    oracle::Rng rng(103);
    const ProductSpace space = random_space(rng, 2, 6);
    const auto words = tensor_words_up_to(space, 3);
    std::size_t same = 0;
    for (const auto& a : words) {
        for (const auto& b : words) {
            const Complex v = variance_factorization(space, a, b);
            CHECK(v == variance_general(space, a, b));
            if (a.pattern() != b.pattern()) {
                CHECK(v.is_zero());
            } else {
                ++same;
            }
        }
    }
    CHECK(same > 0);
    // k = 1: kappa_2(a°*, b°) = phi(a°* b°)
    const Alphabet& al = space.alphabet();
    const TensorWord a({al.parse_word("a a")});
    const TensorWord b({al.parse_word("a")});
    const auto& f = space.factor(0);
    const Polynomial ac = center(f, Polynomial(al.parse_word("a a")));
    const Polynomial bc = center(f, Polynomial(al.parse_word("a")));
    CHECK(variance_factorization(space, a, b) == f.phi(ac.star() * bc));
}

TEST_CASE("exact PSD decisions") {
    CHECK(ldl_psd(ints({{1}})).psd);
    const auto indefinite = ints({{1, 2}, {2, 1}});
    check_witness(indefinite, ldl_psd(indefinite));
    const auto zero_diag = ints({{0, 1}, {1, 0}});
    check_witness(zero_diag, ldl_psd(zero_diag));
    const auto later_zero = ints({{1, 1, 0}, {1, 1, 1}, {0, 1, 0}});
    check_witness(later_zero, ldl_psd(later_zero));
    const auto singular = ints({{1, 1}, {1, 1}});
    const auto r = ldl_psd(singular);
    CHECK(r.psd);
    CHECK(r.rank == 1);
    CHECK(ldl_psd(ints({{0, 0}, {0, 0}})).psd);
    CHECK_THROWS_AS(ldl_psd(ints({{1, 2}, {3, 1}})), NotHermitianError);

    ComplexMatrix h{{Complex(2), Complex(0, 1)}, {Complex(0, -1), Complex(1)}};
    CHECK(ldl_psd(h).psd);
    ComplexMatrix g{{Complex(1), Complex(1, 1)}, {Complex(1, -1), Complex(1)}};
    check_witness(g, ldl_psd(g));
}

TEST_CASE("random Gram matrices B* B are PSD and perturbations are caught") {
    oracle::Rng rng(104);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform(1, 5));
        const std::size_t k = static_cast<std::size_t>(rng.uniform(1, 5));
        ComplexMatrix b(k, std::vector<Complex>(n));
        for (auto& row : b) {
            for (auto& z : row) {
                z = rng.complex(false);
            }
        }
        ComplexMatrix m(n, std::vector<Complex>(n));
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t t = 0; t < n; ++t) {
                for (std::size_t j = 0; j < k; ++j) {
                    m[s][t] += b[j][s].conj() * b[j][t];
                }
            }
        }
        const auto r = ldl_psd(m);
        CHECK(r.psd);
        CHECK(r.rank <= std::min(n, k));
        m[0][0] -= Complex(1);
        const auto shifted = ldl_psd(m);
        if (!shifted.psd) {
            check_witness(m, shifted);
        }
    }
}

TEST_CASE("factor positivity") {
    const FactorState bad = FactorState::from_function(0, "G", {{"g", true}}, 2, [](const Word& w) {
        return w.empty() ? Complex(1) : w.degree() == 1 ? Complex(0) : Complex(-1);
    });
    const auto r = check_positivity(bad, 1);
    CHECK(r.gram.size() == 2);
    check_witness(r.gram.entries, r.psd);

    oracle::Rng rng(105);
    const FactorState good = oracle::matrix_state(rng, 0, "M", {{"x", true}, {"u", false}}, 4);
    CHECK(check_positivity(good, 2).psd.psd);
    CHECK_THROWS_AS(check_positivity(good, 3), TruncationError);
}

TEST_CASE("free products of positive states are positive") {
    oracle::Rng rng(106);
    for (int trial = 0; trial < 6; ++trial) {
        const int factors = 2 + trial % 2;
        const ProductSpace space = positive_space(rng, factors, 4, factors == 2);
        for (auto i : space.factor_indices()) {
            REQUIRE(check_positivity(space.factor(i), 2).psd.psd);
        }
        const auto r = check_positivity(space, 2);
        CHECK(r.psd.psd);
        CHECK(r.schur_holds());
        CHECK(r.gram.labels.front() == "1");
    }
    const ProductSpace space = positive_space(rng, 2, 4);
    const auto r0 = check_positivity(space, 0);
    CHECK(r0.gram.entries == ComplexMatrix{{Complex(1)}});
}

TEST_CASE("variance splits over factor patterns") {
    oracle::Rng rng(107);
    for (int trial = 0; trial < 8; ++trial) {
        const ProductSpace space = positive_space(rng, 2 + trial % 2, 6);
        FreeElement a = FreeElement::scalar(rng.complex(false));
        for (const auto& t : tensor_words_up_to(space, 3)) {
            if (rng.uniform(0, 2) == 0) {
                a.add_term(t, rng.complex(false));
            }
        }
        const auto audit = audit_variance(space, a);
        CHECK(audit.total == audit.pattern_sum());
        for (const auto& [pattern, value] : audit.by_pattern) {
            CHECK(value.is_real());
            CHECK(sgn(value.re()) >= 0);
        }
        // phi(a* a) = kappa_2(a*, a) + |phi(a)|^2
        const FreeElement aa = multiply(space, star_element(a), a);
        CHECK(state_eval(space, aa) == audit.total + Complex(a.scalar().norm2()));
    }
}

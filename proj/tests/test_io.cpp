#include "freeprod/errors.hpp"
#include "freeprod/io.hpp"
#include "support/oracles.hpp"
#include "support/printing.hpp"

#include <doctest.h>

using namespace freeprod;
using io::json;

namespace {

json semicircle_factor(const std::string& name, const std::string& gen) {
    return json::parse(R"({"factor":")" + name + R"(","generators":[{"name":")" + gen +
                       R"(","selfadjoint":true}],"moments":{")" + gen + R"(":"0",")" + gen + " " + gen +
                       R"(":"1"}})");
}

std::string location_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.location();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("scalars from strings and numbers") {
    CHECK(io::scalar_from_json(json("1/2-3 i"), "") == Complex(Rational(1, 2), -3));
    CHECK(io::scalar_from_json(json(2), "") == Complex(2));
    CHECK(io::scalar_from_json(json(0.25), "") == Complex(Rational(1, 4)));
    CHECK_THROWS_AS(io::scalar_from_json(json(true), "/x"), ParseError);
    CHECK(location_of([] { io::scalar_from_json(json("1/0"), "/moments/a"); }) == "/moments/a");
}

TEST_CASE("product specs") {
    json spec = {{"degree_bound", 2}, {"factors", {semicircle_factor("A", "a"), semicircle_factor("B", "b")}}};
    const ProductSpace space = io::product_from_json(spec);
    CHECK(space.factor_count() == 2);
    CHECK(space.degree_bound() == 2);
    CHECK(state_eval_word(space, space.alphabet().parse_word("a a")) == Complex(1));
    CHECK(state_eval_word(space, space.alphabet().parse_word("a b")) == Complex(0));

    json ambiguous = spec;
    ambiguous["factors"][1] = semicircle_factor("B", "a");
    CHECK_THROWS_AS(io::product_from_json(ambiguous), ParseError);

    json missing = spec;
    missing["factors"][1]["moments"].erase("b b");
    CHECK(location_of([&] { io::product_from_json(missing); }) == "/factors/1/moments");

    json bad_word = spec;
    bad_word["factors"][0]["moments"]["a z"] = "1";
    CHECK(location_of([&] { io::product_from_json(bad_word); }).rfind("/factors/0/moments/a z", 0) == 0);

    json no_bound = spec;
    no_bound.erase("degree_bound");
    CHECK(location_of([&] { io::product_from_json(no_bound); }) == "/");

    json low = spec;
    low["degree_bound"] = 3;
    CHECK_THROWS_AS(io::product_from_json(low), ParseError);
}

TEST_CASE("factor specs round trip") {
    oracle::Rng rng(31);
    const FactorState s = oracle::random_state(rng, 0, "M", {{"x", true}, {"u", false}}, 3);
    const FactorState back = io::factor_from_json(io::parse_json(io::factor_to_json(s).dump()), 0);
    for (const auto& w : words_up_to(s.letters(), 3)) {
        CHECK(back.moment(w) == s.moment(w));
    }
    const FactorState from_k = io::factor_from_cumulants_json(io::cumulant_table_to_json(s));
    for (const auto& w : words_up_to(s.letters(), 3)) {
        CHECK(from_k.moment(w) == s.moment(w));
    }
}

TEST_CASE("sequences") {
    const json m = json::parse(R"({"moments": ["0", "1", 0, "2"]})");
    CHECK(io::is_sequence_spec(m, "moments"));
    const auto seq = io::moment_sequence_from_json(m);
    CHECK(io::to_json(cumulants_from_moments(seq)).dump() == R"({"cumulants":["0","1","0","0"]})");
    CHECK_THROWS_AS(io::moment_sequence_from_json(json::parse(R"({"moments": []})")), ParseError);
}

TEST_CASE("joint specs") {
    const json j = json::parse(R"({"degree_bound": 2,
        "factors": [{"factor": "A", "generators": ["a"]}, {"factor": "B", "generators": ["b"]}],
        "moments": {"a": "0", "b": "0", "a a": "1", "b b": "1", "a b": "1/2"}})");
    CHECK(io::is_joint_spec(j));
    const JointState s = io::joint_from_json(j);
    CHECK(s.moment(s.alphabet().parse_word("b a")) == Complex(Rational(1, 2)));
    CHECK_FALSE(check_freeness_moments(s, 2).holds());
}

TEST_CASE("malformed JSON reports a byte offset") {
    CHECK(location_of([] { io::parse_json("{\"a\": [1,", "x.json"); }).rfind("x.json: byte", 0) == 0);
    CHECK(location_of([] { io::read_json_file("/nonexistent/file.json"); }) == "/nonexistent/file.json");
}

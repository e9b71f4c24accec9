#include "freeprod/errors.hpp"
#include "freeprod/nc_lattice.hpp"
#include "support/oracles.hpp"
#include "support/printing.hpp"

#include <doctest.h>

#include <set>

using namespace freeprod;

TEST_CASE("NC(n) has Catalan(n) elements and matches the brute-force filter") {
    for (int n = 1; n <= 10; ++n) {
        CHECK(enumerate_nc(n).size() == oracle::catalan(n));
    }
    for (int n = 1; n <= 8; ++n) {
        std::vector<std::vector<int>> expected;
        for (const auto& a : oracle::all_set_partitions(n)) {
            if (!oracle::crosses(a)) {
                expected.push_back(a);
            }
        }
        std::vector<std::vector<int>> got;
        for (const auto& p : enumerate_nc(n)) {
            got.emplace_back(p.labels().begin(), p.labels().end());
        }
        CHECK(got == expected);
    }
}

TEST_CASE("enumeration order and text form") {
    const auto& nc3 = enumerate_nc(3);
    std::vector<std::string> text;
    for (const auto& p : nc3) {
        text.push_back(to_string(p));
    }
    CHECK(text == std::vector<std::string>{"{1,2,3}", "{1,2}{3}", "{1,3}{2}", "{1}{2,3}", "{1}{2}{3}"});
    CHECK(enumerate_nc(12).size() == 208012);
    CHECK_THROWS_AS(enumerate_nc(0), SizeError);
    CHECK_THROWS_AS(enumerate_nc(13), SizeError);
}

TEST_CASE("partition parsing") {
    const auto p = parse_partition(" {1, 3} {2} {4} ");
    CHECK(to_string(p) == "{1,3}{2}{4}");
    CHECK(parse_partition("{2}{1,3}") == parse_partition("{1,3}{2}"));
    CHECK_THROWS_AS(parse_partition("{1,3}{4}"), ParseError);
    CHECK_THROWS_AS(parse_partition("{1,2}{2}"), ParseError);
    CHECK_THROWS_AS(parse_partition("{1,2}", 3), ParseError);
    CHECK_THROWS_AS(parse_partition("{1,2"), ParseError);
    CHECK_FALSE(is_noncrossing(parse_partition("{1,3}{2,4}")));
    CHECK(is_noncrossing(parse_partition("{1,4}{2,3}")));
}

TEST_CASE("order and join") {
    const auto a = parse_partition("{1,2}{3}{4}");
    const auto b = parse_partition("{1}{2}{3,4}");
    CHECK(leq(Partition::bottom(4), a));
    CHECK(leq(a, Partition::top(4)));
    CHECK_FALSE(leq(a, b));
    CHECK(join_nc(a, b) == parse_partition("{1,2}{3,4}"));
    // The set join {1,3}{2,4} crosses, so the NC join is the top.
    CHECK(join_nc(parse_partition("{1,3}{2}{4}"), parse_partition("{1}{2,4}{3}")) == Partition::top(4));
    CHECK_THROWS_AS(leq(a, Partition::top(3)), DimensionError);
}

TEST_CASE("join is the least upper bound among non-crossing partitions") {
    for (int n = 1; n <= 5; ++n) {
        const auto& all = enumerate_nc(n);
        for (const auto& s : all) {
            for (const auto& p : all) {
                const auto j = join_nc(s, p);
                REQUIRE(is_noncrossing(j));
                CHECK(leq(s, j));
                CHECK(leq(p, j));
                for (const auto& u : all) {
                    if (leq(s, u) && leq(p, u)) {
                        CHECK(leq(j, u));
                    }
                }
            }
        }
    }
}

TEST_CASE("Möbius values") {
    for (int n = 1; n <= 8; ++n) {
        const std::int64_t sign = n % 2 == 1 ? 1 : -1;
        CHECK(moebius(Partition::bottom(n), Partition::top(n)) ==
              sign * static_cast<std::int64_t>(oracle::catalan(n - 1)));
    }
    CHECK(moebius(Partition::top(3), Partition::top(3)) == 1);
    CHECK(moebius(parse_partition("{1}{2}{3}"), parse_partition("{1,2}{3}")) == -1);
    CHECK_THROWS_AS(moebius(Partition::top(3), Partition::bottom(3)), OrderError);
    CHECK_THROWS_AS(moebius(parse_partition("{1,3}{2,4}"), Partition::top(4)), ValidationError);
}

TEST_CASE("Möbius function inverts the zeta function on every interval") {
    for (int n = 1; n <= 6; ++n) {
        const auto& all = enumerate_nc(n);
        for (const auto& s : all) {
            for (const auto& p : all) {
                if (!leq(s, p) || s == p) {
                    continue;
                }
                std::int64_t sum = 0;
                for (const auto& t : all) {
                    if (leq(s, t) && leq(t, p)) {
                        sum += moebius(s, t);
                    }
                }
                CHECK(sum == 0);
            }
        }
    }
}

TEST_CASE("mu(sigma, 1) agrees with the interval recursion") {
    for (int n = 1; n <= 7; ++n) {
        const auto& all = enumerate_nc(n);
        const auto& top = moebius_to_top(n);
        REQUIRE(top.size() == all.size());
        for (std::size_t k = 0; k < all.size(); ++k) {
            CHECK(top[k] == moebius(all[k], Partition::top(n)));
        }
    }
}

TEST_CASE("connecting partitions") {
    for (int n = 1; n <= 6; ++n) {
        const auto& all = enumerate_nc(n);
        for (const auto& s : all) {
            std::set<std::size_t> expected;
            for (std::size_t k = 0; k < all.size(); ++k) {
                if (join_nc(all[k], s) == Partition::top(n)) {
                    expected.insert(k);
                }
            }
            const auto& got = connecting_partitions(s);
            CHECK(std::set<std::size_t>(got.begin(), got.end()) == expected);
        }
    }
    // Only 1_n connects with 0_n.
    CHECK(connecting_partitions(Partition::bottom(4)).size() == 1);
}

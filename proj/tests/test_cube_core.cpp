#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "cubesq/cube_core.hpp"
#include "cubesq/numtheory.hpp"
#include "cubesq/serialize.hpp"

using namespace cubesq;

namespace {

bool smooth_by_trial(u64 n, u64 R) {
    for (u64 d = 2; d * d <= n; ++d) {
        while (n % d == 0) {
            if (d > R) return false;
            n /= d;
        }
    }
    return n <= R;
}

u64 T(u64 a, u64 b, u64 c) { return a * a * a + b * b * b + c * c * c; }

// Weight table by enumerating the triple set directly.
std::map<u64, u64> brute_weights(u64 lo, u64 hi, u64 Y, u64 R) {
    std::map<u64, u64> m;
    for (u64 y1 = lo; y1 <= hi; ++y1)
        for (u64 y2 = 1; y2 <= Y; ++y2)
            for (u64 y3 = 1; y3 <= Y; ++y3)
                if (smooth_by_trial(y2, R) && smooth_by_trial(y3, R)) ++m[T(y1, y2, y3)];
    return m;
}

}  // namespace

TEST_CASE("derive_params on the documented examples") {
    const Params a = derive_params(64, 0.1);
    CHECK(a.P == 2);
    CHECK(a.M == doctest::Approx(std::pow(2.0, 0.4)));
    CHECK(a.H == doctest::Approx(std::pow(2.0, 1.8)));
    CHECK(a.R == 2);

    const Params b = derive_params(1000000000000ull, 0.1);
    CHECK(b.P == 100);
    CHECK(b.H == doctest::Approx(3981.07).epsilon(1e-6));
    CHECK(b.M * b.M * b.M * b.H == doctest::Approx(1e6).epsilon(1e-9));
    CHECK(b.H1 * b.H1 * b.H1 == doctest::Approx(b.H / 2));
    CHECK(b.H2 * b.H2 * b.H2 == doctest::Approx(2 * b.H / 3));
    CHECK(b.H3 * b.H3 * b.H3 == doctest::Approx(b.H / 6));

    CHECK_THROWS_AS(derive_params(63, 0.1), DegenerateError);
    CHECK_THROWS_AS(derive_params(64, 1.0), ContractError);
    CHECK(derive_params(64, 0.5, 7).R == 7);
    CHECK(derive_params(117649, 0.5).P == 7);
    CHECK(derive_params(117648, 0.5).P == 6);
}

TEST_CASE("smooth enumeration matches trial division, serial and parallel") {
    for (u64 R : {2u, 3u, 5u, 10u, 31u}) {
        const auto s = enumerate_smooth(3000, R, Exec::serial);
        const auto p = enumerate_smooth(3000, R, Exec::parallel);
        CHECK(s.members == p.members);
        std::vector<u64> expect;
        for (u64 n = 1; n <= 3000; ++n)
            if (smooth_by_trial(n, R)) expect.push_back(n);
        CHECK(s.members == expect);
    }
    CHECK(enumerate_smooth(10, 2).members == std::vector<u64>{1, 2, 4, 8});
    // The parallel path crosses several sieve blocks.
    CHECK(enumerate_smooth(300000, 50, Exec::serial).members == enumerate_smooth(300000, 50, Exec::parallel).members);
}

TEST_CASE("cube-sum sieve matches the triple loop") {
    const u64 X = 20000;
    std::vector<u64> r3(X + 1, 0);
    for (u64 a = 1; a * a * a < X; ++a)
        for (u64 b = 1; a * a * a + b * b * b < X; ++b)
            for (u64 c = 1; T(a, b, c) <= X; ++c) ++r3[T(a, b, c)];
    for (Exec e : {Exec::serial, Exec::parallel}) {
        const auto s = sieve_cube_sums(X, true, e);
        u64 cnt = 0;
        for (u64 n = 1; n <= X; ++n) {
            CHECK(s.contains(n) == (r3[n] > 0));
            CHECK(s.r3(n) == r3[n]);
            cnt += r3[n] > 0;
        }
        CHECK(s.count() == cnt);
    }
    CHECK(sieve_cube_sums(30, false).members() == std::vector<u64>{3, 10, 17, 24, 29});
    CHECK(sieve_cube_sums(2, false).members().empty());
}

TEST_CASE("weight tables match direct enumeration of the triple sets") {
    for (u64 P : {4u, 8u, 12u, 20u}) {
        const Params prm = params_from_P(P, 0.5);
        for (Role role : {Role::a, Role::b}) {
            const auto t = build_weight_table(prm, role);
            std::map<u64, u64> ref;
            if (role == Role::a) {
                ref = brute_weights(P / 2 + 1, P, P, prm.R);
            } else if (prm.H3 >= 1.0) {
                ref = brute_weights(static_cast<u64>(prm.H1) + 1, static_cast<u64>(prm.H2),
                                    static_cast<u64>(prm.H3), prm.R);
            }
            REQUIRE(t.size() == ref.size());
            std::size_t i = 0;
            for (const auto& [v, m] : ref) {
                CHECK(t.support[i] == v);
                CHECK(t.multiplicity[i] == m);
                ++i;
            }
            CHECK(t.total_mass() == expected_mass(prm, role));
            CHECK(build_weight_table(prm, role, Exec::serial).support == t.support);
        }
    }
    // The W-set is empty when (H1, H2] holds no integer.
    CHECK(build_weight_table(params_from_P(16, 0.5), Role::b).empty());
    CHECK(w_first_count(params_from_P(16, 0.5)) == 0);
    CHECK(w_first_count(params_from_P(20, 0.5)) == 1);
}

TEST_CASE("binary and csv round trip") {
    const Params prm = params_from_P(8, 0.5);
    const auto t = build_weight_table(prm, Role::a);
    std::stringstream ss;
    write_binary(ss, to_pairs(t));
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "WCL1");
    CHECK(bytes[4] == 'a');
    CHECK(bytes.size() == 13 + 16 * t.size());
    const auto back = weight_table_from_pairs(read_binary(ss));
    CHECK(back.support == t.support);
    CHECK(back.multiplicity == t.multiplicity);

    std::stringstream bad("WCL2xxxx");
    CHECK_THROWS_AS(read_binary(bad), Error);
    std::stringstream trunc(bytes.substr(0, 20));
    CHECK_THROWS_AS(read_binary(trunc), Error);

    std::ostringstream csv;
    write_csv(csv, to_pairs(sieve_cube_sums(30, false)));
    CHECK(csv.str() == "value,multiplicity\n3,1\n10,1\n17,1\n24,1\n29,1\n");
}

TEST_CASE("memory budget refuses oversize tables") {
    const auto saved = MemoryBudget::bytes();
    MemoryBudget::set_bytes(1 << 20);
    CHECK_THROWS_AS(sieve_cube_sums(100000000, true), CapacityError);
    MemoryBudget::set_bytes(saved);
}

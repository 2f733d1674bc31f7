#include <doctest.h>

#include <cmath>
#include <set>

#include "semguide/rng.hpp"

using namespace semguide;

TEST_CASE("same seed reproduces the exact stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(42), d(43);
    CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("uniform stays in [0, 1)") {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal draws have standard moments") {
    Rng rng(7);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("next_below respects the bound and hits every value") {
    Rng rng(3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const auto v = rng.next_below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
    CHECK_THROWS(rng.next_below(0));
}

TEST_CASE("forks are independent streams, derived from the seed") {
    Rng parent(5);
    Rng f1 = parent.fork(1);
    Rng f2 = parent.fork(2);
    CHECK(f1.next_u64() != f2.next_u64());

    Rng again = Rng(5).fork(1);
    again.next_u64();  // align with f1, which consumed one draw above
    CHECK(f1.next_u64() == again.next_u64());
}

TEST_CASE("shuffled_indices is a permutation and seed-stable") {
    Rng rng(11);
    const auto p = shuffled_indices(50, rng);
    std::set<std::size_t> seen(p.begin(), p.end());
    CHECK(seen.size() == 50);
    Rng rng2(11);
    CHECK(shuffled_indices(50, rng2) == p);
}

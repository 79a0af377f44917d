#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "extlm/bigrat.hpp"

using namespace extlm;

TEST_CASE("BigUint arithmetic matches native math on small values") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::uint64_t> dist(0, 1u << 30);
    for (int i = 0; i < 500; ++i) {
        std::uint64_t a = dist(rng), b = dist(rng);
        CHECK(BigUint(a) + BigUint(b) == BigUint(a + b));
        CHECK(BigUint(a) * BigUint(b) == BigUint(a * b));
        if (a >= b) CHECK(BigUint(a) - BigUint(b) == BigUint(a - b));
        if (b != 0) {
            CHECK(BigUint(a) / BigUint(b) == BigUint(a / b));
            CHECK(BigUint(a) % BigUint(b) == BigUint(a % b));
        }
    }
}

TEST_CASE("BigUint factorial and binomial") {
    CHECK(BigUint::factorial(10) == BigUint(3628800));
    CHECK(BigUint::factorial(20).to_string() == "2432902008176640000");
    CHECK(BigUint::binomial(4, 2) == BigUint(6));
    CHECK(BigUint::binomial(52, 5) == BigUint(2598960));
    CHECK(BigUint::binomial(500, 250).to_string().size() == 150);
    CHECK_THROWS_AS(BigUint::binomial(3, 4), std::domain_error);
}

TEST_CASE("BigUint log2 is accurate on large values") {
    BigUint f = BigUint::factorial(100);
    double expected = 0.0;
    for (int i = 2; i <= 100; ++i) expected += std::log2(static_cast<double>(i));
    CHECK(f.log2() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(BigUint(1).log2() == 0.0);
    CHECK(BigUint(1024).log2() == doctest::Approx(10.0));
}

TEST_CASE("BigUint shifting and comparison") {
    BigUint one(1);
    BigUint big = one << 100;
    BigUint smaller = one << 99;
    CHECK((big >> 100) == one);
    CHECK(big > smaller);
    CHECK(BigUint(0).is_zero());
    CHECK(big.bit_length() == 101);
}

TEST_CASE("gcd") {
    CHECK(gcd(BigUint(12), BigUint(18)) == BigUint(6));
    CHECK(gcd(BigUint(17), BigUint(5)) == BigUint(1));
    CHECK(gcd(BigUint(0), BigUint(9)) == BigUint(9));
    CHECK(gcd(BigUint::factorial(30), BigUint::factorial(25)) == BigUint::factorial(25));
}

TEST_CASE("BigRat exact arithmetic") {
    BigRat third(1, 3), sixth(1, 6);
    CHECK(third + sixth == BigRat(1, 2));
    CHECK(third - sixth == sixth);
    CHECK(sixth - third == BigRat(-1) * sixth);
    CHECK(third * BigRat(3, 4) == BigRat(1, 4));
    CHECK(BigRat(3, 4) / BigRat(3, 2) == BigRat(1, 2));
    CHECK(BigRat(2, 4) == BigRat(1, 2));  // reduction
    CHECK(BigRat(1, 2) < BigRat(2, 3));
    CHECK(BigRat(1, 2).to_double() == 0.5);
    CHECK_THROWS_AS(BigRat(1, 0), std::domain_error);
    CHECK_THROWS_AS(BigRat(1, 2) / BigRat::zero(), std::domain_error);
}

TEST_CASE("BigRat sums telescope exactly") {
    // sum of 1/(k(k+1)) = 1 - 1/(n+1)
    BigRat sum;
    for (std::uint64_t k = 1; k <= 50; ++k) sum += BigRat(1, k * (k + 1));
    CHECK(sum == BigRat(50, 51));
}

#pragma once

// Arbitrary-precision unsigned integers and signed rationals.
//
// The model stores every probability as a ratio of integer counts, so
// validity checks and the Example-1 fixtures can be verified exactly
// instead of through floating-point tolerances.  Numbers here stay in
// the hundreds-of-bits range (chains of count ratios, binomials up to
// a few thousand), so schoolbook arithmetic is plenty.

#include <cstdint>
#include <string>
#include <vector>

namespace extlm {

class BigUint {
public:
    BigUint() = default;
    BigUint(std::uint64_t v);

    static BigUint factorial(std::uint64_t n);
    static BigUint binomial(std::uint64_t n, std::uint64_t k);

    bool is_zero() const { return limbs_.empty(); }
    std::size_t bit_length() const;

    BigUint& operator+=(const BigUint& o);
    BigUint& operator-=(const BigUint& o);  // requires *this >= o
    BigUint& operator*=(const BigUint& o);
    BigUint& operator<<=(unsigned bits);
    BigUint& operator>>=(unsigned bits);

    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }
    friend BigUint operator-(BigUint a, const BigUint& b) { return a -= b; }
    friend BigUint operator*(BigUint a, const BigUint& b) { return a *= b; }
    friend BigUint operator<<(BigUint a, unsigned b) { return a <<= b; }
    friend BigUint operator>>(BigUint a, unsigned b) { return a >>= b; }

    // Quotient and remainder in one pass; divisor must be nonzero.
    static void divmod(const BigUint& num, const BigUint& den, BigUint& q, BigUint& r);
    BigUint operator/(const BigUint& o) const;
    BigUint operator%(const BigUint& o) const;

    int compare(const BigUint& o) const;
    friend bool operator==(const BigUint& a, const BigUint& b) { return a.compare(b) == 0; }
    friend bool operator!=(const BigUint& a, const BigUint& b) { return a.compare(b) != 0; }
    friend bool operator<(const BigUint& a, const BigUint& b) { return a.compare(b) < 0; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return a.compare(b) <= 0; }
    friend bool operator>(const BigUint& a, const BigUint& b) { return a.compare(b) > 0; }
    friend bool operator>=(const BigUint& a, const BigUint& b) { return a.compare(b) >= 0; }

    bool bit(std::size_t i) const;
    bool is_even() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }

    double to_double() const;
    // log2 of the value; accurate to ~1 ulp of double.  Value must be nonzero.
    double log2() const;
    std::string to_string() const;  // decimal

private:
    // Little-endian base-2^32 limbs, most significant limb nonzero.
    std::vector<std::uint32_t> limbs_;
    void trim();
};

BigUint gcd(BigUint a, BigUint b);

// Signed rational, always stored reduced with positive denominator.
class BigRat {
public:
    BigRat() : num_(0), den_(1), neg_(false) {}
    BigRat(std::int64_t v);
    BigRat(std::uint64_t num, std::uint64_t den);  // den must be nonzero
    BigRat(BigUint num, BigUint den, bool negative = false);

    static BigRat zero() { return BigRat(); }
    static BigRat one() { return BigRat(1); }

    bool is_zero() const { return num_.is_zero(); }
    bool negative() const { return neg_; }
    const BigUint& num() const { return num_; }
    const BigUint& den() const { return den_; }

    BigRat operator+(const BigRat& o) const;
    BigRat operator-(const BigRat& o) const;
    BigRat operator*(const BigRat& o) const;
    BigRat operator/(const BigRat& o) const;  // o must be nonzero
    BigRat& operator+=(const BigRat& o) { return *this = *this + o; }
    BigRat& operator-=(const BigRat& o) { return *this = *this - o; }
    BigRat& operator*=(const BigRat& o) { return *this = *this * o; }
    BigRat& operator/=(const BigRat& o) { return *this = *this / o; }

    int compare(const BigRat& o) const;
    friend bool operator==(const BigRat& a, const BigRat& b) { return a.compare(b) == 0; }
    friend bool operator!=(const BigRat& a, const BigRat& b) { return a.compare(b) != 0; }
    friend bool operator<(const BigRat& a, const BigRat& b) { return a.compare(b) < 0; }
    friend bool operator<=(const BigRat& a, const BigRat& b) { return a.compare(b) <= 0; }
    friend bool operator>(const BigRat& a, const BigRat& b) { return a.compare(b) > 0; }
    friend bool operator>=(const BigRat& a, const BigRat& b) { return a.compare(b) >= 0; }

    double to_double() const;
    std::string to_string() const;  // "num/den" or "-num/den"

private:
    BigUint num_, den_;
    bool neg_;
    void reduce();
};

}  // namespace extlm

#include "extlm/bigrat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace extlm {

BigUint::BigUint(std::uint64_t v) {
    if (v) limbs_.push_back(static_cast<std::uint32_t>(v));
    if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
}

void BigUint::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

std::size_t BigUint::bit_length() const {
    if (limbs_.empty()) return 0;
    std::uint32_t top = limbs_.back();
    std::size_t bits = (limbs_.size() - 1) * 32;
    while (top) { ++bits; top >>= 1; }
    return bits;
}

bool BigUint::bit(std::size_t i) const {
    std::size_t limb = i / 32;
    if (limb >= limbs_.size()) return false;
    return (limbs_[limb] >> (i % 32)) & 1u;
}

int BigUint::compare(const BigUint& o) const {
    if (limbs_.size() != o.limbs_.size())
        return limbs_.size() < o.limbs_.size() ? -1 : 1;
    for (std::size_t i = limbs_.size(); i-- > 0;) {
        if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
    }
    return 0;
}

BigUint& BigUint::operator+=(const BigUint& o) {
    std::uint64_t carry = 0;
    std::size_t n = std::max(limbs_.size(), o.limbs_.size());
    limbs_.resize(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t s = carry + limbs_[i] + (i < o.limbs_.size() ? o.limbs_[i] : 0);
        limbs_[i] = static_cast<std::uint32_t>(s);
        carry = s >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
    return *this;
}

BigUint& BigUint::operator-=(const BigUint& o) {
    if (compare(o) < 0) throw std::underflow_error("BigUint subtraction underflow");
    std::int64_t borrow = 0;
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::int64_t d = static_cast<std::int64_t>(limbs_[i]) - borrow -
                         (i < o.limbs_.size() ? static_cast<std::int64_t>(o.limbs_[i]) : 0);
        borrow = d < 0;
        if (d < 0) d += (std::int64_t{1} << 32);
        limbs_[i] = static_cast<std::uint32_t>(d);
    }
    trim();
    return *this;
}

BigUint& BigUint::operator*=(const BigUint& o) {
    if (is_zero() || o.is_zero()) { limbs_.clear(); return *this; }
    std::vector<std::uint32_t> out(limbs_.size() + o.limbs_.size(), 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < o.limbs_.size(); ++j) {
            std::uint64_t cur = carry + out[i + j] +
                                static_cast<std::uint64_t>(limbs_[i]) * o.limbs_[j];
            out[i + j] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
        std::size_t k = i + o.limbs_.size();
        while (carry) {
            std::uint64_t cur = carry + out[k];
            out[k++] = static_cast<std::uint32_t>(cur);
            carry = cur >> 32;
        }
    }
    limbs_ = std::move(out);
    trim();
    return *this;
}

BigUint& BigUint::operator<<=(unsigned bits) {
    if (is_zero() || bits == 0) return *this;
    unsigned limb_shift = bits / 32, bit_shift = bits % 32;
    std::vector<std::uint32_t> out(limbs_.size() + limb_shift + 1, 0);
    for (std::size_t i = 0; i < limbs_.size(); ++i) {
        std::uint64_t v = static_cast<std::uint64_t>(limbs_[i]) << bit_shift;
        out[i + limb_shift] |= static_cast<std::uint32_t>(v);
        out[i + limb_shift + 1] |= static_cast<std::uint32_t>(v >> 32);
    }
    limbs_ = std::move(out);
    trim();
    return *this;
}

BigUint& BigUint::operator>>=(unsigned bits) {
    unsigned limb_shift = bits / 32, bit_shift = bits % 32;
    if (limb_shift >= limbs_.size()) { limbs_.clear(); return *this; }
    limbs_.erase(limbs_.begin(), limbs_.begin() + limb_shift);
    if (bit_shift) {
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            limbs_[i] >>= bit_shift;
            if (i + 1 < limbs_.size())
                limbs_[i] |= static_cast<std::uint32_t>(
                    static_cast<std::uint64_t>(limbs_[i + 1]) << (32 - bit_shift));
        }
    }
    trim();
    return *this;
}

void BigUint::divmod(const BigUint& num, const BigUint& den, BigUint& q, BigUint& r) {
    if (den.is_zero()) throw std::domain_error("BigUint division by zero");
    q = BigUint();
    r = BigUint();
    if (num.compare(den) < 0) { r = num; return; }
    if (den.limbs_.size() == 1) {
        // Single-limb divisor: one pass of 64-by-32 division.
        std::uint64_t d = den.limbs_[0], rem = 0;
        q.limbs_.assign(num.limbs_.size(), 0);
        for (std::size_t i = num.limbs_.size(); i-- > 0;) {
            std::uint64_t cur = (rem << 32) | num.limbs_[i];
            q.limbs_[i] = static_cast<std::uint32_t>(cur / d);
            rem = cur % d;
        }
        q.trim();
        if (rem) r = BigUint(rem);
        return;
    }
    // General case: restoring division, one bit at a time.
    std::size_t nbits = num.bit_length();
    q.limbs_.assign((nbits + 31) / 32, 0);
    for (std::size_t i = nbits; i-- > 0;) {
        std::uint32_t carry = num.bit(i) ? 1u : 0u;
        for (auto& limb : r.limbs_) {
            std::uint64_t v = (static_cast<std::uint64_t>(limb) << 1) | carry;
            limb = static_cast<std::uint32_t>(v);
            carry = static_cast<std::uint32_t>(v >> 32);
        }
        if (carry) r.limbs_.push_back(carry);
        if (r.compare(den) >= 0) {
            r -= den;
            q.limbs_[i / 32] |= (1u << (i % 32));
        }
    }
    q.trim();
}

BigUint BigUint::operator/(const BigUint& o) const {
    BigUint q, r;
    divmod(*this, o, q, r);
    return q;
}

BigUint BigUint::operator%(const BigUint& o) const {
    BigUint q, r;
    divmod(*this, o, q, r);
    return r;
}

BigUint BigUint::factorial(std::uint64_t n) {
    BigUint out(1);
    for (std::uint64_t i = 2; i <= n; ++i) out *= BigUint(i);
    return out;
}

BigUint BigUint::binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw std::domain_error("binomial: k > n");
    if (k > n - k) k = n - k;
    BigUint out(1);
    for (std::uint64_t i = 1; i <= k; ++i) {
        out *= BigUint(n - k + i);
        out = out / BigUint(i);  // exact at every step
    }
    return out;
}

double BigUint::to_double() const {
    double out = 0;
    for (std::size_t i = limbs_.size(); i-- > 0;)
        out = out * 4294967296.0 + limbs_[i];
    return out;
}

double BigUint::log2() const {
    if (is_zero()) throw std::domain_error("log2 of zero");
    std::size_t bl = bit_length();
    if (bl <= 64) {
        std::uint64_t v = limbs_[0];
        if (limbs_.size() > 1) v |= static_cast<std::uint64_t>(limbs_[1]) << 32;
        return std::log2(static_cast<double>(v));
    }
    // Take the top 64 bits; the discarded tail perturbs log2 by < 2^-63.
    BigUint top = *this;
    top >>= static_cast<unsigned>(bl - 64);
    std::uint64_t v = top.limbs_[0];
    if (top.limbs_.size() > 1) v |= static_cast<std::uint64_t>(top.limbs_[1]) << 32;
    return std::log2(static_cast<double>(v)) + static_cast<double>(bl - 64);
}

std::string BigUint::to_string() const {
    if (is_zero()) return "0";
    std::string out;
    BigUint v = *this;
    const BigUint ten(10);
    while (!v.is_zero()) {
        BigUint q, r;
        divmod(v, ten, q, r);
        out.push_back(static_cast<char>('0' + (r.limbs_.empty() ? 0 : r.limbs_[0])));
        v = std::move(q);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

BigUint gcd(BigUint a, BigUint b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    unsigned shift = 0;
    while (a.is_even() && b.is_even()) { a >>= 1; b >>= 1; ++shift; }
    while (a.is_even()) a >>= 1;
    for (;;) {
        while (b.is_even()) b >>= 1;
        if (a > b) std::swap(a, b);
        b -= a;
        if (b.is_zero()) break;
    }
    return a << shift;
}

BigRat::BigRat(std::int64_t v)
    : num_(static_cast<std::uint64_t>(v < 0 ? -v : v)), den_(1), neg_(v < 0) {}

BigRat::BigRat(std::uint64_t num, std::uint64_t den) : num_(num), den_(den), neg_(false) {
    if (den == 0) throw std::domain_error("BigRat: zero denominator");
    reduce();
}

BigRat::BigRat(BigUint num, BigUint den, bool negative)
    : num_(std::move(num)), den_(std::move(den)), neg_(negative) {
    if (den_.is_zero()) throw std::domain_error("BigRat: zero denominator");
    reduce();
}

void BigRat::reduce() {
    if (num_.is_zero()) { den_ = BigUint(1); neg_ = false; return; }
    BigUint g = gcd(num_, den_);
    if (g != BigUint(1)) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
}

BigRat BigRat::operator*(const BigRat& o) const {
    return BigRat(num_ * o.num_, den_ * o.den_, neg_ != o.neg_);
}

BigRat BigRat::operator/(const BigRat& o) const {
    if (o.is_zero()) throw std::domain_error("BigRat division by zero");
    return BigRat(num_ * o.den_, den_ * o.num_, neg_ != o.neg_);
}

BigRat BigRat::operator+(const BigRat& o) const {
    BigUint l = num_ * o.den_, r = o.num_ * den_, d = den_ * o.den_;
    if (neg_ == o.neg_) return BigRat(l + r, std::move(d), neg_);
    if (l >= r) return BigRat(l - r, std::move(d), neg_);
    return BigRat(r - l, std::move(d), o.neg_);
}

BigRat BigRat::operator-(const BigRat& o) const {
    BigRat flipped = o;
    if (!flipped.is_zero()) flipped.neg_ = !flipped.neg_;
    return *this + flipped;
}

int BigRat::compare(const BigRat& o) const {
    if (neg_ != o.neg_) return neg_ ? -1 : 1;
    int c = (num_ * o.den_).compare(o.num_ * den_);
    return neg_ ? -c : c;
}

double BigRat::to_double() const {
    if (num_.is_zero()) return 0.0;
    double v = std::exp2(num_.log2() - den_.log2());
    return neg_ ? -v : v;
}

std::string BigRat::to_string() const {
    std::string out = neg_ ? "-" : "";
    out += num_.to_string();
    out += "/";
    out += den_.to_string();
    return out;
}

}  // namespace extlm

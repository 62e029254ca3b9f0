#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ps {

// Sign/magnitude arbitrary-precision integer, base 2^32. Covers exactly the
// operations the polynomial backend needs: +, -, *, pow, comparison and
// decimal I/O. No division beyond the small-divisor helper used for printing.
class BigInt {
public:
    BigInt() = default;
    BigInt(std::int64_t v);

    static BigInt from_decimal(std::string_view s);  // throws std::invalid_argument

    bool is_zero() const { return sign_ == 0; }
    int sign() const { return sign_; }
    bool is_one() const;

    BigInt operator-() const;
    BigInt& operator+=(const BigInt& rhs);
    BigInt& operator-=(const BigInt& rhs);
    BigInt& operator*=(const BigInt& rhs);

    friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
    friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }
    friend BigInt operator*(BigInt a, const BigInt& b) { return a *= b; }

    BigInt pow(std::uint32_t e) const;

    bool operator==(const BigInt& rhs) const;
    bool operator!=(const BigInt& rhs) const { return !(*this == rhs); }
    bool operator<(const BigInt& rhs) const;
    bool operator>(const BigInt& rhs) const { return rhs < *this; }
    bool operator<=(const BigInt& rhs) const { return !(rhs < *this); }
    bool operator>=(const BigInt& rhs) const { return !(*this < rhs); }

    std::string to_decimal() const;

private:
    // sign_ is 0 iff limbs_ is empty; limbs_ is little-endian, no leading zeros.
    int sign_ = 0;
    std::vector<std::uint32_t> limbs_;

    void trim();
    static int cmp_mag(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
    static void add_mag(std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
    // pre: |a| >= |b|
    static void sub_mag(std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);
};

}  // namespace ps

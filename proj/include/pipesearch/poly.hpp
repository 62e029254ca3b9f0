#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pipesearch/bigint.hpp"

namespace ps::poly {

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

// variable index -> power, powers >= 1 only
using ExponentMap = std::map<int, int>;

struct Monomial {
    BigInt coefficient;
    ExponentMap exponents;

    int total_degree() const;
    bool operator==(const Monomial& rhs) const {
        return coefficient == rhs.coefficient && exponents == rhs.exponents;
    }
};

// Canonical form: terms merged (unique exponent maps), zero terms dropped,
// terms ordered by descending total degree then descending exponent vector,
// variable indices dense 0..nvars-1 with names[] sorted ascending.
struct Polynomial {
    int nvars = 0;
    std::vector<std::string> names;  // index -> display name
    std::vector<Monomial> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const Polynomial& rhs) const {
        return nvars == rhs.nvars && names == rhs.names && terms == rhs.terms;
    }
};

// Merges like terms, drops zeros, sorts canonically and prunes variables that
// no longer occur (reindexing the rest densely).
Polynomial make_canonical(std::vector<std::string> names, std::vector<Monomial> terms);

// Grammar: expression := ('-')? term (('+'|'-') term)*
//          term       := factor ('*' factor)*
//          factor     := INTEGER | IDENT ('^' INTEGER)?
// Whitespace is insignificant. Variable indices are assigned by sorted name.
Polynomial parse_polynomial(std::string_view text);

// Same, but any identifier outside `allowed` is an error.
Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& allowed);

std::string to_string(const Polynomial& p);

// Exact value at an integer point; point[i] assigns variable i.
// Throws std::invalid_argument if an assignment is missing.
BigInt evaluate(const Polynomial& p, const std::vector<BigInt>& point);

// Deterministic random polynomial: exactly nterms distinct monomials, every
// variable occurring in at least one term, per-variable exponents <= max_degree,
// coefficients in [-9,9] \ {0}.
Polynomial random_polynomial(int nvars, int nterms, int max_degree, std::uint64_t seed);

}  // namespace ps::poly

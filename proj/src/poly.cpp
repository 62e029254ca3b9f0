#include "pipesearch/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "pipesearch/rng.hpp"

namespace ps::poly {

int Monomial::total_degree() const {
    int d = 0;
    for (const auto& [v, e] : exponents) d += e;
    return d;
}

namespace {

// Descending total degree, then descending exponent comparison from the
// lowest variable index up. Yields x^3, x^2, x, 1 for univariate input.
bool term_before(const Monomial& a, const Monomial& b) {
    int da = a.total_degree();
    int db = b.total_degree();
    if (da != db) return da > db;
    auto ia = a.exponents.begin();
    auto ib = b.exponents.begin();
    while (ia != a.exponents.end() && ib != b.exponents.end()) {
        if (ia->first != ib->first) return ia->first < ib->first;
        if (ia->second != ib->second) return ia->second > ib->second;
        ++ia;
        ++ib;
    }
    return ib != b.exponents.end();
}

}  // namespace

Polynomial make_canonical(std::vector<std::string> names, std::vector<Monomial> terms) {
    // merge like terms
    std::map<ExponentMap, BigInt> merged;
    for (auto& m : terms) {
        for (const auto& [v, e] : m.exponents) {
            if (e <= 0) throw std::invalid_argument("monomial exponent must be >= 1");
        }
        merged[m.exponents] += m.coefficient;
    }
    std::vector<Monomial> kept;
    for (auto& [exps, coeff] : merged) {
        if (!coeff.is_zero()) kept.push_back(Monomial{coeff, exps});
    }

    // prune unused variables, reindex densely
    std::set<int> used;
    for (const auto& m : kept) {
        for (const auto& [v, e] : m.exponents) used.insert(v);
    }
    std::map<int, int> remap;
    std::vector<std::string> kept_names;
    for (int v : used) {
        if (v < 0 || v >= static_cast<int>(names.size())) {
            throw std::invalid_argument("monomial references unknown variable index");
        }
        remap[v] = static_cast<int>(kept_names.size());
        kept_names.push_back(names[v]);
    }
    for (auto& m : kept) {
        ExponentMap e2;
        for (const auto& [v, e] : m.exponents) e2[remap[v]] = e;
        m.exponents = std::move(e2);
    }

    std::sort(kept.begin(), kept.end(), term_before);

    Polynomial p;
    p.nvars = static_cast<int>(kept_names.size());
    p.names = std::move(kept_names);
    p.terms = std::move(kept);
    return p;
}

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    const std::vector<std::string>* allowed = nullptr;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool eat(char c) {
        if (peek_is(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    BigInt parse_integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer", start);
        return BigInt::from_decimal(text.substr(start, pos - start));
    }

    std::string parse_ident() {
        skip_ws();
        std::size_t start = pos;
        if (pos >= text.size() || !std::isalpha(static_cast<unsigned char>(text[pos]))) {
            throw ParseError("expected identifier", start);
        }
        ++pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            ++pos;
        }
        return std::string(text.substr(start, pos - start));
    }

    // factor := INTEGER | IDENT ('^' INTEGER)?
    void parse_factor(BigInt& coeff, std::map<std::string, int>& powers) {
        skip_ws();
        if (pos >= text.size()) throw ParseError("expected factor", pos);
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            coeff *= parse_integer();
            return;
        }
        std::size_t ident_pos = pos;
        std::string name = parse_ident();
        if (allowed && std::find(allowed->begin(), allowed->end(), name) == allowed->end()) {
            throw ParseError("unknown variable '" + name + "'", ident_pos);
        }
        int power = 1;
        if (eat('^')) {
            BigInt e = parse_integer();
            // sane exponent bound; anything bigger is surely a mistake
            if (e > BigInt(1000000)) throw ParseError("exponent too large", pos);
            power = 0;
            for (const char d : e.to_decimal()) power = power * 10 + (d - '0');
        }
        powers[name] += power;
    }

    // term := factor ('*' factor)*
    void parse_term(std::vector<std::pair<BigInt, std::map<std::string, int>>>& out, bool negate) {
        BigInt coeff(1);
        std::map<std::string, int> powers;
        parse_factor(coeff, powers);
        while (eat('*')) parse_factor(coeff, powers);
        if (negate) coeff = -coeff;
        out.emplace_back(std::move(coeff), std::move(powers));
    }

    Polynomial parse() {
        std::vector<std::pair<BigInt, std::map<std::string, int>>> raw;
        bool negate = eat('-');
        parse_term(raw, negate);
        for (;;) {
            skip_ws();
            if (pos >= text.size()) break;
            if (eat('+')) {
                parse_term(raw, false);
            } else if (eat('-')) {
                parse_term(raw, true);
            } else {
                throw ParseError("unexpected character", pos);
            }
        }

        std::set<std::string> name_set;
        for (const auto& [c, powers] : raw) {
            for (const auto& [n, e] : powers) name_set.insert(n);
        }
        std::vector<std::string> names(name_set.begin(), name_set.end());
        std::map<std::string, int> index;
        for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);

        std::vector<Monomial> terms;
        for (auto& [c, powers] : raw) {
            Monomial m;
            m.coefficient = std::move(c);
            for (const auto& [n, e] : powers) {
                if (e > 0) m.exponents[index[n]] = e;
            }
            terms.push_back(std::move(m));
        }
        return make_canonical(std::move(names), std::move(terms));
    }
};

}  // namespace

Polynomial parse_polynomial(std::string_view text) {
    Parser p{text};
    return p.parse();
}

Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& allowed) {
    Parser p{text};
    p.allowed = &allowed;
    return p.parse();
}

std::string to_string(const Polynomial& p) {
    if (p.terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& m : p.terms) {
        const bool neg = m.coefficient.sign() < 0;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        BigInt mag = neg ? -m.coefficient : m.coefficient;
        bool printed = false;
        if (!mag.is_one() || m.exponents.empty()) {
            out += mag.to_decimal();
            printed = true;
        }
        for (const auto& [v, e] : m.exponents) {
            if (printed) out += "*";
            out += p.names[v];
            if (e > 1) {
                out += "^";
                out += std::to_string(e);
            }
            printed = true;
        }
    }
    return out;
}

BigInt evaluate(const Polynomial& p, const std::vector<BigInt>& point) {
    if (static_cast<int>(point.size()) < p.nvars) {
        throw std::invalid_argument("evaluate: missing variable assignment");
    }
    BigInt sum(0);
    for (const auto& m : p.terms) {
        BigInt val = m.coefficient;
        for (const auto& [v, e] : m.exponents) {
            val *= point[v].pow(static_cast<std::uint32_t>(e));
        }
        sum += val;
    }
    return sum;
}

namespace {

std::string variable_name(int i, int nvars) {
    if (nvars <= 26) return std::string(1, static_cast<char>('a' + i));
    // zero-padded so lexicographic name order matches index order
    std::string num = std::to_string(i);
    std::string width = std::to_string(nvars - 1);
    return "x" + std::string(width.size() - num.size(), '0') + num;
}

}  // namespace

Polynomial random_polynomial(int nvars, int nterms, int max_degree, std::uint64_t seed) {
    if (nvars < 1 || nterms < 1) {
        throw std::invalid_argument("random_polynomial: nvars and nterms must be >= 1");
    }
    if (max_degree < 1) {
        throw std::invalid_argument("random_polynomial: max_degree must be >= 1");
    }
    // number of distinct exponent maps is (max_degree+1)^nvars, capped to avoid overflow
    double log_count = nvars * std::log2(static_cast<double>(max_degree) + 1.0);
    if (log_count < 62.0 &&
        static_cast<double>(nterms) > std::pow(static_cast<double>(max_degree) + 1.0, nvars)) {
        throw std::invalid_argument("random_polynomial: nterms exceeds distinct monomials");
    }

    SplitMix64 rng(mix64(seed, 0x706f6c79ULL));  // "poly"
    std::set<ExponentMap> seen;
    std::vector<Monomial> terms;
    for (int t = 0; t < nterms; ++t) {
        ExponentMap exps;
        for (int attempt = 0;; ++attempt) {
            if (attempt > 10000) {
                throw std::invalid_argument("random_polynomial: cannot build distinct terms");
            }
            exps.clear();
            for (int v = 0; v < nvars; ++v) {
                // variable v is forced into term (v % nterms), so every variable occurs
                bool force = (v % nterms) == t;
                int e;
                if (force) {
                    e = 1 + rng.below_int(max_degree);
                } else {
                    e = rng.below(2) == 0 ? 0 : 1 + rng.below_int(max_degree);
                }
                if (e > 0) exps[v] = e;
            }
            if (seen.insert(exps).second) break;
        }
        std::int64_t mag = 1 + rng.below(9);
        std::int64_t c = rng.below(2) == 0 ? mag : -mag;
        terms.push_back(Monomial{BigInt(c), exps});
    }

    std::vector<std::string> names;
    names.reserve(nvars);
    for (int i = 0; i < nvars; ++i) names.push_back(variable_name(i, nvars));
    return make_canonical(std::move(names), std::move(terms));
}

}  // namespace ps::poly

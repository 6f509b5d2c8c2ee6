#ifndef CKP_TESTS_SUPPORT_HPP
#define CKP_TESTS_SUPPORT_HPP

// Shared test helpers: seeded random generators and small independent oracles.

#include <map>
#include <random>
#include <vector>

#include <ckp/diffring.hpp>
#include <ckp/integrate.hpp>
#include <ckp/psido.hpp>

namespace ckp::testing {

inline constexpr std::uint64_t kSeed = 20240611;
inline constexpr int kInstances = 200;

inline DiffPoly P(const char *s) { return DiffPoly::parse(s); }

class Gen {
public:
    explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Rational coefficient() {
        int num = 0;
        while (num == 0) num = uniform(-4, 4);
        Rational c(num, uniform(1, 3));
        c.canonicalize();
        return c;
    }

    JetVar jet(int max_order = 3) { return JetVar{uniform(0, 1) == 0 ? Symbol::q : Symbol::r, uniform(0, max_order)}; }

    // Atoms drawn from a fixed pool of level-one antiderivatives.
    NonlocalAtom atom() {
        static const std::vector<NonlocalAtom> pool = [] {
            Integrator integ;
            std::vector<NonlocalAtom> v;
            for (const char *s : {"q*r", "q^2", "r^2", "q'*r"}) {
                DiffPoly a = integ.antiderivative(DiffPoly::parse(s));
                v.push_back(a.terms().begin()->first.atoms().front().first);
            }
            return v;
        }();
        return pool[static_cast<std::size_t>(uniform(0, static_cast<int>(pool.size()) - 1))];
    }

    Monomial monomial(int max_degree = 3, bool atoms = false, int max_order = 3) {
        Monomial m;
        const int degree = uniform(0, max_degree);
        for (int i = 0; i < degree; ++i) m = m * Monomial::of(jet(max_order));
        if (atoms && uniform(0, 2) == 0) m = m * Monomial::of(atom());
        return m;
    }

    DiffPoly poly(int max_terms = 4, int max_degree = 3, bool atoms = false, int max_order = 3) {
        DiffPoly p;
        const int n = uniform(0, max_terms);
        for (int i = 0; i < n; ++i) p.add_term(monomial(max_degree, atoms, max_order), coefficient());
        return p;
    }

    // Local polynomial without constant term.
    DiffPoly nonconstant_poly(int max_terms = 3, int max_degree = 3) {
        DiffPoly p;
        const int n = uniform(1, max_terms);
        for (int i = 0; i < n; ++i) {
            Monomial m = Monomial::of(jet());
            const int extra = uniform(0, max_degree - 1);
            for (int j = 0; j < extra; ++j) m = m * Monomial::of(jet());
            p.add_term(m, coefficient());
        }
        return p;
    }

    PsiDO psido(int max_order, int min_order, int depth) {
        std::map<int, DiffPoly> coeffs;
        for (int k = min_order; k <= max_order; ++k)
            if (uniform(0, 2) != 0) coeffs[k] = poly(2, 2, false, 2);
        return PsiDO(std::move(coeffs), depth);
    }

private:
    std::mt19937_64 rng_;
};

// Coefficient maps multiplied by the Leibniz rule, coded directly from
// d^i a = sum_l binom(i, l) a^(l) d^(i - l); keeps orders >= lowest.
inline std::map<int, DiffPoly> series_product(const std::map<int, DiffPoly> &a, const std::map<int, DiffPoly> &b,
                                              int lowest) {
    std::map<int, DiffPoly> out;
    for (const auto &[i, ai] : a) {
        for (const auto &[j, bj] : b) {
            DiffPoly deriv = bj;
            Rational binom = 1;
            for (int l = 0; i + j - l >= lowest; ++l) {
                if (l > 0) {
                    deriv = d_x(deriv);
                    binom = binom * Rational(i - l + 1) / Rational(l);
                }
                if (binom == 0) break;
                out[i + j - l] += binom * (ai * deriv);
            }
        }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

// L = d + q d^-1 r + r d^-1 q written out term by term:
// f d^-1 g = sum_l (-1)^l f g^(l) d^(-1-l).
inline std::map<int, DiffPoly> lax_series(int depth) {
    std::map<int, DiffPoly> l{{1, DiffPoly(Rational(1))}};
    const DiffPoly q = DiffPoly::jet(Symbol::q);
    const DiffPoly r = DiffPoly::jet(Symbol::r);
    for (int k = 0; k < depth; ++k) {
        const Rational sign = k % 2 == 0 ? 1 : -1;
        l[-1 - k] += sign * (q * DiffPoly::jet(Symbol::r, k) + r * DiffPoly::jet(Symbol::q, k));
    }
    return l;
}

// Right-coefficient form: sum d^k b_k. Product of two such forms uses
// a d^j = sum_l binom(j, l) (-1)^l d^(j - l) a^(l).
inline std::map<int, DiffPoly> right_product(const std::map<int, DiffPoly> &a, const std::map<int, DiffPoly> &b,
                                             int lowest) {
    std::map<int, DiffPoly> out;
    for (const auto &[i, ai] : a) {
        for (const auto &[j, bj] : b) {
            DiffPoly deriv = ai;
            Rational binom = 1;
            for (int l = 0; i + j - l >= lowest; ++l) {
                if (l > 0) {
                    deriv = d_x(deriv);
                    binom = binom * Rational(j - l + 1) / Rational(l);
                }
                if (binom == 0) break;
                const Rational sign = l % 2 == 0 ? 1 : -1;
                out[i + j - l] += (sign * binom) * (deriv * bj);
            }
        }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

// d^k b (right form) to left form: d^k b = sum_l binom(k, l) b^(l) d^(k - l).
inline std::map<int, DiffPoly> right_to_left(const std::map<int, DiffPoly> &a, int lowest) {
    std::map<int, DiffPoly> out;
    for (const auto &[k, b] : a) {
        DiffPoly deriv = b;
        Rational binom = 1;
        for (int l = 0; k - l >= lowest; ++l) {
            if (l > 0) {
                deriv = d_x(deriv);
                binom = binom * Rational(k - l + 1) / Rational(l);
            }
            if (binom == 0) break;
            out[k - l] += binom * deriv;
        }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

// Left form to right form: a d^k = sum_l binom(k, l) (-1)^l d^(k - l) a^(l).
inline std::map<int, DiffPoly> left_to_right(const std::map<int, DiffPoly> &a, int lowest) {
    std::map<int, DiffPoly> out;
    for (const auto &[k, c] : a) {
        DiffPoly deriv = c;
        Rational binom = 1;
        for (int l = 0; k - l >= lowest; ++l) {
            if (l > 0) {
                deriv = d_x(deriv);
                binom = binom * Rational(k - l + 1) / Rational(l);
            }
            if (binom == 0) break;
            out[k - l] += (l % 2 == 0 ? Rational(1) : Rational(-1)) * binom * deriv;
        }
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

} // namespace ckp::testing

#endif

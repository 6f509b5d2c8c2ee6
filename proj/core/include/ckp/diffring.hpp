#ifndef CKP_DIFFRING_HPP
#define CKP_DIFFRING_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

namespace ckp {

using Rational = mpq_class;

enum class Symbol : std::uint8_t { q = 0, r = 1, u = 2 };

char symbol_char(Symbol s);

// A dependent variable together with its number of x-derivatives: q, q', q'', q[3], ...
struct JetVar {
    Symbol symbol = Symbol::q;
    int order = 0;

    friend bool operator==(const JetVar &, const JetVar &) = default;
    friend std::strong_ordering operator<=>(const JetVar &, const JetVar &) = default;
};

class Monomial;
class DiffPoly;
class Integrator;

// The formal antiderivative I(m) of a reduced, coefficient-one monomial m.
//
// Atoms are only ever built around monomials the Integrator has certified as
// irreducible, so two atoms are equal iff their integrands are. The level of an
// atom is one more than the deepest atom inside its integrand.
class NonlocalAtom {
public:
    // Precondition: integrand is reduced (Integrator::is_reduced). Prefer
    // Integrator::antiderivative, which checks this and the nesting limit.
    static NonlocalAtom of_reduced(const Monomial &integrand);

    const Monomial &integrand() const { return *integrand_; }
    DiffPoly integrand_poly() const;
    int level() const { return level_; }
    int degree() const;
    const std::string &key() const { return key_; }

    friend bool operator==(const NonlocalAtom &a, const NonlocalAtom &b) {
        return a.level_ == b.level_ && a.key_ == b.key_;
    }
    friend std::strong_ordering operator<=>(const NonlocalAtom &a, const NonlocalAtom &b);

private:
    std::shared_ptr<const Monomial> integrand_;
    int level_ = 1;
    std::string key_;
};

// A coefficient-free power product of jet variables, atoms and the formal
// scaling constant lam. Factors are kept sorted so equal monomials compare equal.
class Monomial {
public:
    using JetPowers = std::vector<std::pair<JetVar, int>>;
    using AtomPowers = std::vector<std::pair<NonlocalAtom, int>>;

    Monomial() = default;
    static Monomial of(JetVar v, int power = 1);
    static Monomial of(const NonlocalAtom &a, int power = 1);
    static Monomial lambda(int exponent);

    const JetPowers &jets() const { return jets_; }
    const AtomPowers &atoms() const { return atoms_; }
    int scale_exponent() const { return scale_; }

    bool is_one() const { return jets_.empty() && atoms_.empty() && scale_ == 0; }
    // Polynomial degree in the dependent variables; an atom counts the degree of its integrand.
    int degree() const;
    // Deepest atom nesting; 0 for local monomials.
    int level() const;
    int max_order() const;
    bool uses(Symbol s) const;

    int power_of(const JetVar &v) const;
    int power_of(const NonlocalAtom &a) const;

    // Multiply by v^delta; delta may be negative as long as the power stays >= 0.
    Monomial times_jet(const JetVar &v, int delta) const;
    Monomial times_atom(const NonlocalAtom &a, int delta) const;
    Monomial with_scale(int exponent) const;
    Monomial without_scale() const { return with_scale(0); }

    std::optional<Monomial> divided_by(const Monomial &d) const;

    friend Monomial operator*(const Monomial &a, const Monomial &b);
    friend bool operator==(const Monomial &, const Monomial &) = default;
    // Canonical term order: total degree first, then factors lexicographically.
    friend std::strong_ordering operator<=>(const Monomial &a, const Monomial &b);

private:
    JetPowers jets_;
    AtomPowers atoms_;
    int scale_ = 0;
};

std::string to_string(const Monomial &m);

// A differential polynomial with exact rational coefficients.
class DiffPoly {
public:
    using Terms = std::map<Monomial, Rational>;

    DiffPoly() = default;
    explicit DiffPoly(const Rational &constant);
    DiffPoly(const Monomial &m, const Rational &coeff = 1);

    static DiffPoly jet(Symbol s, int order = 0);
    static DiffPoly atom(const NonlocalAtom &a);
    static DiffPoly parse(std::string_view text);
    static DiffPoly from_json(const nlohmann::json &j);

    const Terms &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    bool is_local() const { return level() == 0; }
    int level() const;
    bool uses(Symbol s) const;
    Rational coeff(const Monomial &m) const;

    void add_term(const Monomial &m, const Rational &c);

    DiffPoly &operator+=(const DiffPoly &o);
    DiffPoly &operator-=(const DiffPoly &o);
    DiffPoly &operator*=(const DiffPoly &o);
    DiffPoly &operator*=(const Rational &c);

    friend DiffPoly operator+(DiffPoly a, const DiffPoly &b) { return a += b; }
    friend DiffPoly operator-(DiffPoly a, const DiffPoly &b) { return a -= b; }
    friend DiffPoly operator*(const DiffPoly &a, const DiffPoly &b);
    friend DiffPoly operator*(DiffPoly a, const Rational &c) { return a *= c; }
    friend DiffPoly operator*(const Rational &c, DiffPoly a) { return a *= c; }
    friend DiffPoly operator-(DiffPoly a);
    friend bool operator==(const DiffPoly &, const DiffPoly &) = default;

    std::string to_string() const;
    std::string to_latex() const;
    nlohmann::json to_json() const;

private:
    Terms terms_;
};

std::ostream &operator<<(std::ostream &os, const DiffPoly &p);

DiffPoly pow(const DiffPoly &p, int n);

// Total x-derivative.
DiffPoly d_x(const Monomial &m);
DiffPoly d_x(const DiffPoly &p);
DiffPoly d_x(const DiffPoly &p, int times);

// One time-flow of the hierarchy: (q_{t_m}, r_{t_m}).
struct FlowPair {
    int m = 1;
    DiffPoly q_t;
    DiffPoly r_t;

    friend bool operator==(const FlowPair &a, const FlowPair &b) {
        return a.q_t == b.q_t && a.r_t == b.r_t;
    }
};

// Substitutes every jet through `image` (given the order-0 image of each symbol,
// derivatives follow by d_x). Atoms are rebuilt as antiderivatives of their
// substituted integrands, so integrands that become exact resolve locally.
DiffPoly substitute(const DiffPoly &p, const std::function<DiffPoly(Symbol)> &image, Integrator &integ);

DiffPoly substitute_r_to_q(const DiffPoly &p, Integrator &integ);
DiffPoly substitute_r_to_q(const DiffPoly &p);
DiffPoly swap_qr(const DiffPoly &p, Integrator &integ);
DiffPoly swap_qr(const DiffPoly &p);

// Total t-derivative along `flow`: d_t q^(k) = d_x^k(q_t); atoms differentiate under the integral.
DiffPoly prolong_t(const DiffPoly &p, const FlowPair &flow, Integrator &integ);
DiffPoly prolong_t(const DiffPoly &p, const FlowPair &flow);

// q^(k) -> lam*u^(k), leaving the scale constant symbolic.
DiffPoly scale_jets(const DiffPoly &p);
// Replaces lam^(2k) by lambda_sq^k; throws OddScaleResidue on an odd exponent.
DiffPoly collapse_scale(const DiffPoly &p, const Rational &lambda_sq);
// Models q = lam*u on a flow: substitutes, divides by one overall lam, collapses lam^2.
DiffPoly scale_substitute(const DiffPoly &p, const Rational &lambda_sq);

std::string rational_latex(const Rational &c);

} // namespace ckp

#endif

#ifndef CKP_NONLOCAL_HPP
#define CKP_NONLOCAL_HPP

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <ckp/diffring.hpp>
#include <ckp/integrate.hpp>
#include <ckp/psido.hpp>

namespace ckp {

struct Mul {
    DiffPoly f;
    friend bool operator==(const Mul &, const Mul &) = default;
};
struct Dx {
    friend bool operator==(const Dx &, const Dx &) = default;
};
struct DxInv {
    friend bool operator==(const DxInv &, const DxInv &) = default;
};

using Factor = std::variant<Mul, Dx, DxInv>;

// A product of factors written left to right and applied right to left.
// Adjacent multipliers are merged and unit multipliers dropped; d d^-1 and
// d^-1 d are kept as written.
class IntDiffTerm {
public:
    IntDiffTerm() = default;
    explicit IntDiffTerm(std::vector<Factor> chain);

    const std::vector<Factor> &chain() const { return chain_; }
    bool is_identity() const { return chain_.empty(); }

    // Moves the leading coefficient of every multiplier out of the chain.
    // Returns the product of the extracted coefficients (zero if a payload vanished).
    Rational normalize();

    std::string to_string() const;
    std::string to_latex() const;
    nlohmann::json to_json() const;

    friend bool operator==(const IntDiffTerm &, const IntDiffTerm &) = default;

private:
    std::vector<Factor> chain_;
};

// Weighted sum of chains; identical chains are merged, first-seen order is kept.
class IntDiffOperator {
public:
    using Entry = std::pair<Rational, IntDiffTerm>;

    IntDiffOperator() = default;
    IntDiffOperator(std::initializer_list<Entry> entries);

    static IntDiffOperator identity();
    static IntDiffOperator multiplier(const DiffPoly &f);
    static IntDiffOperator d(int k = 1);
    // Chain tokens separated by spaces, terms by standalone + or -: "d^2 + 8*q^2 + 8 q' d^-1 q".
    static IntDiffOperator parse(std::string_view text);
    static IntDiffOperator from_json(const nlohmann::json &j);

    const std::vector<Entry> &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const Rational &weight, IntDiffTerm term);

    IntDiffOperator &operator+=(const IntDiffOperator &o);
    IntDiffOperator &operator-=(const IntDiffOperator &o);
    friend IntDiffOperator operator+(IntDiffOperator a, const IntDiffOperator &b) { return a += b; }
    friend IntDiffOperator operator-(IntDiffOperator a, const IntDiffOperator &b) { return a -= b; }
    friend IntDiffOperator operator*(const Rational &c, IntDiffOperator a);
    // Chain concatenation.
    friend IntDiffOperator operator*(const IntDiffOperator &a, const IntDiffOperator &b);
    // Same weighted chains irrespective of order.
    friend bool operator==(const IntDiffOperator &a, const IntDiffOperator &b);

    std::string to_string() const;
    std::string to_latex() const;
    nlohmann::json to_json() const;

private:
    std::vector<Entry> terms_;
};

std::ostream &operator<<(std::ostream &os, const IntDiffOperator &op);

// Evaluates every chain on f; d^-1 is the Integrator's antiderivative.
DiffPoly apply(const IntDiffOperator &op, const DiffPoly &f, Integrator &integ);
DiffPoly apply(const IntDiffOperator &op, const DiffPoly &f);

// Series form, trusted to the requested depth.
PsiDO expand_to_psido(const IntDiffOperator &op, int depth);

IntDiffOperator map_payloads(const IntDiffOperator &op, const std::function<DiffPoly(const DiffPoly &)> &fn);
IntDiffOperator substitute_r_to_q(const IntDiffOperator &op, Integrator &integ);
IntDiffOperator swap_qr(const IntDiffOperator &op, Integrator &integ);
// q -> lam*u inside every multiplier, then lam^2 -> lambda_sq per chain.
IntDiffOperator scale_substitute(const IntDiffOperator &op, const Rational &lambda_sq);

// Canonical form sum c_k d^k + sum_g F_g d^-1 g, grouped by right monomial g.
// Two operators are equal iff their normal forms are.
IntDiffOperator normal_form(const IntDiffOperator &op, Integrator &integ);
bool equivalent(const IntDiffOperator &a, const IntDiffOperator &b, Integrator &integ);

} // namespace ckp

#endif

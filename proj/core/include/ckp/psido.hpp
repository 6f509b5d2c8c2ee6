#ifndef CKP_PSIDO_HPP
#define CKP_PSIDO_HPP

#include <climits>
#include <map>
#include <string>
#include <string_view>

#include <ckp/diffring.hpp>

namespace ckp {

// Sum of c_k d^k with coefficients on the left. Orders k >= -depth() are exact;
// anything below is unknown and never stored.
class PsiDO {
public:
    // Depth of an operator whose expansion is complete (no unknown tail).
    static constexpr int kExact = INT_MAX / 4;

    PsiDO() = default;
    // Orders below -depth are dropped. Negative orders require a finite depth.
    explicit PsiDO(std::map<int, DiffPoly> coeffs, int depth = kExact);

    static PsiDO d(int k = 1, int depth = kExact);
    static PsiDO multiplier(const DiffPoly &f);
    static PsiDO parse(std::string_view text, int depth = kExact);
    static PsiDO from_json(const nlohmann::json &j);

    const std::map<int, DiffPoly> &coeffs() const { return coeffs_; }
    DiffPoly coeff(int k) const;
    int depth() const { return depth_; }
    bool is_exact() const { return depth_ >= kExact; }
    bool is_zero() const { return coeffs_.empty(); }
    // Highest stored order; 0 for the zero operator.
    int top_order() const;
    bool is_differential() const;

    // Forgets everything below order -depth. Raises DepthExhausted if depth exceeds the current one.
    PsiDO truncated(int depth) const;

    PsiDO &operator+=(const PsiDO &o);
    PsiDO &operator-=(const PsiDO &o);
    friend PsiDO operator+(PsiDO a, const PsiDO &b) { return a += b; }
    friend PsiDO operator-(PsiDO a, const PsiDO &b) { return a -= b; }
    friend PsiDO operator-(PsiDO a);
    friend PsiDO operator*(const Rational &c, PsiDO a);
    friend bool operator==(const PsiDO &, const PsiDO &) = default;

    std::string to_string() const;
    std::string to_latex() const;
    nlohmann::json to_json() const;

private:
    void prune();

    std::map<int, DiffPoly> coeffs_;
    int depth_ = kExact;
};

std::ostream &operator<<(std::ostream &os, const PsiDO &a);

// Generalized binomial coefficient k(k-1)...(k-l+1)/l!, valid for negative k.
Rational binomial(int k, int l);

// Leibniz product; depth min(T_A - max(m_B, 0), T_B - max(m_A, 0)).
PsiDO compose(const PsiDO &a, const PsiDO &b);
PsiDO commutator(const PsiDO &a, const PsiDO &b);
// sum (-1)^k d^k o c_k, same depth.
PsiDO adjoint(const PsiDO &a);
PsiDO plus_part(const PsiDO &a);
PsiDO minus_part(const PsiDO &a);
// Coefficient of d^-1; needs depth >= 1.
DiffPoly residue(const PsiDO &a);
// sum c_k d_x^k(f); only for purely differential operators.
DiffPoly apply(const PsiDO &a, const DiffPoly &f);
// Equal on every order both operands trust.
bool agree(const PsiDO &a, const PsiDO &b);

} // namespace ckp

#endif

#ifndef CKP_RECURSION_HPP
#define CKP_RECURSION_HPP

#include <ckp/hierarchy.hpp>
#include <ckp/nonlocal.hpp>
#include <ckp/report.hpp>

namespace ckp {

struct RecursionMatrix {
    IntDiffOperator r11, r12, r21, r22;
};

// L applied to q and r: q' + q I(qr) + r I(q^2) and r' + q I(r^2) + r I(qr).
DiffPoly lax_image(Symbol s);
// L^2 written with d^-1 chains.
IntDiffOperator lax_squared_chains();

RecursionMatrix build_matrix();

// (R11 q_t + R12 r_t, R21 q_t + R22 r_t). Throws ResidualNonlocal unless every atom cancels.
FlowPair step(const RecursionMatrix &rm, const FlowPair &f, Integrator &integ);
FlowPair step(const RecursionMatrix &rm, const FlowPair &f);

// R11 + R12 under r = q, in normal form.
IntDiffOperator reduce_matrix(const RecursionMatrix &rm, Integrator &integ);
IntDiffOperator reduce_matrix();
// d^2 + 8 q^2 + 8 q' d^-1 q.
IntDiffOperator mkdv_operator();
inline const Rational kMkdvLambdaSq{1, 12};
// The reduced operator under q = lam u with lam^2 = 1/12.
IntDiffOperator scaled_mkdv_operator(const IntDiffOperator &reduced);
IntDiffOperator scaled_mkdv_operator();

// (B_n f d^-1 g)_- = B_n(f) d^-1 g and (f d^-1 g B_n)_- = f d^-1 B_n*(g), compared at `depth`.
CheckReport verify_projection_identities(int n, const DiffPoly &f, const DiffPoly &g, int depth = 4);
// (f1 d^-1 g1)(f2 d^-1 g2) = f1 I(g1 f2) d^-1 g2 - f1 d^-1 g2 I(f2 g1), compared at `depth`.
CheckReport verify_product_identity(const DiffPoly &f1, const DiffPoly &g1, const DiffPoly &f2, const DiffPoly &g2,
                                    int depth = 4);

// f d^-1 g as a series to the given depth.
PsiDO integral_term(const DiffPoly &f, const DiffPoly &g, int depth);

} // namespace ckp

#endif

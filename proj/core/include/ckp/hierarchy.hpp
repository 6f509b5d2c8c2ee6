#ifndef CKP_HIERARCHY_HPP
#define CKP_HIERARCHY_HPP

#include <ckp/diffring.hpp>
#include <ckp/psido.hpp>
#include <ckp/report.hpp>

namespace ckp {

// L = d + q d^-1 r + r d^-1 q, expanded to the given depth.
PsiDO lax_operator(int depth);
// L^n by repeated left multiplication with L built at `depth`; trusted to depth - (n - 1).
PsiDO lax_power(int n, int depth);
// Default working depth n + 3.
int default_bn_depth(int n);
// (L^n)_+ for odd n.
PsiDO bn(int n, int depth);
PsiDO bn(int n);
// (B_n(q), B_n(r)).
FlowPair flow(int n);
FlowPair flow(const PsiDO &b, int n);

// Per-order residuals of A* + A.
CheckReport skew_residuals(const PsiDO &a);
CheckReport check_skew(int depth);
// L_t = [B_n, L], compared on orders >= -compare_depth.
CheckReport check_lax(int n, int compare_depth = 2);
// Right-form coefficients of (L^m)_-: d_x(a1) = 2 (qr)_t and a2 = (qr)_t.
CheckReport check_residue_coefficients(int m, int depth);
CheckReport check_residue_coefficients(int m);

// First two right coefficients a1, a2 of A = d^-1 a1 + d^-2 a2 + ...
std::pair<DiffPoly, DiffPoly> right_coefficients(const PsiDO &a);

} // namespace ckp

#endif

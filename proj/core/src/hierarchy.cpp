#include <ckp/hierarchy.hpp>

#include <stdexcept>

#include <ckp/errors.hpp>

namespace ckp {

namespace {

void require_odd(int n) {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("flow index must be odd and positive, got " + std::to_string(n));
}

const DiffPoly &q() {
    static const DiffPoly v = DiffPoly::jet(Symbol::q);
    return v;
}

const DiffPoly &r() {
    static const DiffPoly v = DiffPoly::jet(Symbol::r);
    return v;
}

} // namespace

PsiDO lax_operator(int depth) {
    if (depth < 1) throw DepthExhausted("the Lax operator needs depth >= 1");
    const PsiDO inv = PsiDO::d(-1, depth);
    const PsiDO q_tail = compose(PsiDO::multiplier(q()), compose(inv, PsiDO::multiplier(r())));
    const PsiDO r_tail = compose(PsiDO::multiplier(r()), compose(inv, PsiDO::multiplier(q())));
    return PsiDO::d(1) + q_tail + r_tail;
}

PsiDO lax_power(int n, int depth) {
    if (n < 1) throw std::invalid_argument("lax_power needs n >= 1");
    if (depth - (n - 1) < 0)
        throw DepthExhausted("L^" + std::to_string(n) + " needs depth >= " + std::to_string(n - 1) + ", got " +
                             std::to_string(depth));
    const PsiDO l = lax_operator(depth);
    PsiDO power = l;
    for (int i = 1; i < n; ++i) power = compose(l, power);
    return power;
}

int default_bn_depth(int n) { return n + 3; }

PsiDO bn(int n, int depth) {
    require_odd(n);
    return plus_part(lax_power(n, depth));
}

PsiDO bn(int n) { return bn(n, default_bn_depth(n)); }

FlowPair flow(const PsiDO &b, int n) { return FlowPair{n, apply(b, q()), apply(b, r())}; }

FlowPair flow(int n) { return flow(bn(n), n); }

CheckReport skew_residuals(const PsiDO &a) {
    CheckReport rep;
    rep.name = "skew";
    const PsiDO sum = adjoint(a) + a;
    const int lowest = a.is_exact() ? 0 : -a.depth();
    for (int k = std::max(a.top_order(), 0); k >= lowest; --k) rep.residual("order " + std::to_string(k), sum.coeff(k));
    return rep;
}

CheckReport check_skew(int depth) {
    CheckReport rep = skew_residuals(lax_operator(depth));
    rep.name = "skew L* + L at depth " + std::to_string(depth);
    return rep;
}

CheckReport check_lax(int n, int compare_depth) {
    require_odd(n);
    const int depth = n + compare_depth;
    const PsiDO l = lax_operator(depth);
    const PsiDO b = bn(n);
    const FlowPair f = flow(b, n);
    std::map<int, DiffPoly> lt;
    for (const auto &[k, c] : l.coeffs()) lt.emplace(k, prolong_t(c, f));
    const PsiDO lhs(std::move(lt), l.depth());
    const PsiDO rhs = commutator(b, l);

    CheckReport rep;
    rep.name = "Lax equation L_t" + std::to_string(n) + " = [B" + std::to_string(n) + ", L]";
    for (int k = std::max(lhs.top_order(), rhs.top_order()); k >= -compare_depth; --k)
        rep.residual("order " + std::to_string(k), lhs.coeff(k) - rhs.coeff(k));
    return rep;
}

std::pair<DiffPoly, DiffPoly> right_coefficients(const PsiDO &a) {
    if (a.depth() < 2) throw DepthExhausted("right-form coefficients need depth >= 2");
    DiffPoly a1 = a.coeff(-1);
    DiffPoly a2 = a.coeff(-2) + d_x(a1);
    return {std::move(a1), std::move(a2)};
}

CheckReport check_residue_coefficients(int m, int depth) {
    require_odd(m);
    if (depth - (m - 1) < 2)
        throw DepthExhausted("residue coefficients of L^" + std::to_string(m) + " need depth >= " + std::to_string(m + 1));
    const PsiDO a = minus_part(lax_power(m, depth));
    const auto [a1, a2] = right_coefficients(a);
    const DiffPoly qr_t = prolong_t(q() * r(), flow(m));

    CheckReport rep;
    rep.name = "residue coefficients of L^" + std::to_string(m);
    rep.residual("d_x(a1) - 2 (qr)_t", d_x(a1) - Rational(2) * qr_t);
    rep.residual("a2 - (qr)_t", a2 - qr_t);
    rep.residual("d_x(res L^m) - 2 (qr)_t", d_x(residue(a)) - Rational(2) * qr_t);
    return rep;
}

CheckReport check_residue_coefficients(int m) { return check_residue_coefficients(m, m + 3); }

} // namespace ckp

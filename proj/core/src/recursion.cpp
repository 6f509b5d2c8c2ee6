#include <ckp/recursion.hpp>

#include <ckp/errors.hpp>

namespace ckp {

namespace {

const char *const kLaxQ = "(q' + q*I(q*r) + r*I(q^2))";
const char *const kLaxR = "(r' + q*I(r^2) + r*I(q*r))";
const char *const kLaxStarQ = "(-q' - q*I(q*r) - r*I(q^2))";
const char *const kLaxStarR = "(-r' - q*I(r^2) - r*I(q*r))";

IntDiffOperator parse_op(const std::string &text) { return IntDiffOperator::parse(text); }

} // namespace

DiffPoly lax_image(Symbol s) {
    if (s == Symbol::u) throw std::invalid_argument("L acts on q and r only");
    return DiffPoly::parse(s == Symbol::q ? kLaxQ : kLaxR);
}

IntDiffOperator lax_squared_chains() {
    return parse_op(std::string("d^2 + 4*q*r + q d^-1 ") + kLaxStarR + " + r d^-1 " + kLaxStarQ + " + " + kLaxQ +
                    " d^-1 r + " + kLaxR + " d^-1 q");
}

RecursionMatrix build_matrix() {
    const IntDiffOperator l2 = lax_squared_chains();
    RecursionMatrix rm;
    rm.r11 = l2 + parse_op(std::string("3*q*r + ") + kLaxR +
                           " d^-1 q + 2*q' d^-1 r - q d^-1 q*r d^-1 r - r d^-1 q d - r d^-1 q^2 d^-1 r"
                           " - 2 r d^-1 r*q d^-1 q - r d^-1 q*I(r*q) - q d^-1 q*I(r^2)");
    rm.r12 = parse_op(std::string("2*q' d^-1 q + 3*q^2 - 2 q d^-1 q^2 d^-1 r - q d^-1 q d - q d^-1 q*r d^-1 q"
                                  " - r d^-1 q^2 d^-1 q - q d^-1 q*I(r*q) - r d^-1 q*I(q^2) + ") +
                      kLaxQ + " d^-1 q");
    rm.r21 = parse_op(std::string("2*r' d^-1 r + 3*r^2 - 2 r d^-1 r^2 d^-1 q - r d^-1 r d - r d^-1 q*r d^-1 r"
                                  " - q d^-1 r^2 d^-1 r - r d^-1 r*I(r*q) - q d^-1 r*I(r^2) + ") +
                      kLaxR + " d^-1 r");
    rm.r22 = l2 + parse_op(std::string("3*q*r + ") + kLaxQ +
                           " d^-1 r + 2*r' d^-1 q - r d^-1 q*r d^-1 q - q d^-1 r d - q d^-1 r^2 d^-1 q"
                           " - 2 q d^-1 q*r d^-1 r - q d^-1 r*I(r*q) - r d^-1 r*I(q^2)");
    return rm;
}

FlowPair step(const RecursionMatrix &rm, const FlowPair &f, Integrator &integ) {
    FlowPair out;
    out.m = f.m + 2;
    out.q_t = apply(rm.r11, f.q_t, integ) + apply(rm.r12, f.r_t, integ);
    out.r_t = apply(rm.r21, f.q_t, integ) + apply(rm.r22, f.r_t, integ);
    if (!out.q_t.is_local() || !out.r_t.is_local())
        throw ResidualNonlocal("recursion step from t" + std::to_string(f.m) +
                               " left antiderivative atoms: q_t = " + out.q_t.to_string() +
                               ", r_t = " + out.r_t.to_string());
    return out;
}

FlowPair step(const RecursionMatrix &rm, const FlowPair &f) {
    Integrator integ;
    return step(rm, f, integ);
}

IntDiffOperator reduce_matrix(const RecursionMatrix &rm, Integrator &integ) {
    const IntDiffOperator row = substitute_r_to_q(rm.r11, integ) + substitute_r_to_q(rm.r12, integ);
    IntDiffOperator nf = normal_form(row, integ);
    for (const auto &[w, t] : nf.terms())
        for (const Factor &f : t.chain())
            if (const Mul *m = std::get_if<Mul>(&f); m && !m->f.is_local())
                throw ResidualNonlocal("reduced operator keeps antiderivative atoms: " + nf.to_string());
    return nf;
}

IntDiffOperator reduce_matrix() {
    Integrator integ;
    return reduce_matrix(build_matrix(), integ);
}

IntDiffOperator mkdv_operator() { return parse_op("d^2 + 8*q^2 + 8*q' d^-1 q"); }

IntDiffOperator scaled_mkdv_operator(const IntDiffOperator &reduced) {
    return scale_substitute(reduced, kMkdvLambdaSq);
}

IntDiffOperator scaled_mkdv_operator() { return scaled_mkdv_operator(reduce_matrix()); }

PsiDO integral_term(const DiffPoly &f, const DiffPoly &g, int depth) {
    return compose(PsiDO::multiplier(f), compose(PsiDO::d(-1, depth), PsiDO::multiplier(g)));
}

CheckReport verify_projection_identities(int n, const DiffPoly &f, const DiffPoly &g, int depth) {
    const PsiDO b = bn(n);
    const PsiDO fg = integral_term(f, g, depth + n);

    CheckReport rep;
    rep.name = "operator identities n=" + std::to_string(n) + " f=" + f.to_string() + " g=" + g.to_string();

    const PsiDO left1 = minus_part(compose(b, fg)).truncated(depth);
    const PsiDO right1 = integral_term(apply(b, f), g, depth);
    const PsiDO left2 = minus_part(compose(fg, b)).truncated(depth);
    const PsiDO right2 = integral_term(f, apply(adjoint(b), g), depth);
    for (int k = -1; k >= -depth; --k) {
        rep.residual("(B f d^-1 g)_- order " + std::to_string(k), left1.coeff(k) - right1.coeff(k));
        rep.residual("(f d^-1 g B)_- order " + std::to_string(k), left2.coeff(k) - right2.coeff(k));
    }
    return rep;
}

CheckReport verify_product_identity(const DiffPoly &f1, const DiffPoly &g1, const DiffPoly &f2, const DiffPoly &g2,
                                    int depth) {
    Integrator integ;
    const PsiDO left = compose(integral_term(f1, g1, depth), integral_term(f2, g2, depth));
    const PsiDO right = integral_term(f1 * integ.antiderivative(g1 * f2), g2, depth) -
                        integral_term(f1, g2 * integ.antiderivative(f2 * g1), depth);
    CheckReport rep;
    rep.name = "product identity f1=" + f1.to_string() + " g1=" + g1.to_string() + " f2=" + f2.to_string() +
               " g2=" + g2.to_string();
    for (int k = -1; k >= -depth; --k) rep.residual("order " + std::to_string(k), left.coeff(k) - right.coeff(k));
    rep.require(left.coeffs().empty() || left.top_order() < 0, "left side is purely integral");
    return rep;
}

} // namespace ckp

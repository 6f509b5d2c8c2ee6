#include <doctest.h>

#include <ckp/errors.hpp>
#include <ckp/hierarchy.hpp>
#include <ckp/recursion.hpp>

#include "support.hpp"

using namespace ckp;
using ckp::testing::P;

namespace {
IntDiffOperator O(const char *s) { return IntDiffOperator::parse(s); }

bool contains(const IntDiffOperator &op, const Rational &w, const IntDiffTerm &t) {
    for (const auto &[weight, term] : op.terms())
        if (weight == w && term == t) return true;
    return false;
}
} // namespace

TEST_CASE("matrix entries") {
    const RecursionMatrix rm = build_matrix();
    CHECK(contains(rm.r11, -1, IntDiffTerm({Mul{P("r")}, DxInv{}, Mul{P("q")}, Dx{}})));
    CHECK(contains(rm.r12, 3, IntDiffTerm({Mul{P("q^2")}})));
    Integrator integ;
    CHECK(swap_qr(rm.r11, integ) == rm.r22);
    CHECK(swap_qr(rm.r12, integ) == rm.r21);
    CHECK(swap_qr(rm.r21, integ) == rm.r12);
}

TEST_CASE("squared Lax chains match the series") {
    const PsiDO l = lax_operator(8);
    CHECK(agree(expand_to_psido(lax_squared_chains(), 6), compose(l, l)));
}

TEST_CASE("Lax images") {
    Integrator integ;
    const DiffPoly want = P("q'") + P("q") * integ.antiderivative(P("r*q")) + P("r") * integ.antiderivative(P("q^2"));
    CHECK(lax_image(Symbol::q) == want);
}

TEST_CASE("recursion steps") {
    const RecursionMatrix rm = build_matrix();
    Integrator integ;
    CHECK(step(rm, flow(1), integ) == flow(3));
    CHECK(step(rm, flow(3), integ) == flow(5));
    CHECK(step(rm, flow(5), integ) == flow(7));
    CHECK(step(rm, step(rm, flow(1), integ), integ) == flow(5));
}

TEST_CASE("nonlocal residue is reported") {
    const RecursionMatrix rm = build_matrix();
    Integrator integ;
    // (q, 0) is not a flow; atoms survive.
    CHECK_THROWS_AS(step(rm, FlowPair{1, P("q"), DiffPoly()}, integ), ResidualNonlocal);
}

TEST_CASE("reduction to the mKdV operator") {
    Integrator integ;
    const IntDiffOperator reduced = reduce_matrix(build_matrix(), integ);
    CHECK(reduced == mkdv_operator());
    CHECK(reduced == O("d^2 + 8*q^2 + 8*q' d^-1 q"));
    CHECK(expand_to_psido(reduced, 6) == expand_to_psido(O("d^2 + 8*q^2 + 8*q' d^-1 q"), 6));
    const DiffPoly t3 = apply(reduced, P("q'"), integ);
    CHECK(t3 == P("q[3] + 12*q^2*q'"));
    CHECK(apply(reduced, t3, integ) == P("q[5] + 20*q^2*q[3] + 80*q*q'*q'' + 120*q^4*q' + 20*q'^3"));
    CHECK(t3 == substitute_r_to_q(flow(3).q_t));
}

TEST_CASE("reduced operator agrees with the substituted matrix as a series") {
    Integrator integ;
    const RecursionMatrix rm = build_matrix();
    const IntDiffOperator row = substitute_r_to_q(rm.r11 + rm.r12, integ);
    CHECK(expand_to_psido(row, 4) == expand_to_psido(mkdv_operator(), 4));
}

TEST_CASE("scaled operator") {
    CHECK(scaled_mkdv_operator() == O("d^2 + 2/3*u^2 + 2/3*u' d^-1 u"));
    CHECK(kMkdvLambdaSq == Rational(1, 12));
}

TEST_CASE("projection identities") {
    const std::vector<DiffPoly> inputs{P("q"), P("r"), P("q*r"), P("q'")};
    for (int n : {1, 3, 5})
        for (const auto &f : inputs)
            for (const auto &g : inputs) CHECK(verify_projection_identities(n, f, g).passed);
    CHECK(verify_product_identity(P("q"), P("r"), P("r"), P("q")).passed);
    const PsiDO lhs = minus_part(compose(bn(3), integral_term(P("q"), P("r"), 7))).truncated(4);
    CHECK(lhs == integral_term(apply(bn(3), P("q")), P("r"), 4));
}

// Acceptance suite: one line per criterion, exact equality throughout.

#include <chrono>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <ckp/errors.hpp>
#include <ckp/recursion.hpp>

#include "properties.hpp"
#include "support.hpp"

using namespace ckp;
using ckp::testing::P;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string &what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

const char *const kQt3 = "q[3] + 9*q*r*q' + 3*q^2*r'";
const char *const kRt3 = "r[3] + 9*q*r*r' + 3*r^2*q'";
const char *const kQt5 = "q[5] + 15*q*r*q[3] + 30*r*q'*q'' + 25*q*r'*q'' + 25*q*q'*r''"
                         " + 80*q^2*r^2*q' + 20*q'*r'*q' + 40*r*q^3*r' + 5*q^2*r[3]";
const char *const kRt5 = "r[5] + 15*q*r*r[3] + 30*q*r'*r'' + 25*r*q'*r'' + 25*r*r'*q''"
                         " + 80*q^2*r^2*r' + 20*q'*r'*r' + 40*q*r^3*q' + 5*r^2*q[3]";
const char *const kMkdv3 = "q[3] + 12*q^2*q'";
const char *const kMkdv5 = "q[5] + 20*q^2*q[3] + 80*q*q'*q'' + 120*q^4*q' + 20*q'^3";

FlowPair literal_flow(int m, const char *q_t, const char *r_t) { return FlowPair{m, P(q_t), P(r_t)}; }

Outcome c1_b3() {
    Outcome o;
    const PsiDO want = PsiDO::parse("d^3 + 6*q*r*d + 3*r*q' + 3*q*r'");
    o.expect(bn(3) == want, "bn(3) = " + bn(3).to_string());
    return o;
}

Outcome c2_b5() {
    Outcome o;
    const PsiDO want = PsiDO::parse("d^5 + 10*q*r*d^3 + (15*r*q' + 15*q*r')*d^2"
                                    " + (15*q*r'' + 15*r*q'' + 40*q^2*r^2 + 20*q'*r')*d"
                                    " + 40*q*r^2*q' + 40*r*q^2*r' + 5*q*r[3] + 5*r*q[3] + 10*q'*r'' + 10*r'*q''");
    const PsiDO got = bn(5);
    o.expect(got == want, "bn(5) = " + got.to_string());
    std::size_t terms = 0;
    for (const auto &[k, c] : got.coeffs()) terms += c.size();
    o.expect(terms == 14, "expected 14 monomials, got " + std::to_string(terms));
    return o;
}

Outcome c3_flows() {
    Outcome o;
    o.expect(flow(3) == literal_flow(3, kQt3, kRt3), "flow(3) differs");
    o.expect(flow(5) == literal_flow(5, kQt5, kRt5), "flow(5) differs");
    o.expect(flow(1) == literal_flow(1, "q'", "r'"), "flow(1) differs");
    return o;
}

Outcome c4_skew() {
    Outcome o;
    const PsiDO l = lax_operator(8);
    const PsiDO sum = adjoint(l) + l;
    for (int k = 1; k >= -8; --k) o.expect(sum.coeff(k).is_zero(), "order " + std::to_string(k) + " nonzero");
    o.expect(adjoint(l) == -l, "L* != -L");
    o.expect(check_skew(8).passed, "check_skew(8) failed");
    return o;
}

Outcome c5_lax() {
    Outcome o;
    for (int n : {3, 5}) {
        const CheckReport rep = check_lax(n, 2);
        o.expect(rep.passed, rep.to_text());
        o.expect(rep.residuals.size() >= 2, "orders -1 and -2 not compared for n = " + std::to_string(n));
    }
    return o;
}

Outcome c6_step() {
    Outcome o;
    const RecursionMatrix rm = build_matrix();
    Integrator integ;
    try {
        o.expect(step(rm, flow(1), integ) == literal_flow(3, kQt3, kRt3), "step(flow(1)) != t3 flow");
        o.expect(step(rm, literal_flow(3, kQt3, kRt3), integ) == literal_flow(5, kQt5, kRt5),
                 "step(flow(3)) != t5 flow");
    } catch (const ResidualNonlocal &e) {
        o.expect(false, e.what());
    }
    return o;
}

Outcome c7_two_step() {
    Outcome o;
    const RecursionMatrix rm = build_matrix();
    Integrator integ;
    try {
        const FlowPair two = step(rm, step(rm, literal_flow(1, "q'", "r'"), integ), integ);
        o.expect(two == literal_flow(5, kQt5, kRt5), "step(step(flow(1))) != t5 flow");
        const FlowPair seven = step(rm, literal_flow(5, kQt5, kRt5), integ);
        const PsiDO b7 = bn(7);
        const FlowPair direct{7, apply(b7, P("q")), apply(b7, P("r"))};
        o.expect(seven == direct, "step(flow(5)) != B7 applied to (q, r)");
        o.expect(seven.q_t.is_local() && !seven.q_t.is_zero(), "t7 flow empty or nonlocal");
    } catch (const ResidualNonlocal &e) {
        o.expect(false, e.what());
    }
    return o;
}

Outcome c8_identities() {
    Outcome o;
    const std::vector<DiffPoly> inputs{P("q"), P("r"), P("q*r"), P("q'")};
    for (int n : {1, 3, 5})
        for (const auto &f : inputs)
            for (const auto &g : inputs) {
                const CheckReport rep = verify_projection_identities(n, f, g, 4);
                o.expect(rep.passed, rep.name);
            }
    for (const auto &f1 : inputs)
        for (const auto &g1 : inputs)
            for (const auto &f2 : inputs)
                for (const auto &g2 : inputs) {
                    const CheckReport rep = verify_product_identity(f1, g1, f2, g2, 4);
                    o.expect(rep.passed, rep.name);
                }
    // Single Leibniz step, read off directly.
    const PsiDO lhs = minus_part(compose(PsiDO::d(1), integral_term(P("q"), P("r"), 5))).truncated(4);
    o.expect(lhs == integral_term(P("q'"), P("r"), 4), "(d q d^-1 r)_- != q' d^-1 r");
    return o;
}

Outcome c9_residues() {
    Outcome o;
    for (int m : {1, 3, 5}) {
        const CheckReport rep = check_residue_coefficients(m, m + 3);
        o.expect(rep.passed, rep.to_text());
    }
    const auto [a1, a2] = right_coefficients(minus_part(lax_operator(4)));
    o.expect(a1 == P("2*q*r"), "a1 for m = 1 is " + a1.to_string());
    o.expect(a2 == P("q'*r + q*r'"), "a2 for m = 1 is " + a2.to_string());
    return o;
}

Outcome c10_reduction() {
    Outcome o;
    Integrator integ;
    IntDiffOperator reduced;
    try {
        reduced = reduce_matrix(build_matrix(), integ);
    } catch (const ResidualNonlocal &e) {
        o.expect(false, e.what());
        return o;
    }
    const DiffPoly t3 = apply(reduced, P("q'"), integ);
    o.expect(t3 == P(kMkdv3), "R_r(q') = " + t3.to_string());
    const DiffPoly t5 = apply(reduced, t3, integ);
    o.expect(t5 == P(kMkdv5), "R_r(R_r(q')) = " + t5.to_string());
    const IntDiffOperator literal = IntDiffOperator::parse("d^2 + 8*q^2 + 8*q' d^-1 q");
    o.expect(expand_to_psido(reduced, 6) == expand_to_psido(literal, 6), "series to depth 6 differ");
    o.expect(reduced == literal, "normal form is " + reduced.to_string());
    o.expect(substitute_r_to_q(P(kQt3), integ) == P(kMkdv3), "t3 flow at r = q");
    o.expect(substitute_r_to_q(P(kQt5), integ) == P(kMkdv5), "t5 flow at r = q");
    return o;
}

Outcome c11_scaling() {
    Outcome o;
    const Rational lsq(1, 12);
    o.expect(scale_substitute(P(kMkdv3), lsq) == P("u[3] + u^2*u'"), "scaled t3");
    o.expect(scale_substitute(P(kMkdv5), lsq) ==
                 P("u[5] + 5/3*u^2*u[3] + 20/3*u*u'*u'' + 5/6*u^4*u' + 5/3*u'^3"),
             "scaled t5");
    const IntDiffOperator scaled = scaled_mkdv_operator();
    o.expect(scaled == IntDiffOperator::parse("d^2 + 2/3*u^2 + 2/3*u' d^-1 u"), "scaled operator " + scaled.to_string());
    return o;
}

Outcome c12_properties() {
    Outcome o;
    for (const auto &r : ckp::testing::acceptance_properties())
        o.expect(r.ok(), r.name + " (" + std::to_string(r.instances) + " instances, " + std::to_string(r.failures) +
                             " failures) " + r.first_failure);
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C1  B3 equals d^3 + 6qr d + 3rq' + 3qr'", c1_b3},
        {"C2  B5 equals the fifth-order operator", c2_b5},
        {"C3  t3 and t5 flows", c3_flows},
        {"C4  L* + L = 0 to depth 8", c4_skew},
        {"C5  Lax equations for n = 3, 5 at comparison depth 2", c5_lax},
        {"C6  recursion steps t1 -> t3 and t3 -> t5", c6_step},
        {"C7  two steps t1 -> t5 and t5 -> t7 against B7", c7_two_step},
        {"C8  projection and product identities at depth 4", c8_identities},
        {"C9  right-form residue coefficients for m = 1, 3, 5", c9_residues},
        {"C10 reduction to d^2 + 8q^2 + 8q' d^-1 q and mKdV flows", c10_reduction},
        {"C11 scaling with lam^2 = 1/12", c11_scaling},
        {"C12 property suites, 200 seeded instances each", c12_properties},
    };
    int failed = 0;
    for (const auto &[name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception &e) {
            o.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.ok ? "PASS " : "FAIL ") << name << "  (" << secs << " s)";
        if (!o.ok) std::cout << "\n     " << o.detail;
        std::cout << "\n";
        failed += o.ok ? 0 : 1;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " acceptance criteria passed\n";
    return failed == 0 ? 0 : 1;
}

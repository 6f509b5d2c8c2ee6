#ifndef CKP_TESTS_PROPERTIES_HPP
#define CKP_TESTS_PROPERTIES_HPP

// Randomized law checks shared by the property tests and the acceptance binary.

#include <functional>
#include <string>

#include <ckp/hierarchy.hpp>
#include <ckp/nonlocal.hpp>

#include "support.hpp"

namespace ckp::testing {

struct PropertyResult {
    std::string name;
    int instances = 0;
    int failures = 0;
    std::string first_failure;

    bool ok() const { return failures == 0 && instances >= kInstances; }
};

inline PropertyResult run_property(const std::string &name, const std::function<std::string(Gen &)> &body,
                                   std::uint64_t salt, int instances = kInstances) {
    PropertyResult res{name};
    Gen gen(kSeed ^ salt);
    for (int i = 0; i < instances; ++i) {
        ++res.instances;
        std::string why;
        try {
            why = body(gen);
        } catch (const std::exception &e) {
            why = std::string("exception: ") + e.what();
        }
        if (!why.empty()) {
            if (res.failures++ == 0) res.first_failure = "instance " + std::to_string(i) + ": " + why;
        }
    }
    return res;
}

inline PropertyResult ring_axioms() {
    return run_property(
        "ring axioms",
        [](Gen &g) -> std::string {
            const DiffPoly a = g.poly(4, 3, true), b = g.poly(4, 3, true), c = g.poly(4, 3, true);
            if ((a + b) + c != a + (b + c)) return "additive associativity";
            if (a + b != b + a) return "additive commutativity";
            if ((a * b) * c != a * (b * c)) return "multiplicative associativity";
            if (a * b != b * a) return "multiplicative commutativity";
            if (a * (b + c) != a * b + a * c) return "distributivity";
            if (a - a != DiffPoly()) return "additive inverse";
            if (a * DiffPoly(Rational(1)) != a) return "multiplicative identity";
            return {};
        },
        1);
}

inline PropertyResult derivation_law() {
    return run_property(
        "derivation law",
        [](Gen &g) -> std::string {
            const DiffPoly a = g.poly(4, 3, true), b = g.poly(4, 3, true);
            if (d_x(a * b) != d_x(a) * b + a * d_x(b)) return "Leibniz rule: a = " + a.to_string();
            if (d_x(a + b) != d_x(a) + d_x(b)) return "additivity";
            return {};
        },
        2);
}

inline PropertyResult integration_round_trip() {
    return run_property(
        "integration round trip",
        [](Gen &g) -> std::string {
            Integrator integ;
            const DiffPoly p = g.poly(3, 3, true);
            const Antiderivative a = integ.integrate(p);
            if (d_x(a.integral) + a.remainder != p) return "p = d_x(F) + rho fails for " + p.to_string();
            const Antiderivative again = integ.integrate(a.remainder);
            if (!again.integral.is_zero() || again.remainder != a.remainder)
                return "remainder not reduced for " + p.to_string();
            // Exactness: integrating a total derivative returns the primitive up to its constant term.
            const DiffPoly f = g.poly(3, 3, false);
            const Antiderivative e = integ.integrate(d_x(f));
            if (!e.remainder.is_zero() || e.integral != f - DiffPoly(f.coeff(Monomial())))
                return "exactness fails for " + f.to_string();
            if (d_x(integ.antiderivative(p)) != p) return "antiderivative fails for " + p.to_string();
            return {};
        },
        3);
}

inline PropertyResult serialization_round_trip() {
    return run_property(
        "serialization round trip",
        [](Gen &g) -> std::string {
            const DiffPoly p = g.poly(4, 3, true);
            if (DiffPoly::parse(p.to_string()) != p) return "text: " + p.to_string();
            if (DiffPoly::from_json(p.to_json()) != p) return "json: " + p.to_string();
            const PsiDO a = g.psido(2, -2, 3);
            if (PsiDO::parse(a.to_string(), a.depth()) != a) return "psido text: " + a.to_string();
            if (PsiDO::from_json(a.to_json()) != a) return "psido json: " + a.to_string();
            IntDiffOperator op;
            op.add(g.coefficient(), IntDiffTerm({Mul{g.poly(2, 2, true)}, DxInv{}, Mul{g.poly(2, 2)}, Dx{}}));
            op.add(g.coefficient(), IntDiffTerm({Mul{g.poly(2, 2)}, Dx{}, Dx{}}));
            if (IntDiffOperator::parse(op.to_string()) != op) return "operator text: " + op.to_string();
            if (IntDiffOperator::from_json(op.to_json()) != op) return "operator json: " + op.to_string();
            return {};
        },
        4);
}

inline PropertyResult compose_associativity() {
    return run_property(
        "compose associativity",
        [](Gen &g) -> std::string {
            const PsiDO a = g.psido(1, -2, 6), b = g.psido(1, -2, 6), c = g.psido(1, -2, 6);
            if (!agree(compose(compose(a, b), c), compose(a, compose(b, c)))) return "pseudo-differential triple";
            const PsiDO x = g.psido(2, 0, PsiDO::kExact), y = g.psido(2, 0, PsiDO::kExact),
                        z = g.psido(2, 0, PsiDO::kExact);
            if (compose(compose(x, y), z) != compose(x, compose(y, z))) return "differential triple";
            return {};
        },
        5);
}

inline PropertyResult adjoint_antihomomorphism() {
    return run_property(
        "adjoint antihomomorphism",
        [](Gen &g) -> std::string {
            const PsiDO a = g.psido(2, -3, 5), b = g.psido(2, -3, 5);
            if (!agree(adjoint(compose(a, b)), compose(adjoint(b), adjoint(a)))) return "(AB)* = B* A*";
            if (adjoint(adjoint(a)) != a) return "A** = A";
            return {};
        },
        6);
}

inline std::vector<PropertyResult> acceptance_properties() {
    return {ring_axioms(),           derivation_law(),        integration_round_trip(),
            serialization_round_trip(), compose_associativity(), adjoint_antihomomorphism()};
}

} // namespace ckp::testing

#endif

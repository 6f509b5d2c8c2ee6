#ifndef CKP_INTEGRATE_HPP
#define CKP_INTEGRATE_HPP

#include <map>
#include <vector>

#include <ckp/diffring.hpp>

namespace ckp {

// p = d_x(integral) + remainder, with the remainder in reduced form.
struct Antiderivative {
    DiffPoly integral;
    DiffPoly remainder;
};

// Integration by parts modulo total derivatives.
//
// For a monomial m of atom level l the ring used is generated by the jets and
// every atom of level <= l. Within that ring, monomials linked by d_x form
// finite connected components (d_x preserves polynomial degree and raises
// weight by one). Each component is solved once by exact Gaussian elimination
// of the d_x images of its candidate antiderivatives; pivots are the reducible
// monomials and the rest form the canonical remainder basis. An irreducible
// remainder monomial mu becomes the atom I(mu) of level l + 1.
//
// Results are cached per instance, so an Integrator is not thread-safe; use one
// per thread. Integration constants are always zero.
class Integrator {
public:
    static constexpr int kDefaultNestingLimit = 2;

    explicit Integrator(int nesting_limit = kDefaultNestingLimit);
    ~Integrator();
    Integrator(const Integrator &) = delete;
    Integrator &operator=(const Integrator &) = delete;
    Integrator(Integrator &&) noexcept;
    Integrator &operator=(Integrator &&) noexcept;

    int nesting_limit() const { return nesting_limit_; }

    Antiderivative integrate(const DiffPoly &p);

    // The full d_x^{-1}: integral plus atoms for every remainder monomial.
    // Throws NestingTooDeep if an atom deeper than the nesting limit is needed.
    DiffPoly antiderivative(const DiffPoly &p);

    bool is_reduced(const Monomial &m);

    std::size_t component_count() const { return components_built_; }

private:
    struct Solved {
        DiffPoly integral;
        DiffPoly remainder;
    };

    // Scale-free monomials only.
    const Solved &solve(const Monomial &m);
    void solve_component(const Monomial &seed);
    std::vector<Monomial> lowerings(const Monomial &v, int level);

    int nesting_limit_;
    std::size_t components_built_ = 0;
    std::map<Monomial, Solved> solved_;
};

Antiderivative integrate(const DiffPoly &p);
DiffPoly antiderivative(const DiffPoly &p);

} // namespace ckp

#endif

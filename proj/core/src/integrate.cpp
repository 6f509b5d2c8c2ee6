#include <ckp/integrate.hpp>

#include <algorithm>
#include <deque>
#include <set>

#include <ckp/errors.hpp>

namespace ckp {

namespace {

using SparseRow = std::map<int, Rational, std::greater<int>>;
using Combo = std::map<int, Rational>;

// Elimination key: atoms dominate, then high derivatives. Larger keys are pivoted first.
struct EliminationKey {
    std::vector<NonlocalAtom> atoms;
    std::vector<std::pair<int, Symbol>> jets;

    explicit EliminationKey(const Monomial &m) {
        for (const auto &[a, p] : m.atoms())
            for (int i = 0; i < p; ++i) atoms.push_back(a);
        for (const auto &[v, p] : m.jets())
            for (int i = 0; i < p; ++i) jets.emplace_back(v.order, v.symbol);
        std::sort(atoms.rbegin(), atoms.rend());
        std::sort(jets.rbegin(), jets.rend());
    }

    friend bool operator<(const EliminationKey &a, const EliminationKey &b) {
        if (a.atoms != b.atoms)
            return std::lexicographical_compare(a.atoms.begin(), a.atoms.end(), b.atoms.begin(), b.atoms.end());
        return a.jets < b.jets;
    }
};

template <class Map>
void axpy(Map &target, const Map &source, const Rational &factor) {
    for (const auto &[k, v] : source) {
        auto [it, inserted] = target.try_emplace(k, 0);
        it->second -= factor * v;
        if (it->second == 0) target.erase(it);
    }
}

} // namespace

Integrator::Integrator(int nesting_limit) : nesting_limit_(nesting_limit) {}
Integrator::~Integrator() = default;
Integrator::Integrator(Integrator &&) noexcept = default;
Integrator &Integrator::operator=(Integrator &&) noexcept = default;

std::vector<Monomial> Integrator::lowerings(const Monomial &v, int level) {
    std::vector<Monomial> out;
    for (const auto &[x, p] : v.jets())
        if (x.order >= 1) out.push_back(v.times_jet(x, -1).times_jet(JetVar{x.symbol, x.order - 1}, 1));
    if (level == 0) return out;

    // Every nonempty sub-multiset mu of v that is a reduced monomial of lower level
    // can be traded for the atom I(mu).
    struct Factor {
        bool is_jet;
        std::size_t index;
        int power;
    };
    std::vector<Factor> factors;
    for (std::size_t i = 0; i < v.jets().size(); ++i) factors.push_back({true, i, v.jets()[i].second});
    for (std::size_t i = 0; i < v.atoms().size(); ++i)
        if (v.atoms()[i].first.level() <= level - 1) factors.push_back({false, i, v.atoms()[i].second});

    std::vector<int> take(factors.size(), 0);
    while (true) {
        std::size_t pos = 0;
        while (pos < factors.size() && take[pos] == factors[pos].power) take[pos++] = 0;
        if (pos == factors.size()) break;
        ++take[pos];
        Monomial mu;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            if (take[i] == 0) continue;
            const Factor &f = factors[i];
            mu = mu * (f.is_jet ? Monomial::of(v.jets()[f.index].first, take[i])
                                : Monomial::of(v.atoms()[f.index].first, take[i]));
        }
        if (mu.level() > level - 1 || !is_reduced(mu)) continue;
        out.push_back(*v.divided_by(mu) * Monomial::of(NonlocalAtom::of_reduced(mu)));
    }
    return out;
}

void Integrator::solve_component(const Monomial &seed) {
    const int level = seed.level();
    ++components_built_;

    // Closure: monomials V and candidate antiderivatives C linked through d_x.
    std::set<Monomial> monomials{seed};
    std::set<Monomial> candidate_set;
    std::vector<Monomial> candidates;
    std::vector<DiffPoly> images;
    std::deque<Monomial> work{seed};
    while (!work.empty()) {
        Monomial v = std::move(work.front());
        work.pop_front();
        for (Monomial &c : lowerings(v, level)) {
            if (!candidate_set.insert(c).second) continue;
            DiffPoly image = d_x(c);
            for (const auto &[w, coeff] : image.terms())
                if (monomials.insert(w).second) work.push_back(w);
            candidates.push_back(std::move(c));
            images.push_back(std::move(image));
        }
    }

    std::vector<std::pair<EliminationKey, Monomial>> keyed;
    keyed.reserve(monomials.size());
    for (const auto &m : monomials) keyed.emplace_back(EliminationKey(m), m);
    std::sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    std::map<Monomial, int> rank;
    for (std::size_t i = 0; i < keyed.size(); ++i) rank.emplace(keyed[i].second, static_cast<int>(i));

    struct Pivot {
        SparseRow row;
        Combo combo;
    };
    std::map<int, Pivot> pivots;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        SparseRow row;
        for (const auto &[w, coeff] : images[ci].terms()) row.emplace(rank.at(w), coeff);
        Combo combo{{static_cast<int>(ci), Rational(1)}};
        while (!row.empty()) {
            auto it = pivots.find(row.begin()->first);
            if (it == pivots.end()) break;
            const Rational f = row.begin()->second;
            axpy(row, it->second.row, f);
            axpy(combo, it->second.combo, f);
        }
        if (row.empty()) continue;
        const Rational lead = row.begin()->second;
        if (lead != 1) {
            for (auto &[k, c] : row) c /= lead;
            for (auto &[k, c] : combo) c /= lead;
        }
        const int r = row.begin()->first;
        pivots.emplace(r, Pivot{std::move(row), std::move(combo)});
    }

    // Normal forms are canonical only for monomials of the seed's level.
    for (const auto &[m, r0] : rank) {
        if (m.level() != level || solved_.count(m)) continue;
        SparseRow target{{r0, Rational(1)}};
        Combo combo;
        for (auto it = target.begin(); it != target.end();) {
            auto p = pivots.find(it->first);
            if (p == pivots.end()) {
                ++it;
                continue;
            }
            const int r = it->first;
            const Rational f = it->second;
            axpy(target, p->second.row, f);
            for (const auto &[k, c] : p->second.combo) {
                auto [ci, inserted] = combo.try_emplace(k, 0);
                ci->second += f * c;
                if (ci->second == 0) combo.erase(ci);
            }
            it = target.upper_bound(r);
        }
        Solved s;
        for (const auto &[k, c] : combo) s.integral.add_term(candidates[static_cast<std::size_t>(k)], c);
        for (const auto &[k, c] : target) s.remainder.add_term(keyed[static_cast<std::size_t>(k)].second, c);
        solved_.emplace(m, std::move(s));
    }
}

const Integrator::Solved &Integrator::solve(const Monomial &m) {
    auto it = solved_.find(m);
    if (it != solved_.end()) return it->second;
    if (m.is_one()) return solved_.emplace(m, Solved{DiffPoly(), DiffPoly(m)}).first->second;
    solve_component(m);
    return solved_.at(m);
}

bool Integrator::is_reduced(const Monomial &m) {
    const Monomial base = m.without_scale();
    if (base.is_one()) return false;
    return solve(base).remainder == DiffPoly(base);
}

Antiderivative Integrator::integrate(const DiffPoly &p) {
    Antiderivative out;
    for (const auto &[m, c] : p.terms()) {
        const Solved &s = solve(m.without_scale());
        const DiffPoly factor(Monomial::lambda(m.scale_exponent()), c);
        out.integral += factor * s.integral;
        out.remainder += factor * s.remainder;
    }
    return out;
}

DiffPoly Integrator::antiderivative(const DiffPoly &p) {
    Antiderivative a = integrate(p);
    DiffPoly out = std::move(a.integral);
    for (const auto &[m, c] : a.remainder.terms()) {
        const Monomial base = m.without_scale();
        if (base.level() + 1 > nesting_limit_)
            throw NestingTooDeep("antiderivative of " + to_string(base) + " needs atom nesting depth " +
                                 std::to_string(base.level() + 1) + " > limit " + std::to_string(nesting_limit_));
        out.add_term(Monomial::of(NonlocalAtom::of_reduced(base)) * Monomial::lambda(m.scale_exponent()), c);
    }
    return out;
}

Antiderivative integrate(const DiffPoly &p) {
    Integrator integ;
    return integ.integrate(p);
}

DiffPoly antiderivative(const DiffPoly &p) {
    Integrator integ;
    return integ.antiderivative(p);
}

} // namespace ckp

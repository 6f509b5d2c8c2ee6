#include <ckp/diffring.hpp>

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <ckp/errors.hpp>
#include <ckp/integrate.hpp>

namespace ckp {

char symbol_char(Symbol s) {
    switch (s) {
    case Symbol::q: return 'q';
    case Symbol::r: return 'r';
    case Symbol::u: return 'u';
    }
    return '?';
}

namespace {

std::string jet_string(const JetVar &v) {
    std::string s(1, symbol_char(v.symbol));
    if (v.order == 1) {
        s += "'";
    } else if (v.order == 2) {
        s += "''";
    } else if (v.order >= 3) {
        s += "[" + std::to_string(v.order) + "]";
    }
    return s;
}

std::string jet_latex(const JetVar &v) {
    std::string s(1, symbol_char(v.symbol));
    if (v.order > 0) s += "_{" + std::string(static_cast<std::size_t>(v.order), 'x') + "}";
    return s;
}

std::string power_suffix(int p) { return p == 1 ? std::string{} : "^" + std::to_string(p); }

template <class Vec, class Key>
auto find_factor(Vec &v, const Key &k) {
    return std::lower_bound(v.begin(), v.end(), k, [](const auto &e, const Key &key) { return e.first < key; });
}

template <class Vec, class Key>
void adjust_power(Vec &v, const Key &k, int delta) {
    auto it = find_factor(v, k);
    if (it != v.end() && it->first == k) {
        it->second += delta;
        if (it->second < 0) throw std::logic_error("negative power in monomial");
        if (it->second == 0) v.erase(it);
    } else {
        if (delta < 0) throw std::logic_error("negative power in monomial");
        if (delta > 0) v.insert(it, {k, delta});
    }
}

template <class Vec>
Vec merge_factors(const Vec &a, const Vec &b) {
    Vec out;
    out.reserve(a.size() + b.size());
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->first < j->first)) {
            out.push_back(*i++);
        } else if (i == a.end() || j->first < i->first) {
            out.push_back(*j++);
        } else {
            out.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// NonlocalAtom

NonlocalAtom NonlocalAtom::of_reduced(const Monomial &integrand) {
    NonlocalAtom a;
    a.integrand_ = std::make_shared<const Monomial>(integrand);
    a.level_ = integrand.level() + 1;
    a.key_ = to_string(integrand);
    return a;
}

DiffPoly NonlocalAtom::integrand_poly() const { return DiffPoly(*integrand_); }

int NonlocalAtom::degree() const { return integrand_->degree(); }

std::strong_ordering operator<=>(const NonlocalAtom &a, const NonlocalAtom &b) {
    if (a.level_ != b.level_) return a.level_ <=> b.level_;
    const int c = a.key_.compare(b.key_);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::of(JetVar v, int power) {
    Monomial m;
    if (power < 0 || v.order < 0) throw std::invalid_argument("jet powers and orders must be non-negative");
    if (power > 0) m.jets_.push_back({v, power});
    return m;
}

Monomial Monomial::of(const NonlocalAtom &a, int power) {
    Monomial m;
    if (power < 0) throw std::invalid_argument("atom powers must be non-negative");
    if (power > 0) m.atoms_.push_back({a, power});
    return m;
}

Monomial Monomial::lambda(int exponent) {
    Monomial m;
    m.scale_ = exponent;
    return m;
}

int Monomial::degree() const {
    int d = 0;
    for (const auto &[v, p] : jets_) d += p;
    for (const auto &[a, p] : atoms_) d += p * a.degree();
    return d;
}

int Monomial::level() const {
    int l = 0;
    for (const auto &[a, p] : atoms_) l = std::max(l, a.level());
    return l;
}

int Monomial::max_order() const {
    int o = -1;
    for (const auto &[v, p] : jets_) o = std::max(o, v.order);
    return o;
}

bool Monomial::uses(Symbol s) const {
    for (const auto &[v, p] : jets_)
        if (v.symbol == s) return true;
    for (const auto &[a, p] : atoms_)
        if (a.integrand().uses(s)) return true;
    return false;
}

int Monomial::power_of(const JetVar &v) const {
    auto it = find_factor(jets_, v);
    return (it != jets_.end() && it->first == v) ? it->second : 0;
}

int Monomial::power_of(const NonlocalAtom &a) const {
    auto it = find_factor(atoms_, a);
    return (it != atoms_.end() && it->first == a) ? it->second : 0;
}

Monomial Monomial::times_jet(const JetVar &v, int delta) const {
    Monomial m = *this;
    adjust_power(m.jets_, v, delta);
    return m;
}

Monomial Monomial::times_atom(const NonlocalAtom &a, int delta) const {
    Monomial m = *this;
    adjust_power(m.atoms_, a, delta);
    return m;
}

Monomial Monomial::with_scale(int exponent) const {
    Monomial m = *this;
    m.scale_ = exponent;
    return m;
}

std::optional<Monomial> Monomial::divided_by(const Monomial &d) const {
    Monomial m = *this;
    for (const auto &[v, p] : d.jets_) {
        if (m.power_of(v) < p) return std::nullopt;
        adjust_power(m.jets_, v, -p);
    }
    for (const auto &[a, p] : d.atoms_) {
        if (m.power_of(a) < p) return std::nullopt;
        adjust_power(m.atoms_, a, -p);
    }
    m.scale_ -= d.scale_;
    return m;
}

Monomial operator*(const Monomial &a, const Monomial &b) {
    Monomial m;
    m.jets_ = merge_factors(a.jets_, b.jets_);
    m.atoms_ = merge_factors(a.atoms_, b.atoms_);
    m.scale_ = a.scale_ + b.scale_;
    return m;
}

std::strong_ordering operator<=>(const Monomial &a, const Monomial &b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    if (auto c = std::lexicographical_compare_three_way(a.jets_.begin(), a.jets_.end(), b.jets_.begin(),
                                                        b.jets_.end());
        c != 0)
        return c;
    if (auto c = std::lexicographical_compare_three_way(a.atoms_.begin(), a.atoms_.end(), b.atoms_.begin(),
                                                        b.atoms_.end());
        c != 0)
        return c;
    return a.scale_ <=> b.scale_;
}

std::string to_string(const Monomial &m) {
    if (m.is_one()) return "1";
    std::string s;
    auto sep = [&s] {
        if (!s.empty()) s += "*";
    };
    for (const auto &[v, p] : m.jets()) {
        sep();
        s += jet_string(v) + power_suffix(p);
    }
    for (const auto &[a, p] : m.atoms()) {
        sep();
        s += "I(" + a.key() + ")" + power_suffix(p);
    }
    if (m.scale_exponent() != 0) {
        sep();
        s += "lam" + power_suffix(m.scale_exponent());
    }
    return s;
}

namespace {

std::string monomial_latex(const Monomial &m) {
    std::string s;
    auto sep = [&s] {
        if (!s.empty()) s += " ";
    };
    for (const auto &[v, p] : m.jets()) {
        sep();
        s += jet_latex(v);
        if (p != 1) s += "^{" + std::to_string(p) + "}";
    }
    for (const auto &[a, p] : m.atoms()) {
        sep();
        s += "(\\int{" + monomial_latex(a.integrand()) + "})";
        if (p != 1) s += "^{" + std::to_string(p) + "}";
    }
    if (m.scale_exponent() != 0) {
        sep();
        s += "\\lambda";
        if (m.scale_exponent() != 1) s += "^{" + std::to_string(m.scale_exponent()) + "}";
    }
    return s;
}

nlohmann::json monomial_json(const Monomial &m) {
    nlohmann::json factors = nlohmann::json::array();
    for (const auto &[v, p] : m.jets())
        factors.push_back({{"var", std::string(1, symbol_char(v.symbol))}, {"order", v.order}, {"power", p}});
    for (const auto &[a, p] : m.atoms()) factors.push_back({{"atom", a.integrand_poly().to_json()}, {"power", p}});
    return factors;
}

} // namespace

std::string rational_latex(const Rational &c) {
    if (c.get_den() == 1) return c.get_num().get_str();
    std::string sign = c < 0 ? "-" : "";
    mpz_class num = abs(c.get_num());
    return sign + "\\frac{" + num.get_str() + "}{" + c.get_den().get_str() + "}";
}

// ---------------------------------------------------------------------------
// DiffPoly

DiffPoly::DiffPoly(const Rational &constant) {
    if (constant != 0) terms_.emplace(Monomial{}, constant);
}

DiffPoly::DiffPoly(const Monomial &m, const Rational &coeff) {
    if (coeff != 0) terms_.emplace(m, coeff);
}

DiffPoly DiffPoly::jet(Symbol s, int order) { return DiffPoly(Monomial::of(JetVar{s, order})); }

DiffPoly DiffPoly::atom(const NonlocalAtom &a) { return DiffPoly(Monomial::of(a)); }

int DiffPoly::level() const {
    int l = 0;
    for (const auto &[m, c] : terms_) l = std::max(l, m.level());
    return l;
}

bool DiffPoly::uses(Symbol s) const {
    return std::any_of(terms_.begin(), terms_.end(), [s](const auto &t) { return t.first.uses(s); });
}

Rational DiffPoly::coeff(const Monomial &m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

void DiffPoly::add_term(const Monomial &m, const Rational &c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

DiffPoly &DiffPoly::operator+=(const DiffPoly &o) {
    for (const auto &[m, c] : o.terms_) add_term(m, c);
    return *this;
}

DiffPoly &DiffPoly::operator-=(const DiffPoly &o) {
    for (const auto &[m, c] : o.terms_) add_term(m, -c);
    return *this;
}

DiffPoly &DiffPoly::operator*=(const DiffPoly &o) {
    *this = *this * o;
    return *this;
}

DiffPoly &DiffPoly::operator*=(const Rational &c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto &[m, v] : terms_) v *= c;
    return *this;
}

DiffPoly operator*(const DiffPoly &a, const DiffPoly &b) {
    DiffPoly out;
    for (const auto &[ma, ca] : a.terms_)
        for (const auto &[mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
}

DiffPoly operator-(DiffPoly a) {
    for (auto &[m, c] : a.terms_) c = -c;
    return a;
}

std::string DiffPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto &[m, c] : terms_) {
        std::string body;
        const bool negative = c < 0;
        const Rational mag = abs(c);
        if (m.is_one()) {
            body = mag.get_str();
        } else if (mag == 1) {
            body = ckp::to_string(m);
        } else {
            body = mag.get_str() + "*" + ckp::to_string(m);
        }
        if (first) {
            out = negative ? "-" + body : body;
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += body;
        }
    }
    return out;
}

std::string DiffPoly::to_latex() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto &[m, c] : terms_) {
        const bool negative = c < 0;
        const Rational mag = abs(c);
        std::string body;
        if (m.is_one()) {
            body = rational_latex(mag);
        } else if (mag == 1) {
            body = monomial_latex(m);
        } else {
            body = rational_latex(mag) + " " + monomial_latex(m);
        }
        if (first) {
            out = negative ? "-" + body : body;
            first = false;
        } else {
            out += negative ? " - " : " + ";
            out += body;
        }
    }
    return out;
}

nlohmann::json DiffPoly::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[m, c] : terms_)
        terms.push_back({{"coeff", c.get_str()}, {"factors", monomial_json(m)}, {"lambda", m.scale_exponent()}});
    return {{"terms", terms}};
}

DiffPoly DiffPoly::from_json(const nlohmann::json &j) {
    Integrator integ(16);
    DiffPoly out;
    for (const auto &t : j.at("terms")) {
        Rational c(t.at("coeff").get<std::string>());
        c.canonicalize();
        DiffPoly term(Monomial::lambda(t.value("lambda", 0)), c);
        for (const auto &f : t.at("factors")) {
            const int power = f.at("power").get<int>();
            if (f.contains("atom")) {
                term *= pow(integ.antiderivative(from_json(f.at("atom"))), power);
            } else {
                const std::string var = f.at("var").get<std::string>();
                if (var.size() != 1 || std::string("qru").find(var[0]) == std::string::npos)
                    throw ParseError("unknown variable '" + var + "' in JSON polynomial");
                const Symbol s = var[0] == 'q' ? Symbol::q : var[0] == 'r' ? Symbol::r : Symbol::u;
                term *= DiffPoly(Monomial::of(JetVar{s, f.at("order").get<int>()}, power));
            }
        }
        out += term;
    }
    return out;
}

std::ostream &operator<<(std::ostream &os, const DiffPoly &p) { return os << p.to_string(); }

DiffPoly pow(const DiffPoly &p, int n) {
    if (n < 0) throw std::invalid_argument("negative power of a differential polynomial");
    DiffPoly out(Rational(1));
    for (int i = 0; i < n; ++i) out *= p;
    return out;
}

DiffPoly d_x(const Monomial &m) {
    DiffPoly out;
    for (const auto &[v, p] : m.jets())
        out.add_term(m.times_jet(v, -1).times_jet(JetVar{v.symbol, v.order + 1}, 1), p);
    for (const auto &[a, p] : m.atoms()) out.add_term(m.times_atom(a, -1) * a.integrand(), p);
    return out;
}

DiffPoly d_x(const DiffPoly &p) {
    DiffPoly out;
    for (const auto &[m, c] : p.terms()) {
        const DiffPoly dm = d_x(m);
        for (const auto &[t, dc] : dm.terms()) out.add_term(t, c * dc);
    }
    return out;
}

DiffPoly d_x(const DiffPoly &p, int times) {
    DiffPoly out = p;
    for (int i = 0; i < times; ++i) out = d_x(out);
    return out;
}

// ---------------------------------------------------------------------------
// Substitutions and prolongation

DiffPoly substitute(const DiffPoly &p, const std::function<DiffPoly(Symbol)> &image, Integrator &integ) {
    std::map<JetVar, DiffPoly> jet_cache;
    auto jet_image = [&](const JetVar &v) -> const DiffPoly & {
        auto it = jet_cache.find(v);
        if (it == jet_cache.end()) it = jet_cache.emplace(v, d_x(image(v.symbol), v.order)).first;
        return it->second;
    };
    DiffPoly out;
    for (const auto &[m, c] : p.terms()) {
        DiffPoly term(Monomial::lambda(m.scale_exponent()), c);
        for (const auto &[v, pw] : m.jets()) term *= pow(jet_image(v), pw);
        for (const auto &[a, pw] : m.atoms())
            term *= pow(integ.antiderivative(substitute(a.integrand_poly(), image, integ)), pw);
        out += term;
    }
    return out;
}

DiffPoly substitute_r_to_q(const DiffPoly &p, Integrator &integ) {
    return substitute(p, [](Symbol s) { return DiffPoly::jet(s == Symbol::r ? Symbol::q : s); }, integ);
}

DiffPoly substitute_r_to_q(const DiffPoly &p) {
    Integrator integ;
    return substitute_r_to_q(p, integ);
}

DiffPoly swap_qr(const DiffPoly &p, Integrator &integ) {
    return substitute(
        p,
        [](Symbol s) {
            return DiffPoly::jet(s == Symbol::q ? Symbol::r : s == Symbol::r ? Symbol::q : s);
        },
        integ);
}

DiffPoly swap_qr(const DiffPoly &p) {
    Integrator integ;
    return swap_qr(p, integ);
}

DiffPoly prolong_t(const DiffPoly &p, const FlowPair &flow, Integrator &integ) {
    std::map<JetVar, DiffPoly> cache;
    auto time_derivative = [&](const JetVar &v) -> const DiffPoly & {
        auto it = cache.find(v);
        if (it == cache.end()) {
            if (v.symbol == Symbol::u) throw std::invalid_argument("flows are defined on q and r only");
            it = cache.emplace(v, d_x(v.symbol == Symbol::q ? flow.q_t : flow.r_t, v.order)).first;
        }
        return it->second;
    };
    DiffPoly out;
    for (const auto &[m, c] : p.terms()) {
        for (const auto &[v, pw] : m.jets())
            out += DiffPoly(m.times_jet(v, -1), c * pw) * time_derivative(v);
        for (const auto &[a, pw] : m.atoms()) {
            DiffPoly inner = integ.antiderivative(prolong_t(a.integrand_poly(), flow, integ));
            out += DiffPoly(m.times_atom(a, -1), c * pw) * inner;
        }
    }
    return out;
}

DiffPoly prolong_t(const DiffPoly &p, const FlowPair &flow) {
    Integrator integ;
    return prolong_t(p, flow, integ);
}

DiffPoly scale_jets(const DiffPoly &p) {
    DiffPoly out;
    for (const auto &[m, c] : p.terms()) {
        if (!m.atoms().empty()) throw std::invalid_argument("scale substitution expects a local polynomial");
        Monomial s = Monomial::lambda(m.scale_exponent());
        for (const auto &[v, pw] : m.jets()) {
            if (v.symbol != Symbol::q) throw std::invalid_argument("scale substitution expects a polynomial in q only");
            s = s * Monomial::of(JetVar{Symbol::u, v.order}, pw) * Monomial::lambda(pw);
        }
        out.add_term(s, c);
    }
    return out;
}

DiffPoly collapse_scale(const DiffPoly &p, const Rational &lambda_sq) {
    if (lambda_sq == 0) throw std::invalid_argument("lambda_sq must be nonzero");
    DiffPoly out;
    for (const auto &[m, c] : p.terms()) {
        const int e = m.scale_exponent();
        if (e % 2 != 0)
            throw OddScaleResidue("odd power lam^" + std::to_string(e) + " left in term " + to_string(m));
        Rational factor = 1;
        for (int i = 0; i < std::abs(e) / 2; ++i) factor *= lambda_sq;
        if (e < 0) factor = 1 / factor;
        out.add_term(m.without_scale(), c * factor);
    }
    return out;
}

DiffPoly scale_substitute(const DiffPoly &p, const Rational &lambda_sq) {
    return collapse_scale(scale_jets(p) * DiffPoly(Monomial::lambda(-1)), lambda_sq);
}

} // namespace ckp

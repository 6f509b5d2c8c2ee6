#include <ckp/nonlocal.hpp>

#include <algorithm>
#include <ostream>

#include <ckp/errors.hpp>

namespace ckp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_unit(const DiffPoly &p) { return p == DiffPoly(Rational(1)); }

std::vector<Factor> merge_chain(const std::vector<Factor> &in) {
    std::vector<Factor> out;
    for (const Factor &f : in) {
        if (const Mul *m = std::get_if<Mul>(&f)) {
            if (!out.empty()) {
                if (Mul *prev = std::get_if<Mul>(&out.back())) {
                    prev->f *= m->f;
                    if (is_unit(prev->f)) out.pop_back();
                    continue;
                }
            }
            if (is_unit(m->f)) continue;
        }
        out.push_back(f);
    }
    return out;
}

std::string payload_string(const DiffPoly &p) {
    std::string s = p.to_string();
    if (p.size() > 1 || (!s.empty() && s[0] == '-')) return "(" + s + ")";
    return s;
}

std::string payload_latex(const DiffPoly &p) {
    if (p.size() > 1 || (p.size() == 1 && p.terms().begin()->second < 0)) return "\\left(" + p.to_latex() + "\\right)";
    return p.to_latex();
}

// Runs of d or d^-1 are printed as a single power.
template <class MulFn, class PowFn>
std::string render_chain(const std::vector<Factor> &chain, MulFn mul, PowFn power) {
    std::string out;
    auto emit = [&out](const std::string &tok) {
        if (!out.empty()) out += " ";
        out += tok;
    };
    int run = 0;
    auto flush = [&] {
        if (run != 0) emit(power(run));
        run = 0;
    };
    for (const Factor &f : chain) {
        std::visit(overloaded{[&](const Mul &m) {
                                  flush();
                                  emit(mul(m.f));
                              },
                              [&](const Dx &) {
                                  if (run < 0) flush();
                                  ++run;
                              },
                              [&](const DxInv &) {
                                  if (run > 0) flush();
                                  --run;
                              }},
                   f);
    }
    flush();
    return out.empty() ? "1" : out;
}

} // namespace

// ---------------------------------------------------------------------------
// IntDiffTerm

IntDiffTerm::IntDiffTerm(std::vector<Factor> chain) : chain_(merge_chain(chain)) {}

Rational IntDiffTerm::normalize() {
    Rational scale = 1;
    for (Factor &f : chain_) {
        if (Mul *m = std::get_if<Mul>(&f)) {
            if (m->f.is_zero()) return 0;
            const Rational lead = m->f.terms().begin()->second;
            m->f *= Rational(1 / lead);
            scale *= lead;
        }
    }
    chain_ = merge_chain(chain_);
    return scale;
}

std::string IntDiffTerm::to_string() const {
    return render_chain(chain_, payload_string, [](int k) { return k == 1 ? std::string("d") : "d^" + std::to_string(k); });
}

std::string IntDiffTerm::to_latex() const {
    return render_chain(chain_, payload_latex, [](int k) {
        return k == 1 ? std::string("\\partial") : "\\partial^{" + std::to_string(k) + "}";
    });
}

nlohmann::json IntDiffTerm::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const Factor &f : chain_) {
        std::visit(overloaded{[&](const Mul &m) { out.push_back({{"mul", m.f.to_json()}}); },
                              [&](const Dx &) { out.push_back({{"d", 1}}); },
                              [&](const DxInv &) { out.push_back({{"d", -1}}); }},
                   f);
    }
    return out;
}

// ---------------------------------------------------------------------------
// IntDiffOperator

IntDiffOperator::IntDiffOperator(std::initializer_list<Entry> entries) {
    for (const auto &[w, t] : entries) add(w, t);
}

IntDiffOperator IntDiffOperator::identity() { return {{Rational(1), IntDiffTerm()}}; }

IntDiffOperator IntDiffOperator::multiplier(const DiffPoly &f) {
    IntDiffOperator op;
    op.add(1, IntDiffTerm({Mul{f}}));
    return op;
}

IntDiffOperator IntDiffOperator::d(int k) {
    std::vector<Factor> chain;
    for (int i = 0; i < std::abs(k); ++i) chain.push_back(k > 0 ? Factor(Dx{}) : Factor(DxInv{}));
    IntDiffOperator op;
    op.add(1, IntDiffTerm(std::move(chain)));
    return op;
}

void IntDiffOperator::add(const Rational &weight, IntDiffTerm term) {
    const Rational w = weight * term.normalize();
    if (w == 0) return;
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        if (it->second == term) {
            it->first += w;
            if (it->first == 0) terms_.erase(it);
            return;
        }
    }
    terms_.emplace_back(w, std::move(term));
}

IntDiffOperator &IntDiffOperator::operator+=(const IntDiffOperator &o) {
    for (const auto &[w, t] : o.terms_) add(w, t);
    return *this;
}

IntDiffOperator &IntDiffOperator::operator-=(const IntDiffOperator &o) {
    for (const auto &[w, t] : o.terms_) add(-w, t);
    return *this;
}

IntDiffOperator operator*(const Rational &c, IntDiffOperator a) {
    if (c == 0) return {};
    for (auto &[w, t] : a.terms_) w *= c;
    return a;
}

IntDiffOperator operator*(const IntDiffOperator &a, const IntDiffOperator &b) {
    IntDiffOperator out;
    for (const auto &[wa, ta] : a.terms_) {
        for (const auto &[wb, tb] : b.terms_) {
            std::vector<Factor> chain = ta.chain();
            chain.insert(chain.end(), tb.chain().begin(), tb.chain().end());
            out.add(wa * wb, IntDiffTerm(std::move(chain)));
        }
    }
    return out;
}

bool operator==(const IntDiffOperator &a, const IntDiffOperator &b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    return std::all_of(a.terms_.begin(), a.terms_.end(), [&b](const IntDiffOperator::Entry &e) {
        return std::find(b.terms_.begin(), b.terms_.end(), e) != b.terms_.end();
    });
}

std::string IntDiffOperator::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto &[w, t] : terms_) {
        const Rational mag = abs(w);
        std::string body;
        if (t.is_identity()) {
            body = mag.get_str();
        } else if (mag == 1) {
            body = t.to_string();
        } else {
            body = mag.get_str() + " " + t.to_string();
        }
        if (first) {
            out = w < 0 ? "-" + body : body;
        } else {
            out += w < 0 ? " - " : " + ";
            out += body;
        }
        first = false;
    }
    return out;
}

std::string IntDiffOperator::to_latex() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto &[w, t] : terms_) {
        const Rational mag = abs(w);
        std::string body;
        if (t.is_identity()) {
            body = rational_latex(mag);
        } else if (mag == 1) {
            body = t.to_latex();
        } else {
            body = rational_latex(mag) + " " + t.to_latex();
        }
        if (first) {
            out = w < 0 ? "-" + body : body;
        } else {
            out += w < 0 ? " - " : " + ";
            out += body;
        }
        first = false;
    }
    return out;
}

nlohmann::json IntDiffOperator::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[w, t] : terms_) terms.push_back({{"weight", w.get_str()}, {"chain", t.to_json()}});
    return {{"terms", terms}};
}

IntDiffOperator IntDiffOperator::from_json(const nlohmann::json &j) {
    IntDiffOperator op;
    for (const auto &t : j.at("terms")) {
        Rational w(t.at("weight").get<std::string>());
        w.canonicalize();
        std::vector<Factor> chain;
        for (const auto &f : t.at("chain")) {
            if (f.contains("mul")) {
                chain.push_back(Mul{DiffPoly::from_json(f.at("mul"))});
            } else {
                const int k = f.at("d").get<int>();
                if (k != 1 && k != -1) throw ParseError("chain factor d must have power 1 or -1");
                chain.push_back(k == 1 ? Factor(Dx{}) : Factor(DxInv{}));
            }
        }
        op.add(w, IntDiffTerm(std::move(chain)));
    }
    return op;
}

IntDiffOperator IntDiffOperator::parse(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth < 0) throw ParseError("unbalanced ')' in operator '" + std::string(text) + "'");
        if (std::isspace(static_cast<unsigned char>(c)) && depth == 0) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (depth != 0) throw ParseError("unbalanced '(' in operator '" + std::string(text) + "'");
    if (!current.empty()) tokens.push_back(std::move(current));
    if (tokens.empty()) throw ParseError("empty operator");

    IntDiffOperator op;
    Rational sign = 1;
    std::vector<Factor> chain;
    bool have_factor = false;
    auto finish = [&] {
        if (!have_factor) throw ParseError("missing term in operator '" + std::string(text) + "'");
        op.add(sign, IntDiffTerm(std::move(chain)));
        chain.clear();
        have_factor = false;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string tok = tokens[i];
        if (!have_factor && tok.size() > 1 && tok[0] == '-' && (tok[1] == 'd' || tok[1] == '(')) {
            // sign glued to a leading d or parenthesized factor
            sign = -sign;
            tok.erase(0, 1);
        }
        if (tok == "+" || tok == "-") {
            if (have_factor) finish();
            else if (i != 0) throw ParseError("dangling sign in operator '" + std::string(text) + "'");
            sign = tok == "-" ? -1 : 1;
            continue;
        }
        have_factor = true;
        if (tok == "d" || tok.rfind("d^", 0) == 0) {
            int k = 1;
            if (tok != "d") {
                try {
                    std::size_t used = 0;
                    k = std::stoi(tok.substr(2), &used);
                    if (used != tok.size() - 2) throw ParseError("");
                } catch (const std::exception &) {
                    throw ParseError("bad power of d: '" + tok + "'");
                }
            }
            for (int j = 0; j < std::abs(k); ++j) chain.push_back(k > 0 ? Factor(Dx{}) : Factor(DxInv{}));
            continue;
        }
        chain.push_back(Mul{DiffPoly::parse(tok)});
    }
    finish();
    return op;
}

std::ostream &operator<<(std::ostream &os, const IntDiffOperator &op) { return os << op.to_string(); }

// ---------------------------------------------------------------------------
// Application and expansion

DiffPoly apply(const IntDiffOperator &op, const DiffPoly &f, Integrator &integ) {
    DiffPoly out;
    for (const auto &[w, t] : op.terms()) {
        DiffPoly value = f;
        for (auto it = t.chain().rbegin(); it != t.chain().rend(); ++it) {
            std::visit(overloaded{[&](const Mul &m) { value = m.f * value; },
                                  [&](const Dx &) { value = d_x(value); },
                                  [&](const DxInv &) { value = integ.antiderivative(value); }},
                       *it);
        }
        out += w * value;
    }
    return out;
}

DiffPoly apply(const IntDiffOperator &op, const DiffPoly &f) {
    Integrator integ;
    return apply(op, f, integ);
}

PsiDO expand_to_psido(const IntDiffOperator &op, int depth) {
    if (depth < 1) throw DepthExhausted("series expansion needs depth >= 1");
    PsiDO out({}, depth);
    for (const auto &[w, t] : op.terms()) {
        const int budget =
            depth + static_cast<int>(std::count_if(t.chain().begin(), t.chain().end(),
                                                   [](const Factor &f) { return std::holds_alternative<Dx>(f); }));
        PsiDO acc = PsiDO::multiplier(DiffPoly(w));
        for (const Factor &f : t.chain()) {
            std::visit(overloaded{[&](const Mul &m) { acc = compose(acc, PsiDO::multiplier(m.f)); },
                                  [&](const Dx &) { acc = compose(acc, PsiDO::d(1)); },
                                  [&](const DxInv &) { acc = compose(acc, PsiDO::d(-1, budget)); }},
                       f);
        }
        out += acc.is_exact() ? acc : acc.truncated(depth);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Substitutions

IntDiffOperator map_payloads(const IntDiffOperator &op, const std::function<DiffPoly(const DiffPoly &)> &fn) {
    IntDiffOperator out;
    for (const auto &[w, t] : op.terms()) {
        std::vector<Factor> chain;
        for (const Factor &f : t.chain()) {
            if (const Mul *m = std::get_if<Mul>(&f)) {
                chain.push_back(Mul{fn(m->f)});
            } else {
                chain.push_back(f);
            }
        }
        out.add(w, IntDiffTerm(std::move(chain)));
    }
    return out;
}

IntDiffOperator substitute_r_to_q(const IntDiffOperator &op, Integrator &integ) {
    return map_payloads(op, [&integ](const DiffPoly &p) { return substitute_r_to_q(p, integ); });
}

IntDiffOperator swap_qr(const IntDiffOperator &op, Integrator &integ) {
    return map_payloads(op, [&integ](const DiffPoly &p) { return swap_qr(p, integ); });
}

IntDiffOperator scale_substitute(const IntDiffOperator &op, const Rational &lambda_sq) {
    IntDiffOperator out;
    for (const auto &[w, t] : op.terms()) {
        // Every multiplier splits by its power of lam; expand the chain over all choices.
        std::vector<std::pair<int, std::vector<Factor>>> partial{{0, {}}};
        for (const Factor &f : t.chain()) {
            const Mul *m = std::get_if<Mul>(&f);
            if (!m) {
                for (auto &[e, chain] : partial) chain.push_back(f);
                continue;
            }
            std::map<int, DiffPoly> parts;
            const DiffPoly scaled = scale_jets(m->f);
            for (const auto &[mono, c] : scaled.terms())
                parts[mono.scale_exponent()].add_term(mono.without_scale(), c);
            std::vector<std::pair<int, std::vector<Factor>>> next;
            for (const auto &[e, chain] : partial) {
                for (const auto &[pe, part] : parts) {
                    auto extended = chain;
                    extended.push_back(Mul{part});
                    next.emplace_back(e + pe, std::move(extended));
                }
            }
            partial = std::move(next);
        }
        for (auto &[e, chain] : partial) {
            const Rational factor = collapse_scale(DiffPoly(Monomial::lambda(e)), lambda_sq).coeff(Monomial());
            out.add(w * factor, IntDiffTerm(std::move(chain)));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normal form

namespace {

struct NormalForm {
    std::map<int, DiffPoly> diff;
    std::map<std::pair<Monomial, Monomial>, Rational> tail;

    void add_tail(const Monomial &m, const Monomial &n, const Rational &c) {
        if (c == 0) return;
        auto [it, inserted] = tail.try_emplace({m, n}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) tail.erase(it);
        }
    }

    void add_diff(int k, const DiffPoly &c) {
        DiffPoly &slot = diff[k];
        slot += c;
        if (slot.is_zero()) diff.erase(k);
    }

    void mul_left(const DiffPoly &f) {
        std::map<int, DiffPoly> d;
        for (const auto &[k, c] : diff) {
            DiffPoly v = f * c;
            if (!v.is_zero()) d.emplace(k, std::move(v));
        }
        diff = std::move(d);
        auto old = std::move(tail);
        tail.clear();
        for (const auto &[mn, c] : old)
            for (const auto &[fm, fc] : f.terms()) add_tail(fm * mn.first, mn.second, c * fc);
    }

    void dx_left() {
        auto old_diff = std::move(diff);
        diff.clear();
        for (const auto &[k, c] : old_diff) {
            add_diff(k, d_x(c));
            add_diff(k + 1, c);
        }
        auto old = std::move(tail);
        tail.clear();
        for (const auto &[mn, c] : old) {
            const DiffPoly dm = d_x(mn.first);
            for (const auto &[t, dc] : dm.terms()) add_tail(t, mn.second, c * dc);
            add_diff(0, DiffPoly(mn.first * mn.second, c));
        }
    }

    void dxinv_left(Integrator &integ) {
        auto old_diff = std::move(diff);
        diff.clear();
        auto old = std::move(tail);
        tail.clear();
        // d^-1 c d^k = sum_{i<k} (-1)^i c^(i) d^(k-1-i) + (-1)^k d^-1 c^(k)
        for (const auto &[k, c] : old_diff) {
            DiffPoly deriv = c;
            for (int i = 0; i < k; ++i) {
                add_diff(k - 1 - i, (i % 2 == 0 ? Rational(1) : Rational(-1)) * deriv);
                deriv = d_x(deriv);
            }
            const Rational sign = k % 2 == 0 ? 1 : -1;
            for (const auto &[t, dc] : deriv.terms()) add_tail(Monomial(), t, sign * dc);
        }
        // d^-1 m d^-1 n = I(m) d^-1 n - d^-1 (n I(m))
        for (const auto &[mn, c] : old) {
            const DiffPoly im = integ.antiderivative(DiffPoly(mn.first));
            for (const auto &[t, ic] : im.terms()) {
                add_tail(t, mn.second, c * ic);
                add_tail(Monomial(), mn.second * t, -c * ic);
            }
        }
    }
};

NormalForm normal_form_of(const IntDiffOperator &op, Integrator &integ) {
    NormalForm total;
    for (const auto &[w, t] : op.terms()) {
        NormalForm nf;
        nf.diff[0] = DiffPoly(w);
        for (auto it = t.chain().rbegin(); it != t.chain().rend(); ++it) {
            std::visit(overloaded{[&](const Mul &m) { nf.mul_left(m.f); }, [&](const Dx &) { nf.dx_left(); },
                                  [&](const DxInv &) { nf.dxinv_left(integ); }},
                       *it);
        }
        for (const auto &[k, c] : nf.diff) total.add_diff(k, c);
        for (const auto &[mn, c] : nf.tail) total.add_tail(mn.first, mn.second, c);
    }
    return total;
}

} // namespace

IntDiffOperator normal_form(const IntDiffOperator &op, Integrator &integ) {
    const NormalForm nf = normal_form_of(op, integ);
    IntDiffOperator out;
    for (auto it = nf.diff.rbegin(); it != nf.diff.rend(); ++it) {
        std::vector<Factor> chain{Mul{it->second}};
        for (int i = 0; i < it->first; ++i) chain.push_back(Dx{});
        out.add(1, IntDiffTerm(std::move(chain)));
    }
    std::map<Monomial, DiffPoly> by_right;
    for (const auto &[mn, c] : nf.tail) by_right[mn.second].add_term(mn.first, c);
    for (auto it = by_right.rbegin(); it != by_right.rend(); ++it)
        out.add(1, IntDiffTerm({Mul{it->second}, DxInv{}, Mul{DiffPoly(it->first)}}));
    return out;
}

bool equivalent(const IntDiffOperator &a, const IntDiffOperator &b, Integrator &integ) {
    const NormalForm nf = normal_form_of(a - b, integ);
    return nf.diff.empty() && nf.tail.empty();
}

} // namespace ckp

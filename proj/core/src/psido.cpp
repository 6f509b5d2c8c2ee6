#include <ckp/psido.hpp>

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <ckp/errors.hpp>

#include "parse.hpp"

namespace ckp {

PsiDO::PsiDO(std::map<int, DiffPoly> coeffs, int depth) : coeffs_(std::move(coeffs)), depth_(depth) {
    if (depth_ < 0) throw DepthExhausted("negative truncation depth " + std::to_string(depth_));
    depth_ = std::min(depth_, kExact);
    prune();
}

void PsiDO::prune() {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->second.is_zero() || it->first < -depth_) {
            it = coeffs_.erase(it);
        } else {
            ++it;
        }
    }
    if (is_exact() && !coeffs_.empty() && coeffs_.begin()->first < 0)
        throw std::invalid_argument("an operator with negative orders needs a finite truncation depth");
}

PsiDO PsiDO::d(int k, int depth) {
    if (k < 0 && depth < -k) throw DepthExhausted("d^" + std::to_string(k) + " needs depth >= " + std::to_string(-k));
    return PsiDO({{k, DiffPoly(Rational(1))}}, depth);
}

PsiDO PsiDO::multiplier(const DiffPoly &f) { return PsiDO({{0, f}}); }

PsiDO PsiDO::parse(std::string_view text, int depth) { return PsiDO(detail::parse_graded(text, true), depth); }

DiffPoly PsiDO::coeff(int k) const {
    if (k < -depth_) throw DepthExhausted("order " + std::to_string(k) + " is below the trusted depth");
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? DiffPoly() : it->second;
}

int PsiDO::top_order() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

bool PsiDO::is_differential() const { return coeffs_.empty() || coeffs_.begin()->first >= 0; }

PsiDO PsiDO::truncated(int depth) const {
    if (depth > depth_) throw DepthExhausted("requested depth " + std::to_string(depth) + " exceeds trusted depth " +
                                             std::to_string(depth_));
    return PsiDO(coeffs_, depth);
}

PsiDO &PsiDO::operator+=(const PsiDO &o) {
    depth_ = std::min(depth_, o.depth_);
    for (const auto &[k, c] : o.coeffs_) coeffs_[k] += c;
    prune();
    return *this;
}

PsiDO &PsiDO::operator-=(const PsiDO &o) {
    depth_ = std::min(depth_, o.depth_);
    for (const auto &[k, c] : o.coeffs_) coeffs_[k] -= c;
    prune();
    return *this;
}

PsiDO operator-(PsiDO a) {
    for (auto &[k, c] : a.coeffs_) c = -c;
    return a;
}

PsiDO operator*(const Rational &c, PsiDO a) {
    for (auto &[k, v] : a.coeffs_) v *= c;
    a.prune();
    return a;
}

namespace {

std::string d_power(int k) {
    if (k == 1) return "d";
    return "d^" + std::to_string(k);
}

std::string d_power_latex(int k) {
    if (k == 1) return "\\partial";
    return "\\partial^{" + std::to_string(k) + "}";
}

} // namespace

std::string PsiDO::to_string() const {
    if (coeffs_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        const auto &[k, c] = *it;
        std::string body;
        bool negative = false;
        if (c.size() == 1) {
            const auto &[m, v] = *c.terms().begin();
            negative = v < 0;
            const DiffPoly mag(m, abs(v));
            if (k == 0) {
                body = mag.to_string();
            } else if (mag == DiffPoly(Rational(1))) {
                body = d_power(k);
            } else {
                body = mag.to_string() + "*" + d_power(k);
            }
        } else {
            body = "(" + c.to_string() + ")";
            if (k != 0) body += "*" + d_power(k);
        }
        if (first) {
            out = negative ? "-" + body : body;
        } else {
            out += negative ? " - " : " + ";
            out += body;
        }
        first = false;
    }
    return out;
}

std::string PsiDO::to_latex() const {
    if (coeffs_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        const auto &[k, c] = *it;
        std::string body;
        bool negative = false;
        if (c.size() == 1) {
            const auto &[m, v] = *c.terms().begin();
            negative = v < 0;
            const DiffPoly mag(m, abs(v));
            if (k == 0) {
                body = mag.to_latex();
            } else if (mag == DiffPoly(Rational(1))) {
                body = d_power_latex(k);
            } else {
                body = mag.to_latex() + " " + d_power_latex(k);
            }
        } else {
            body = "\\left(" + c.to_latex() + "\\right)";
            if (k != 0) body += " " + d_power_latex(k);
        }
        if (first) {
            out = negative ? "-" + body : body;
        } else {
            out += negative ? " - " : " + ";
            out += body;
        }
        first = false;
    }
    if (!is_exact()) out += " + O(\\partial^{" + std::to_string(-depth_ - 1) + "})";
    return out;
}

nlohmann::json PsiDO::to_json() const {
    nlohmann::json coeffs = nlohmann::json::array();
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        coeffs.push_back({{"order", it->first}, {"coeff", it->second.to_json()}});
    nlohmann::json depth = is_exact() ? nlohmann::json(nullptr) : nlohmann::json(depth_);
    return {{"depth", depth}, {"coeffs", coeffs}};
}

PsiDO PsiDO::from_json(const nlohmann::json &j) {
    std::map<int, DiffPoly> coeffs;
    for (const auto &c : j.at("coeffs")) coeffs[c.at("order").get<int>()] += DiffPoly::from_json(c.at("coeff"));
    const auto &depth = j.at("depth");
    return PsiDO(std::move(coeffs), depth.is_null() ? kExact : depth.get<int>());
}

std::ostream &operator<<(std::ostream &os, const PsiDO &a) { return os << a.to_string(); }

Rational binomial(int k, int l) {
    if (l < 0) return 0;
    Rational out = 1;
    for (int i = 0; i < l; ++i) {
        out *= (k - i);
        out /= (i + 1);
    }
    return out;
}

PsiDO compose(const PsiDO &a, const PsiDO &b) {
    int depth = PsiDO::kExact;
    if (!a.is_exact()) depth = std::min(depth, a.depth() - std::max(b.top_order(), 0));
    if (!b.is_exact()) depth = std::min(depth, b.depth() - std::max(a.top_order(), 0));
    if (depth < 0)
        throw DepthExhausted("composition exhausts the truncation depth (" + std::to_string(a.depth()) + ", " +
                             std::to_string(b.depth()) + ")");
    // With both operands exact only differential operators occur, so the series terminates.
    const int lowest = depth >= PsiDO::kExact ? 0 : -depth;

    std::map<int, DiffPoly> out;
    for (const auto &[j, bj] : b.coeffs()) {
        std::vector<DiffPoly> derivs{bj};
        for (const auto &[i, ai] : a.coeffs()) {
            for (int l = 0;; ++l) {
                if (i >= 0 && l > i) break;
                const int order = i + j - l;
                if (order < lowest) break;
                if (static_cast<int>(derivs.size()) <= l) derivs.push_back(d_x(derivs.back()));
                out[order] += binomial(i, l) * (ai * derivs[static_cast<std::size_t>(l)]);
            }
        }
    }
    return PsiDO(std::move(out), depth);
}

PsiDO commutator(const PsiDO &a, const PsiDO &b) { return compose(a, b) - compose(b, a); }

PsiDO adjoint(const PsiDO &a) {
    const int lowest = a.is_exact() ? 0 : -a.depth();
    std::map<int, DiffPoly> out;
    for (const auto &[k, c] : a.coeffs()) {
        DiffPoly deriv = c;
        const Rational sign = (k % 2 == 0) ? 1 : -1;
        for (int l = 0;; ++l) {
            if (k >= 0 && l > k) break;
            const int order = k - l;
            if (order < lowest) break;
            if (l > 0) deriv = d_x(deriv);
            out[order] += (sign * binomial(k, l)) * deriv;
        }
    }
    return PsiDO(std::move(out), a.depth());
}

PsiDO plus_part(const PsiDO &a) {
    std::map<int, DiffPoly> out(a.coeffs().lower_bound(0), a.coeffs().end());
    return PsiDO(std::move(out));
}

PsiDO minus_part(const PsiDO &a) {
    std::map<int, DiffPoly> out(a.coeffs().begin(), a.coeffs().lower_bound(0));
    return PsiDO(std::move(out), a.depth());
}

DiffPoly residue(const PsiDO &a) {
    if (a.depth() < 1) throw DepthExhausted("residue needs truncation depth >= 1");
    return a.coeff(-1);
}

DiffPoly apply(const PsiDO &a, const DiffPoly &f) {
    if (!a.is_differential())
        throw NegativeOrderApplication("cannot apply an operator with negative orders to a function");
    DiffPoly out;
    DiffPoly deriv = f;
    int current = 0;
    for (const auto &[k, c] : a.coeffs()) {
        while (current < k) {
            deriv = d_x(deriv);
            ++current;
        }
        out += c * deriv;
    }
    return out;
}

bool agree(const PsiDO &a, const PsiDO &b) {
    const int depth = std::min(a.depth(), b.depth());
    return a.truncated(depth) == b.truncated(depth);
}

} // namespace ckp

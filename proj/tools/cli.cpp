#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include <ckp/errors.hpp>
#include <ckp/recursion.hpp>

namespace ckp::cli {

namespace {

const std::vector<DiffPoly> &identity_inputs() {
    static const std::vector<DiffPoly> v{DiffPoly::parse("q"), DiffPoly::parse("r"), DiffPoly::parse("q*r"),
                                         DiffPoly::parse("q'")};
    return v;
}

int parse_int(const std::string &name, const std::string &value) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(value, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw std::invalid_argument(name + " must be an integer, got '" + value + "'");
    return v;
}

Format parse_format(const std::string &value) {
    if (value == "text") return Format::text;
    if (value == "latex") return Format::latex;
    if (value == "json") return Format::json;
    throw std::invalid_argument("format must be text, latex or json, got '" + value + "'");
}

std::string latex_escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '_': out += "\\_"; break;
        case '^': out += "\\^{}"; break;
        case '&': out += "\\&"; break;
        case '%': out += "\\%"; break;
        case '#': out += "\\#"; break;
        case '$': out += "\\$"; break;
        case '{': out += "\\{"; break;
        case '}': out += "\\}"; break;
        case '~': out += "\\textasciitilde{}"; break;
        case '\\': out += "\\textbackslash{}"; break;
        default: out += c;
        }
    }
    return out;
}

std::string latex_document(const std::string &body) {
    return "\\documentclass{article}\n\\usepackage{amsmath}\n\\usepackage[margin=1cm,landscape]{geometry}\n"
           "\\allowdisplaybreaks\n\\begin{document}\n" +
           body + "\\end{document}\n";
}

std::string align_block(const std::vector<std::pair<std::string, std::string>> &rows) {
    std::string out = "\\begin{align*}\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += rows[i].first + " &= " + rows[i].second;
        out += i + 1 < rows.size() ? " \\\\\n" : "\n";
    }
    return out + "\\end{align*}\n";
}

nlohmann::json config_json(const RunConfig &cfg) {
    static const char *const names[] = {"text", "latex", "json"};
    return {{"depth", cfg.depth},
            {"max_flow", cfg.max_flow},
            {"format", names[static_cast<int>(cfg.format)]},
            {"nesting_limit", cfg.nesting_limit}};
}

std::vector<int> odd_up_to(int first, int last) {
    std::vector<int> v;
    for (int n = first; n <= last; n += 2) v.push_back(n);
    return v;
}

FlowPair flow_at(int n, const RunConfig &cfg) { return flow(bn(n, cfg.depth), n); }

void compare_flows(CheckReport &rep, const FlowPair &got, const FlowPair &want) {
    rep.residual("q component", got.q_t - want.q_t);
    rep.residual("r component", got.r_t - want.r_t);
}

// ---------------------------------------------------------------------------
// Suites

std::vector<CheckReport> suite_skew(const RunConfig &cfg) { return {check_skew(cfg.depth)}; }

std::vector<CheckReport> suite_lax(const RunConfig &cfg) {
    std::vector<CheckReport> out;
    for (int n : odd_up_to(1, cfg.max_flow)) out.push_back(check_lax(n, 2));
    return out;
}

std::vector<CheckReport> suite_residues(const RunConfig &cfg) {
    std::vector<CheckReport> out;
    for (int m : odd_up_to(1, cfg.max_flow)) out.push_back(check_residue_coefficients(m, cfg.depth));
    return out;
}

std::vector<CheckReport> suite_recursion(const RunConfig &cfg) {
    std::vector<CheckReport> out;
    Integrator integ(cfg.nesting_limit);
    const RecursionMatrix rm = build_matrix();

    CheckReport sym;
    sym.name = "matrix q<->r symmetry";
    sym.require(swap_qr(rm.r11, integ) == rm.r22, "swap(R11) = R22");
    sym.require(swap_qr(rm.r12, integ) == rm.r21, "swap(R12) = R21");
    out.push_back(sym);

    std::map<int, FlowPair> flows;
    for (int m : odd_up_to(1, cfg.max_flow)) flows.emplace(m, flow_at(m, cfg));

    for (int m : odd_up_to(1, cfg.max_flow - 2)) {
        CheckReport rep;
        rep.name = "recursion step t" + std::to_string(m) + " -> t" + std::to_string(m + 2);
        try {
            compare_flows(rep, step(rm, flows.at(m), integ), flows.at(m + 2));
        } catch (const ResidualNonlocal &e) {
            rep.require(false, e.what());
        }
        out.push_back(rep);
    }
    if (cfg.max_flow >= 5) {
        CheckReport rep;
        rep.name = "two recursion steps t1 -> t5";
        try {
            compare_flows(rep, step(rm, step(rm, flows.at(1), integ), integ), flows.at(5));
        } catch (const ResidualNonlocal &e) {
            rep.require(false, e.what());
        }
        out.push_back(rep);
    }
    return out;
}

std::vector<CheckReport> suite_identities(const RunConfig &cfg) {
    std::vector<CheckReport> out;
    const auto &inputs = identity_inputs();
    for (int n : odd_up_to(1, std::min(5, cfg.max_flow))) {
        CheckReport rep;
        rep.name = "projection identities for B" + std::to_string(n);
        for (const auto &f : inputs)
            for (const auto &g : inputs) rep.merge(verify_projection_identities(n, f, g, 4));
        out.push_back(rep);
    }
    CheckReport prod;
    prod.name = "product identity for d^-1 terms";
    for (const auto &f1 : inputs)
        for (const auto &g1 : inputs)
            for (const auto &f2 : inputs)
                for (const auto &g2 : inputs) prod.merge(verify_product_identity(f1, g1, f2, g2, 4));
    out.push_back(prod);
    return out;
}

std::vector<CheckReport> suite_reduction(const RunConfig &cfg) {
    std::vector<CheckReport> out;
    Integrator integ(cfg.nesting_limit);
    const RecursionMatrix rm = build_matrix();

    CheckReport op;
    op.name = "reduced recursion operator";
    IntDiffOperator reduced;
    try {
        reduced = reduce_matrix(rm, integ);
    } catch (const ResidualNonlocal &e) {
        op.require(false, e.what());
        out.push_back(op);
        return out;
    }
    const IntDiffOperator literal = mkdv_operator();
    op.require(equivalent(reduced, literal, integ), "normal form equals d^2 + 8 q^2 + 8 q' d^-1 q");
    const PsiDO lhs = expand_to_psido(reduced, 6);
    const PsiDO rhs = expand_to_psido(literal, 6);
    for (int k = std::max(lhs.top_order(), rhs.top_order()); k >= -6; --k)
        op.residual("series order " + std::to_string(k), lhs.coeff(k) - rhs.coeff(k));
    out.push_back(op);

    const DiffPoly mkdv3 = DiffPoly::parse("q[3] + 12*q^2*q'");
    const DiffPoly mkdv5 = DiffPoly::parse("q[5] + 20*q^2*q[3] + 80*q*q'*q'' + 120*q^4*q' + 20*q'^3");
    CheckReport flows;
    flows.name = "mKdV flows from the reduced operator";
    const DiffPoly t3 = apply(reduced, DiffPoly::parse("q'"), integ);
    flows.residual("R_r(q') - mKdV t3", t3 - mkdv3);
    flows.residual("R_r(R_r(q')) - mKdV t5", apply(reduced, t3, integ) - mkdv5);
    flows.residual("flow t3 at r = q - mKdV t3", substitute_r_to_q(flow_at(3, cfg).q_t, integ) - mkdv3);
    if (cfg.max_flow >= 5)
        flows.residual("flow t5 at r = q - mKdV t5", substitute_r_to_q(flow_at(5, cfg).q_t, integ) - mkdv5);
    out.push_back(flows);

    CheckReport commute;
    commute.name = "reduction commutes with the recursion step";
    for (int m : odd_up_to(1, std::min(3, cfg.max_flow - 2))) {
        const FlowPair f = flow_at(m, cfg);
        try {
            const DiffPoly lhs_q = substitute_r_to_q(step(rm, f, integ).q_t, integ);
            const DiffPoly rhs_q = apply(reduced, substitute_r_to_q(f.q_t, integ), integ);
            commute.residual("t" + std::to_string(m), lhs_q - rhs_q);
        } catch (const ResidualNonlocal &e) {
            commute.require(false, e.what());
        }
    }
    out.push_back(commute);

    CheckReport scaled;
    scaled.name = "scaling q = lam u with lam^2 = 1/12";
    scaled.residual("t3", scale_substitute(mkdv3, kMkdvLambdaSq) - DiffPoly::parse("u[3] + u^2*u'"));
    scaled.residual("t5", scale_substitute(mkdv5, kMkdvLambdaSq) -
                              DiffPoly::parse("u[5] + 5/3*u^2*u[3] + 20/3*u*u'*u'' + 5/6*u^4*u' + 5/3*u'^3"));
    scaled.require(scaled_mkdv_operator(reduced) == IntDiffOperator::parse("d^2 + 2/3*u^2 + 2/3*u' d^-1 u"),
                   "scaled operator equals d^2 + 2/3 u^2 + 2/3 u' d^-1 u");
    out.push_back(scaled);
    return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_reports(const std::string &suite, const std::vector<CheckReport> &reports, const RunConfig &cfg) {
    std::size_t passed = 0;
    for (const auto &r : reports) passed += r.passed ? 1 : 0;
    const bool ok = passed == reports.size();
    switch (cfg.format) {
    case Format::json: {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto &r : reports) checks.push_back(r.to_json());
        nlohmann::json j{{"schema_version", kReportSchemaVersion},
                         {"command", "verify"},
                         {"suite", suite},
                         {"config", config_json(cfg)},
                         {"passed", ok},
                         {"checks", checks}};
        return j.dump(2) + "\n";
    }
    case Format::latex: {
        std::string body = "\\section*{verify " + latex_escape(suite) + "}\n\\begin{itemize}\n";
        for (const auto &r : reports)
            body += "\\item[" + std::string(r.passed ? "PASS" : "FAIL") + "] " + latex_escape(r.name) + "\n";
        body += "\\end{itemize}\n" + std::to_string(passed) + "/" + std::to_string(reports.size()) +
                " checks passed.\n";
        return latex_document(body);
    }
    case Format::text: break;
    }
    std::string text;
    for (const auto &r : reports) text += r.to_text();
    text += "verify " + suite + ": " + std::to_string(passed) + "/" + std::to_string(reports.size()) +
            " checks passed\n";
    return text;
}

std::string render_derive(int n, const RunConfig &cfg) {
    const PsiDO b = bn(n, cfg.depth);
    const FlowPair f = flow(b, n);
    const std::string k = std::to_string(n);
    switch (cfg.format) {
    case Format::json:
        return nlohmann::json{{"schema_version", kReportSchemaVersion},
                              {"command", "derive"},
                              {"n", n},
                              {"bn", b.to_json()},
                              {"flow", {{"q_t", f.q_t.to_json()}, {"r_t", f.r_t.to_json()}}}}
                   .dump(2) +
               "\n";
    case Format::latex:
        return latex_document(align_block({{"B_{" + k + "}", b.to_latex()},
                                           {"q_{t_{" + k + "}}", f.q_t.to_latex()},
                                           {"r_{t_{" + k + "}}", f.r_t.to_latex()}}));
    case Format::text: break;
    }
    return "B" + k + " = " + b.to_string() + "\nq_t" + k + " = " + f.q_t.to_string() + "\nr_t" + k + " = " +
           f.r_t.to_string() + "\n";
}

std::string render_export(const std::string &target, int n, const RunConfig &cfg) {
    std::vector<std::pair<std::string, std::string>> text_rows;
    std::vector<std::pair<std::string, std::string>> latex_rows;
    nlohmann::json j{{"schema_version", kReportSchemaVersion}, {"command", "export"}, {"target", target}};
    if (target == "recursion-matrix") {
        const RecursionMatrix rm = build_matrix();
        const std::pair<const char *, const IntDiffOperator *> entries[] = {
            {"11", &rm.r11}, {"12", &rm.r12}, {"21", &rm.r21}, {"22", &rm.r22}};
        for (const auto &[idx, op] : entries) {
            text_rows.emplace_back("R" + std::string(idx), op->to_string());
            latex_rows.emplace_back("R_{" + std::string(idx) + "}", op->to_latex());
            j["r" + std::string(idx)] = op->to_json();
        }
    } else if (target == "lax") {
        const PsiDO l = lax_operator(cfg.depth);
        text_rows.emplace_back("L", l.to_string());
        latex_rows.emplace_back("\\mathcal{L}", l.to_latex());
        j["lax"] = l.to_json();
    } else {
        const PsiDO b = bn(n, cfg.depth);
        text_rows.emplace_back("B" + std::to_string(n), b.to_string());
        latex_rows.emplace_back("B_{" + std::to_string(n) + "}", b.to_latex());
        j["n"] = n;
        j["bn"] = b.to_json();
    }
    switch (cfg.format) {
    case Format::json: return j.dump(2) + "\n";
    case Format::latex: return latex_document(align_block(latex_rows));
    case Format::text: break;
    }
    std::string out;
    for (const auto &[name, value] : text_rows) out += name + " = " + value + "\n";
    return out;
}

void check_flow_index(int n, const RunConfig &cfg) {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("flow index must be odd and positive, got " + std::to_string(n));
    if (n > cfg.max_flow)
        throw std::invalid_argument("flow index " + std::to_string(n) + " exceeds --max-flow " +
                                    std::to_string(cfg.max_flow));
}

} // namespace

RunConfig config_from_env(const EnvLookup &env) {
    RunConfig cfg;
    if (auto v = env("CKP_DEPTH")) cfg.depth = parse_int("CKP_DEPTH", *v);
    if (auto v = env("CKP_MAX_FLOW")) cfg.max_flow = parse_int("CKP_MAX_FLOW", *v);
    if (auto v = env("CKP_FORMAT")) cfg.format = parse_format(*v);
    if (auto v = env("CKP_NESTING_LIMIT")) cfg.nesting_limit = parse_int("CKP_NESTING_LIMIT", *v);
    return cfg;
}

void validate(const RunConfig &cfg) {
    if (cfg.max_flow < 1 || cfg.max_flow % 2 == 0)
        throw std::invalid_argument("--max-flow must be odd and positive, got " + std::to_string(cfg.max_flow));
    if (cfg.depth < cfg.max_flow + 1)
        throw std::invalid_argument("--depth must be at least --max-flow + 1 = " + std::to_string(cfg.max_flow + 1) +
                                    ", got " + std::to_string(cfg.depth));
    if (cfg.nesting_limit < 1)
        throw std::invalid_argument("--nesting-limit must be positive, got " + std::to_string(cfg.nesting_limit));
}

std::vector<std::string> suite_names() {
    return {"all", "skew", "lax", "recursion", "identities", "residues", "reduction"};
}

std::vector<CheckReport> run_suite(const std::string &suite, const RunConfig &cfg) {
    using Fn = std::vector<CheckReport> (*)(const RunConfig &);
    const std::vector<std::pair<std::string, Fn>> suites{{"skew", suite_skew},           {"lax", suite_lax},
                                                         {"residues", suite_residues},   {"recursion", suite_recursion},
                                                         {"identities", suite_identities}, {"reduction", suite_reduction}};
    std::vector<CheckReport> out;
    for (const auto &[name, fn] : suites) {
        if (suite != "all" && suite != name) continue;
        auto part = fn(cfg);
        out.insert(out.end(), part.begin(), part.end());
    }
    if (out.empty()) throw std::invalid_argument("unknown suite '" + suite + "'");
    return out;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err, const EnvLookup &env) {
    RunConfig cfg;
    try {
        cfg = config_from_env(env);
    } catch (const std::invalid_argument &e) {
        err << "ckp: " << e.what() << "\n";
        return kUsage;
    }

    CLI::App app{"Exact calculus for the 1-constrained CKP hierarchy and its recursion operator"};
    app.name("ckp");
    app.require_subcommand(1);
    app.fallthrough();
    std::string format_name;
    app.add_option("--depth", cfg.depth, "truncation depth for negative orders (env CKP_DEPTH)");
    app.add_option("--max-flow", cfg.max_flow, "highest odd flow index (env CKP_MAX_FLOW)");
    app.add_option("--format", format_name, "output format (env CKP_FORMAT)")
        ->check(CLI::IsMember({"text", "latex", "json"}));
    app.add_option("--out", cfg.out, "write output to PATH instead of stdout");
    app.add_option("--nesting-limit", cfg.nesting_limit, "deepest allowed antiderivative nesting (env CKP_NESTING_LIMIT)");

    int derive_n = 0;
    auto *derive = app.add_subcommand("derive", "print B_n and the t_n flow");
    derive->add_option("n", derive_n, "odd flow index")->required();

    std::string suite = "all";
    auto *verify = app.add_subcommand("verify", "run verification checks");
    verify->add_option("suite", suite, "which checks to run")->check(CLI::IsMember(suite_names()));

    std::string target;
    int export_n = 0;
    auto *exp = app.add_subcommand("export", "export operators");
    exp->add_option("target", target, "what to export")
        ->required()
        ->check(CLI::IsMember({"recursion-matrix", "lax", "bn"}));
    exp->add_option("n", export_n, "index for bn");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    }

    std::string rendered;
    int status = kPass;
    try {
        if (!format_name.empty()) cfg.format = parse_format(format_name);
        // export only evaluates what it prints, so the flow-range rule does not apply.
        if (exp->parsed()) {
            if (cfg.depth < 1) throw std::invalid_argument("--depth must be positive");
        } else {
            validate(cfg);
        }
        if (derive->parsed()) {
            check_flow_index(derive_n, cfg);
            rendered = render_derive(derive_n, cfg);
        } else if (verify->parsed()) {
            const auto reports = run_suite(suite, cfg);
            for (const auto &r : reports)
                if (!r.passed) status = kFail;
            rendered = render_reports(suite, reports, cfg);
        } else {
            if (target == "bn") {
                if (exp->count("n") == 0) throw std::invalid_argument("export bn needs an odd index, e.g. 'export bn 5'");
                check_flow_index(export_n, cfg);
            }
            rendered = render_export(target, export_n, cfg);
        }
    } catch (const DepthExhausted &e) {
        err << "ckp: " << e.what() << "\n  remedy: raise --depth\n";
        return kUsage;
    } catch (const NestingTooDeep &e) {
        err << "ckp: " << e.what() << "\n  remedy: raise --nesting-limit\n";
        return kUsage;
    } catch (const std::invalid_argument &e) {
        err << "ckp: " << e.what() << "\n";
        return kUsage;
    } catch (const Error &e) {
        err << "ckp: " << e.what() << "\n";
        return kUsage;
    }

    if (cfg.out.empty()) {
        out << rendered;
    } else {
        std::ofstream file(cfg.out, std::ios::binary);
        file << rendered;
        file.close();
        if (!file) {
            err << "ckp: cannot write '" << cfg.out << "'\n";
            return kUsage;
        }
    }
    return status;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    return run(argc, argv, out, err, [](const std::string &name) -> std::optional<std::string> {
        if (const char *v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    });
}

} // namespace ckp::cli

#include <ckp/report.hpp>

namespace ckp {

void CheckReport::residual(std::string label, DiffPoly value) {
    if (!value.is_zero()) passed = false;
    residuals.emplace_back(std::move(label), std::move(value));
}

void CheckReport::require(bool ok, const std::string &what) {
    if (!ok) {
        passed = false;
        notes.push_back("failed: " + what);
    }
}

void CheckReport::merge(const CheckReport &other) {
    passed = passed && other.passed;
    for (const auto &[label, value] : other.residuals) residuals.emplace_back(other.name + ": " + label, value);
    for (const auto &n : other.notes) notes.push_back(other.name + ": " + n);
}

nlohmann::json CheckReport::to_json() const {
    nlohmann::json res = nlohmann::json::array();
    for (const auto &[label, value] : residuals)
        res.push_back({{"label", label}, {"zero", value.is_zero()}, {"value", value.to_json()}});
    return {{"name", name}, {"passed", passed}, {"residuals", res}, {"notes", notes}};
}

std::string CheckReport::to_text() const {
    std::string out = std::string(passed ? "PASS " : "FAIL ") + name + "\n";
    std::size_t zero = 0;
    for (const auto &[label, value] : residuals) {
        if (value.is_zero()) {
            ++zero;
        } else {
            out += "  residual " + label + " = " + value.to_string() + "\n";
        }
    }
    if (!residuals.empty())
        out += "  " + std::to_string(zero) + "/" + std::to_string(residuals.size()) + " residuals vanish\n";
    for (const auto &n : notes) out += "  " + n + "\n";
    return out;
}

} // namespace ckp

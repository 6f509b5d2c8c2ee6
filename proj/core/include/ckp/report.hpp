#ifndef CKP_REPORT_HPP
#define CKP_REPORT_HPP

#include <string>
#include <utility>
#include <vector>

#include <ckp/diffring.hpp>

namespace ckp {

inline constexpr int kReportSchemaVersion = 1;

// Outcome of one exact check: named residuals that must all vanish.
struct CheckReport {
    std::string name;
    bool passed = true;
    std::vector<std::pair<std::string, DiffPoly>> residuals;
    std::vector<std::string> notes;

    // Records a residual; any nonzero residual fails the report.
    void residual(std::string label, DiffPoly value);
    // Records a boolean condition that is not expressed as a residual.
    void require(bool ok, const std::string &what);
    void merge(const CheckReport &other);

    nlohmann::json to_json() const;
    std::string to_text() const;
};

} // namespace ckp

#endif

#ifndef CKP_TOOLS_CLI_HPP
#define CKP_TOOLS_CLI_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <ckp/report.hpp>

namespace ckp::cli {

enum class Format { text, latex, json };

struct RunConfig {
    int depth = 8;
    int max_flow = 7;
    Format format = Format::text;
    std::string out;
    int nesting_limit = 2;
};

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;

// Reads CKP_DEPTH, CKP_MAX_FLOW, CKP_FORMAT, CKP_NESTING_LIMIT over the defaults.
// Throws std::invalid_argument on malformed values.
RunConfig config_from_env(const EnvLookup &env);
// Throws std::invalid_argument when the configuration is inconsistent.
void validate(const RunConfig &cfg);

std::vector<std::string> suite_names();
// Runs one suite ("all" runs every suite in a fixed order).
std::vector<CheckReport> run_suite(const std::string &suite, const RunConfig &cfg);

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err, const EnvLookup &env);
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ckp::cli

#endif

#ifndef CKP_SRC_PARSE_HPP
#define CKP_SRC_PARSE_HPP

#include <map>
#include <string_view>

#include <ckp/diffring.hpp>

namespace ckp::detail {

// Parses a sum of terms, each optionally ending in a power of d. The result maps
// the power of d to its left coefficient. With allow_d == false any d is an error.
std::map<int, DiffPoly> parse_graded(std::string_view text, bool allow_d);

} // namespace ckp::detail

#endif

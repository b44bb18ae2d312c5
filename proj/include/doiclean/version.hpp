#ifndef DOICLEAN_VERSION_HPP
#define DOICLEAN_VERSION_HPP

#include <string_view>

namespace doiclean {

inline constexpr std::string_view kToolName = "doiclean";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace doiclean

#endif

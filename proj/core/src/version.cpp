#include "logmorph/version.hpp"

namespace logmorph {

std::string_view version() noexcept { return LOGMORPH_VERSION_STRING; }

}  // namespace logmorph

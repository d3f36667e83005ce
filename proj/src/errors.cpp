#include "refdoc/errors.hpp"

// Error types are header-only; this translation unit anchors the library's
// vtable emission so every binary shares one copy of the RTTI.

namespace refdoc {
namespace {
[[maybe_unused]] void anchor() {}
} // namespace
} // namespace refdoc

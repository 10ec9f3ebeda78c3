#include "cife/common.hpp"

#include <atomic>

namespace cife {
namespace {
#ifdef NDEBUG
std::atomic<bool> g_validate{false};
#else
std::atomic<bool> g_validate{true};
#endif
}  // namespace

bool debug_validate_enabled() { return g_validate.load(std::memory_order_relaxed); }
void set_debug_validate(bool on) { g_validate.store(on, std::memory_order_relaxed); }

}  // namespace cife

#include "scenery/parallel.hpp"

namespace scenery {

std::atomic<bool>& cancellation_flag() noexcept {
    static std::atomic<bool> flag{false};
    return flag;
}

}  // namespace scenery

#include "measfid/parallel.hpp"

#include <cstdlib>
#include <string>

namespace measfid {

std::size_t default_worker_count() {
    if(const char *env = std::getenv("MEASFID_WORKERS"); env != nullptr && *env != '\0') {
        try {
            const long v = std::stol(env);
            if(v >= 1) return static_cast<std::size_t>(v);
        } catch(const std::exception &) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

} // namespace measfid

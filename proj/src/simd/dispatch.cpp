#include <cstdlib>
#include <cstring>

#include "traj/simd/kernels.hpp"

namespace traj::simd {

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Kernels& active_kernels() {
    static const Kernels* chosen = [] {
        const char* force = std::getenv("TRAJ_SIMD");
        if (force != nullptr && std::strcmp(force, "scalar") == 0)
            return &scalar_kernels();
        if (avx2_available()) return &avx2_kernels();
        return &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace traj::simd

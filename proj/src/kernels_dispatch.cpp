#include <atomic>
#include <cstdlib>
#include <cstring>

#include "segline/error.hpp"
#include "segline/kernels.hpp"
#include "segline/log.hpp"

namespace segline::kernels {

#if defined(SEGLINE_HAVE_AVX2)
const Ops* avx2_ops_impl();  // defined in kernels_avx2.cpp
#endif

namespace {

bool cpu_has_avx2_fma() {
#if defined(SEGLINE_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Dispatch {
    const Ops* active;
    Backend backend;
};

Dispatch resolve() {
    Backend pick = cpu_has_avx2_fma() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("SEGLINE_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) {
            pick = Backend::scalar;
        } else if (std::strcmp(env, "avx2") == 0) {
            if (!cpu_has_avx2_fma())
                throw Error("SEGLINE_KERNELS=avx2 requested but AVX2+FMA is unavailable");
            pick = Backend::avx2;
        } else {
            throw Error(std::string("unknown SEGLINE_KERNELS value: ") + env);
        }
    }
    if (pick == Backend::avx2) {
#if defined(SEGLINE_HAVE_AVX2)
        return {avx2_ops_impl(), Backend::avx2};
#endif
    }
    return {&scalar_ops(), Backend::scalar};
}

Dispatch& state() {
    static Dispatch d = resolve();
    return d;
}

}  // namespace

const Ops& ops() { return *state().active; }

const Ops* avx2_ops() {
#if defined(SEGLINE_HAVE_AVX2)
    return cpu_has_avx2_fma() ? avx2_ops_impl() : nullptr;
#else
    return nullptr;
#endif
}

Backend active_backend() { return state().backend; }

const char* backend_name() { return state().backend == Backend::avx2 ? "avx2" : "scalar"; }

void force_backend(Backend b) {
    if (b == Backend::avx2) {
        const Ops* t = avx2_ops();
        if (t == nullptr) throw Error("avx2 kernel backend unavailable on this machine");
        state() = {t, Backend::avx2};
    } else {
        state() = {&scalar_ops(), Backend::scalar};
    }
}

}  // namespace segline::kernels

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace logitcal {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Exceptions must not cross an OpenMP region boundary. Loop bodies run through
// ErrorSlot; the error from the lowest iteration index wins so the rethrown
// exception does not depend on scheduling.
class ErrorSlot {
public:
    template <class F>
    void run(std::ptrdiff_t index, F&& body) {
        try {
            body();
        } catch (...) {
            std::lock_guard lock(mu_);
            if (!error_ || index < index_) {
                error_ = std::current_exception();
                index_ = index;
            }
        }
    }

    void rethrow() const {
        if (error_) std::rethrow_exception(error_);
    }

private:
    std::mutex mu_;
    std::exception_ptr error_;
    std::ptrdiff_t index_ = 0;
};

}  // namespace logitcal

#pragma once

#include "logitcal/lidar.hpp"

namespace logitcal {

inline constexpr int kDefaultMaskSize = 13;

struct BilateralOptions {
    int mask_size = kDefaultMaskSize;  // odd, >= 1
    /// When false the range kernel is replaced by 1 (distance-only weights).
    bool range_weight = true;
    /// Each pass filters the previous pass's output.
    int iterations = 1;

    void validate() const;
};

/// Sparse-to-dense bilateral upsampling with rational kernels.
///
/// Each output pixel is sum_i w_i r_i / sum_i w_i over the occupied pixels i in the
/// mask centered on it (clipped at the borders), with
///
///   w_i = 1 / (1 + ||c0 - c_i||) * 1 / (1 + |r0 - r_i|)
///
/// where ||.|| is the Euclidean pixel distance. r0 is the pixel's own value when it is
/// occupied, else the unweighted mean of the occupied pixels in its mask. Pixels whose
/// mask holds no occupied pixel stay empty. Rows run in parallel under OpenMP.
SparseMap bilateral_upsample(const SparseMap& map, const BilateralOptions& opts = {});

/// Single-threaded reference; bit-identical to bilateral_upsample.
SparseMap bilateral_upsample_serial(const SparseMap& map, const BilateralOptions& opts = {});

}  // namespace logitcal

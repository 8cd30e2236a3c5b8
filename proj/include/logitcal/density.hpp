#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "logitcal/config.hpp"
#include "logitcal/records.hpp"

namespace logitcal {

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normalized frequency histogram of one class's training logits.
///
/// Bins are half-open [low, high) except the last, which is closed so the maximum
/// training value has a home. Edges are contiguous: bin_high[i] == bin_low[i + 1].
struct ClassHistogram {
    int class_index = 0;
    std::vector<double> bin_low;
    std::vector<double> bin_high;
    std::vector<double> freq;

    std::size_t bins() const { return freq.size(); }
    double lower() const { return bin_low.front(); }
    double upper() const { return bin_high.back(); }

    /// Bin containing x, or -1 if x lies outside [lower(), upper()].
    long bin_of(double x) const;
    /// freq of the bin containing x; 0 outside the histogram range.
    double density_at(double x) const { auto b = bin_of(x); return b < 0 ? 0.0 : freq[static_cast<std::size_t>(b)]; }
};

struct GaussianPrior {
    int class_index = 0;
    double mu = 0.0;
    double sigma2 = 1.0;

    double pdf(double x) const;
};

/// Per-class likelihood histograms and Gaussian priors fitted on training logits.
struct DensityModel {
    std::size_t num_classes = 0;
    int bins = 0;
    std::vector<ClassHistogram> histograms;
    std::vector<GaussianPrior> priors;
    std::vector<std::size_t> class_counts;  // training records per class

    /// Throws FitError if the per-class structures are inconsistent.
    void check() const;
};

/// Uniform-width histogram over [min, max] of `values`, frequencies normalized to sum to 1.
/// All-equal input is widened by 1e-6 * max(1, |v|) on each side.
ClassHistogram fit_histogram(std::span<const double> values, int bins, int class_index = 0);

/// Sample mean and unbiased (N-1) variance. Needs at least two distinct values.
GaussianPrior fit_prior(std::span<const double> values, int class_index = 0);

/// Class c is fit on the c-th logit of training records whose true class is c.
DensityModel fit_model(const std::vector<TrainingRecord>& train, int bins);

/// Entry c: histogram c's frequency at logits[c] (0 when out of range).
std::vector<double> lookup_likelihood(const DensityModel& model, std::span<const double> logits);

/// Entry c: the class-c Gaussian density at logits[c], or the training class frequency
/// when `mode` is class_frequency.
std::vector<double> eval_prior(const DensityModel& model, std::span<const double> logits,
                               PriorMode mode = PriorMode::gaussian_density);

inline constexpr int kModelVersion = 1;

/// Versioned JSON document; the writer output is deterministic for a given model.
void write_model(std::ostream& out, const DensityModel& model);
DensityModel read_model(std::istream& in);

}  // namespace logitcal

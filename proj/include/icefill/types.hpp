#ifndef ICEFILL_TYPES_HPP
#define ICEFILL_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace icefill {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;

/// Bad caller input: dimension mismatches, out-of-domain parameters, malformed files.
struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: non-finite results, factorization failures.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment configuration problems (unknown keys, inconsistent combinations).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The analytic MSE-gap bound is only valid when every power exceeds one;
/// callers must treat the bound as "not applicable", not as zero.
struct BoundNotApplicableError : InvalidInputError {
    using InvalidInputError::InvalidInputError;
};

/// Uniform planar array: Mx columns along x, My along y, element spacing d.
/// Antenna index m = ix*My + iy (x-major); per-axis positions are centered,
/// i.e. ix runs over -(Mx-1)/2 ... +(Mx-1)/2 in units of d.
struct UpaGeometry {
    int mx = 1;
    int my = 1;
    double d = 0.0625;       ///< element spacing [m]
    double wavelength = 0.5; ///< carrier wavelength [m]

    [[nodiscard]] int size() const { return mx * my; }
    [[nodiscard]] double spacing_wavelengths() const { return d / wavelength; }
    void validate() const {
        if (mx < 1 || my < 1) throw InvalidInputError("UpaGeometry: antenna counts must be >= 1");
        if (!(d > 0.0) || !(wavelength > 0.0))
            throw InvalidInputError("UpaGeometry: spacing and wavelength must be positive");
    }
};

/// Channel covariance with a provenance tag.
enum class KernelLabel { perfect, statistical, exponential, bessel, sample };

struct Kernel {
    MatC matrix;
    KernelLabel label = KernelLabel::perfect;

    [[nodiscard]] int dim() const { return static_cast<int>(matrix.rows()); }
};

[[nodiscard]] const char* to_string(KernelLabel label);

/// Rank-truncated eigendecomposition of a covariance kernel.
/// Columns of `vectors` are orthonormal; `values` strictly positive, descending.
struct EigenBasis {
    MatC vectors;  ///< M x K
    VecD values;   ///< K, descending, > 0
    int ambient_dim = 0;

    [[nodiscard]] int rank() const { return static_cast<int>(values.size()); }
    /// U * diag(values) * U^H
    [[nodiscard]] MatC reconstruct() const;
};

/// Hardware class of an observation matrix.
enum class ObservationMode { unit_norm_columns, unit_modulus_entries, scaled_eigen };

/// Per-pilot combining vectors, one column per timeslot.
struct ObservationMatrix {
    MatC matrix;  ///< M x Q
    ObservationMode mode = ObservationMode::unit_norm_columns;
    /// Eigen index each column observes; populated by eigenvector-reuse designers.
    std::vector<int> selected_index;

    [[nodiscard]] int dim() const { return static_cast<int>(matrix.rows()); }
    [[nodiscard]] int num_slots() const { return static_cast<int>(matrix.cols()); }
};

/// Continuous pilot-power split over kernel eigendirections.
struct PowerAllocation {
    VecD powers;              ///< K entries, >= 0, summing to the budget
    double water_level = 0.0; ///< common level the inverse gains are filled to
};

/// Discrete slot counts produced by the greedy eigenvector-reuse designer.
struct PilotAllocation {
    std::vector<int> counts;          ///< n_k, one per eigendirection
    std::vector<int> selection_order; ///< eigen index chosen at each timeslot (0-based)
    VecD ice_levels;                  ///< final inverse working gains sigma^2/lambda_k
};

/// Posterior-mean estimate plus its exact expected squared error.
struct EstimateResult {
    VecC posterior_mean;
    double posterior_trace = 0.0; ///< trace of the posterior covariance
    double squared_error = 0.0;   ///< ||truth - mean||^2 when the truth is known
};

}  // namespace icefill

#endif

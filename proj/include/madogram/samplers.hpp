#pragma once

#include <cstdint>

#include "madogram/ev_models.hpp"
#include "madogram/masked_data.hpp"

namespace madogram {

/// i.i.d. rows with the symmetric logistic copula on uniform margins
/// (positive-stable frailty construction; theta = 1 emits independent
/// uniforms directly).
MaskedMatrix sample_symmetric_logistic(int d, double theta, int n,
                                       std::uint64_t seed);

/// Asymmetric logistic via per-subset frailty blocks combined on the
/// Frechet scale.
MaskedMatrix sample_asymmetric_logistic(int d, const AsymmetricLogistic& model,
                                        int n, std::uint64_t seed);

/// Bivariate families via conditional inversion: U1 uniform, then solve
/// dC/du1(u1, v) = V for v by bisection (|residual| <= 1e-10, <= 200 steps).
MaskedMatrix sample_bivariate_conditional(const PickandsModel& model, int n,
                                          std::uint64_t seed);

/// Dispatch on the model family.
MaskedMatrix sample_model(const PickandsModel& model, int n,
                          std::uint64_t seed);

/// Draw an MCAR observedness mask independent of the values. Custom-mode
/// profiles carry no generative mechanism and are rejected.
MaskedMatrix apply_mcar_mask(const MaskedMatrix& data,
                             const MissingnessProfile& profile,
                             std::uint64_t seed);

/// Uniform margins to unit Frechet: x = -1/ln(u).
MaskedMatrix to_frechet(const MaskedMatrix& data);

}  // namespace madogram

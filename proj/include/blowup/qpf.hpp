#pragma once

#include <utility>
#include <vector>

#include "blowup/base.hpp"
#include "blowup/pinch.hpp"
#include "blowup/skew.hpp"
#include "blowup/weights.hpp"

namespace blowup {

/// Blow-up of a quasiperiodically forced interval map (circle rotation base).
using QpfSystem = BlownUpSystem<CircleRotation>;

/// The default forced system (tent curve, contraction 0.5 near the curve)
/// blown up along the orbit of theta_star. Throws BasepointError when some
/// theta*_n, |n| <= N, lies within 1e-9 of the cut point 0.
QpfSystem make_qpf(PinchMode mode = PinchMode::one_sided, long N = 40,
                   WeightSequence weights = WeightSequence(), double omega = golden_mean,
                   double theta_star = 0.3);

/// Parametrization of h^{-1}(curve) by the circle: t -> xi(t).
///
/// eta(theta) = b' theta + sum of a_n over theta*_n in [0, theta) is the
/// Denjoy-type reparametrization of the base; at an atom theta*_n the jump of
/// eta is spent walking down the segment S_n from its top.
class PinchedSetParametrization {
public:
    explicit PinchedSetParametrization(const QpfSystem& sys);

    /// Left-continuous eta (theta*_n itself excluded from the sum).
    double eta(double theta) const;
    /// Generalized inverse inf{ theta : eta(theta) >= t }.
    double eta_hat(double t) const;
    double gamma_plus(double theta) const { return sys_.gamma_plus(snap(theta)); }

    std::pair<double, double> xi(double t) const;
    double xi_inv(double theta, double x) const;

    /// Degree-one lift of t -> xi^{-1}(fhat(xi(t))).
    double conjugated_lift(double t) const;

    /// theta*_n if theta is within the fibre tolerance of it, theta otherwise.
    double snap(double theta) const;

private:
    const QpfSystem& sys_;
    double lebesgue_;
    std::vector<double> position_;  // theta*_n sorted
    std::vector<double> prefix_;    // prefix_[i] = mass of atoms 0..i-1 in sorted order
};

struct JumpEstimate {
    double jump = 0.0;
    bool converged = false;
    std::vector<double> raw;           // D_j = mu[0,gamma) left - mu[0,gamma] right
    std::vector<double> extrapolated;  // 2 D_{j+1} - D_j
};

/// mu_theta[0, gamma(theta)) at theta* - 2^-j minus mu_theta[0, gamma(theta)]
/// at theta* + 2^-j for j = first_j .. first_j + approach_count, with
/// Richardson extrapolation. Requires one-sided pinch functions.
JumpEstimate discontinuity_jump(const QpfSystem& sys, int approach_count = 30, int first_j = 4);

enum class FillVerdict { non_filled_in, filled_in, inconclusive, no_segment };
const char* to_string(FillVerdict v);

struct FillEnvelope {
    std::vector<double> theta;  // bin centres
    std::vector<double> lower;  // inf of the sample in the bin, NaN if empty
    std::vector<double> upper;
    FillVerdict verdict = FillVerdict::inconclusive;
    double midpoint_margin = 0.0;  // vertical distance from mid(S_0) to samples near theta*
    double cover_gap = 1.0;        // max over points of S_0 of the distance to the sample
    long near_count = 0;
};

/// Fibrewise inf/sup envelopes of a minimal-set sample, and a verdict on
/// whether the interior of S_0 is missed (margin >= a_0/4 within `window` of
/// theta*) or covered (every point of S_0 within `cover_tol` of the sample).
FillEnvelope filled_in_envelope(const QpfSystem& sys, const std::vector<QpfSystem::Sample>& sample,
                                long bins = 1000, double window = 1e-3, double cover_tol = 1e-2);

}  // namespace blowup

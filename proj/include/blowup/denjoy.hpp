#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "blowup/measure.hpp"
#include "blowup/weights.hpp"

namespace blowup {

/// Checks that omega has no period q <= horizon within `tol` (||q omega|| > tol).
bool looks_irrational(double omega, long horizon = 1000000, double tol = 1e-12);

/// nu = sum_{|n|<=N} a_n delta_{x_n} + (b + tail(N)) Leb with x_n = x0 + n omega mod 1.
///
/// Throws DomainError for a rational-looking omega and BasepointError when the
/// orbit comes within 1e-9 of the cut point 0. N = -1 gives Lebesgue measure.
HybridMeasure build_nu(double omega, double x0, const WeightSequence& weights, long N);

struct Gap {
    long n;
    double c;  // nu[0, x_n)
    double d;  // nu[0, x_n]
    double a;  // a_n
    double length() const { return d - c; }
};

/// Denjoy homeomorphism obtained by blowing up the orbit of x0 under the
/// rotation by omega into the gaps I_n = [c_n, d_n].
class DenjoySystem {
public:
    DenjoySystem(double omega = golden_default(), double x0 = 0.1,
                 WeightSequence weights = WeightSequence(), long N = 40);

    static double golden_default();

    double omega() const { return omega_; }
    double x0() const { return x0_; }
    long truncation() const { return N_; }
    const WeightSequence& weights() const { return weights_; }
    const HybridMeasure& nu() const { return nu_; }

    /// x_n = x0 + n omega mod 1
    double orbit_point(long n) const;
    const std::vector<Gap>& gaps() const { return gaps_; }
    const Gap& gap(long n) const { return gaps_.at(static_cast<std::size_t>(n + N_)); }

    /// Gap I_n with c_n <= y <= d_n, if any.
    std::optional<long> gap_containing(double y) const;
    /// True when c_n + margin < y < d_n - margin for some |n| <= N.
    bool in_open_gap(double y, double margin = 0.0) const;

    /// Quantile map of nu; collapses each gap to its orbit point.
    double h(double x) const;

    double forward(double y) const;
    double inverse(double y) const;
    /// Degree-one lift of `forward`, for any real y.
    double lift(double y) const;

private:
    double omega_;
    double x0_;
    WeightSequence weights_;
    long N_;
    HybridMeasure nu_;
    std::vector<Gap> gaps_;          // indexed by n + N
    std::vector<std::size_t> order_;  // gap indices sorted by c
};

/// Quantile map h of the system's measure.
std::function<double(double)> denjoy_h(const DenjoySystem& sys);

/// The circle homeomorphism as a forward/inverse oracle in cut coordinates.
MonotoneMapOracle denjoy_map(const DenjoySystem& sys);

/// {f^k(c_0) : 0 <= k < K}
std::vector<double> minimal_set_sample(const DenjoySystem& sys, long K);

/// Smallest separation between I_0 and its images f^k(I_0), 1 <= k <= k_max,
/// computed by endpoint iteration. Negative when some image overlaps I_0.
double wandering_margin(const DenjoySystem& sys, long k_max);

/// min over grid points y and p/q (q <= q_max, p nearest q*rho) of
/// |F^q(y) - y - p|. Strictly positive means no periodic point was found.
double periodic_defect(const DenjoySystem& sys, long q_max, long grid);

/// Largest distance from a grid point outside all gaps to the nearest sample.
double covering_radius(const DenjoySystem& sys, const std::vector<double>& sample, long grid);

}  // namespace blowup

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "blowup/measure.hpp"
#include "blowup/pinch.hpp"
#include "blowup/qpf.hpp"
#include "blowup/weights.hpp"

namespace blowup {

// ---- interval map with a 3-cycle ------------------------------------------

/// Continuous piecewise-linear map of [0,1] through the given vertices.
struct PiecewiseLinearMap {
    std::vector<double> x;
    std::vector<double> y;

    double operator()(double t) const;
    double slope_at(double t) const;
};

/// g(0) = 1/2, g(1/2) = 1, g(1) = 0, with a unique fixed point x0 = 0.7 where
/// g is increasing with slope 0.4.
PiecewiseLinearMap build_g();

struct IntervalMapScan {
    int sign_changes = 0;          // of g(x) - x on the grid
    double fixed_point = 0.0;      // located by bisection in the bracketing cell
    double fixed_slope = 0.0;
    double cycle_residual = 0.0;   // |g^3(p) - p| over p in {0, 1/2, 1}
};

IntervalMapScan scan_interval_map(const PiecewiseLinearMap& g, long grid = 10000);

// ---- surgery ----------------------------------------------------------------

/// F-hat: R x g outside A0 = T x [a-, a+], and h1 o f-hat o h1^{-1} inside,
/// where h1 maps the f-hat-coordinates annulus h^{-1}(T x [lo, hi]) onto A0
/// fibrewise in three affine bands so that the image of f-hat lands on
/// T x [g(a-), g(a+)].
class SurgerySystem {
public:
    struct Bands {
        double L, Lhat, Uhat, U;  // f-hat coordinates, increasing
    };

    SurgerySystem(const QpfSystem& inner, PiecewiseLinearMap g, double a_minus, double a_plus,
                  double inner_lo = 0.05, double inner_hi = 0.95);

    const QpfSystem& inner() const { return inner_; }
    const PiecewiseLinearMap& g() const { return g_; }
    double a_minus() const { return a_minus_; }
    double a_plus() const { return a_plus_; }
    double omega() const { return inner_.base().omega; }

    Bands bands(double theta) const;
    /// h1 on a fibre; x-hat in [L, U]
    double glue(double theta, double xhat) const;
    /// h1^{-1} on a fibre; x in [a-, a+]
    double unglue(double theta, double x) const;
    /// slope of h1 on the middle band
    double glue_scale(double theta) const;

    std::pair<double, double> outer(double theta, double x) const;
    std::pair<double, double> forward(double theta, double x) const;

    /// sup over `count` boundary points of |inside branch - outer branch| on
    /// both circles of the boundary of A0.
    double boundary_residual(long count) const;

private:
    const QpfSystem& inner_;
    PiecewiseLinearMap g_;
    double a_minus_, a_plus_, lo_, hi_;
};

/// Validates the inequalities a- < g(a-) < x0 < g(a+) < a+, the absence of
/// 3-periodic points in [a-, a+], and f(A) inside int A for the inner system,
/// then checks continuity across the boundary of A0 on 1e4 points. Throws
/// PreconditionError or ConstructionError (with the residual).
SurgerySystem build_sharkovsky(const QpfSystem& inner, double a_minus = 0.65, double a_plus = 0.75);

struct CurveCertificate {
    double oscillation = 0.0;  // min over windows of the upper-envelope oscillation
    double scale = 0.0;        // glue_scale at theta*
    double required = 0.0;     // 0.8 a_0 scale
    bool certified = false;
    std::vector<double> upper_side, lower_side;  // envelope samples
    double centre = 0.0;
    int fixed_points = 0;          // sign changes of g(x) - x
    bool fixed_point_inside = false;
    double basin_fraction = 0.0;   // sampled orbits from outside A0 that enter it
    double cycle_residual = 0.0;   // F-hat^3 on the constant curves 0, 1/2, 1
};

/// Upper envelope of the attractor inside A0 near theta*, obtained by pushing
/// the top circle of A0 forward `depth` times, on windows theta* +- 2^-j for
/// 4 <= j < 4 + min(approach, depth - 10).
CurveCertificate certify_no_invariant_curve(const SurgerySystem& s, int depth = 40, int approach = 30,
                                            long basin_samples = 1000, std::uint64_t seed = 1);

/// max over theta on a grid and p in {0, 1/2, 1} of |F-hat^3(theta, p) - p|.
double three_cycle_residual(const SurgerySystem& s, long grid = 1000);

// ---- point-distal torus map ----------------------------------------------

/// Blow-up of the torus rotation (theta, x) -> (theta + omega, x + rho) along
/// the orbit of z* = (theta*, x*), with circle fibres cut at x = 0.
class ReesSystem {
public:
    ReesSystem(double omega, double rho, double theta_star, double x_star,
               WeightSequence weights = WeightSequence(), long N = 40, double pinch_scale = 0.3,
               double pinch_delta = 0.1);

    struct FibreOrbit {
        long radius = 0;
        std::vector<double> theta;
        std::vector<double> below, above;
        std::vector<char> star;
        std::optional<long> blown;
        std::size_t idx(long k) const { return static_cast<std::size_t>(k + radius); }
    };

    double omega() const { return omega_; }
    double rho() const { return rho_; }
    double theta_star() const { return theta_star_; }
    double x_star() const { return x_star_; }
    long truncation() const { return N_; }
    const WeightSequence& weights() const { return weights_; }
    double tail() const { return weights_.tail(N_); }
    double lebesgue() const { return leb_; }

    double blown_fibre(long n) const { return wrap01(theta_star_ + static_cast<double>(n) * omega_); }
    double atom_position(long n) const { return wrap01(x_star_ + static_cast<double>(n) * rho_); }

    FibreOrbit orbit(double theta) const;

    /// mu_theta[0, y] (or [0, y) with `left`) on the fibre cut at 0. `star_above`
    /// overrides the Dirac term of a blown-up fibre: true counts the atom.
    double mu_cdf(const FibreOrbit& o, double y, bool left = false,
                  std::optional<bool> star_above = std::nullopt) const;
    double mu_cdf(double theta, double y) const { return mu_cdf(orbit(theta), y); }
    double h(const FibreOrbit& o, double x) const;
    double h(double theta, double x) const { return h(orbit(theta), x); }

    MassInterval segment(long n) const;

    std::pair<double, double> f(double theta, double y) const;
    std::pair<double, double> fhat(double theta, double x) const;
    std::pair<double, double> fhat_inv(double theta, double x) const;

    /// sup over `count` fibres of the circle gaps of h and f-hat across x = 0.
    double glue_residual(long count) const;

private:
    double term(const FibreOrbit& o, long n, double y, bool left,
                std::optional<bool> star_above) const;

    double omega_, rho_, theta_star_, x_star_;
    WeightSequence weights_;
    long N_;
    long radius_;
    double leb_;
    PinchFunctions<double> pinch_;
    std::vector<MassInterval> segments_;  // |n| <= N + 1
    int steps_;
};

/// Throws DomainError when k1 omega + k2 rho is within `tol` of an integer for
/// some 0 < max(|k1|, |k2|) <= bound, BasepointError when some x*_n, |n| <= N,
/// is within 1e-9 of the cut.
ReesSystem build_rees(double omega = golden_mean, double rho = 0.41421356237309503,
                      double theta_star = 0.3, double x_star = 0.25,
                      WeightSequence weights = WeightSequence(), long N = 40);

double torus_distance(std::pair<double, double> p, std::pair<double, double> q);

struct DistalityRecord {
    double min_two_sided = 0.0;
    long argmin_two_sided = 0;
    double min_forward = 0.0;
    long argmin_forward = 0;
    std::vector<double> forward_distance;   // n = 0..K
    std::vector<double> backward_distance;  // n = 0..K (n-th entry at time -n)
};

DistalityRecord distality_probe(const ReesSystem& s, std::pair<double, double> p,
                                std::pair<double, double> q, long K);

// Distality floors measured once on the default configuration (100 control
// pairs over horizon 1000 both ways; one pair over horizon 1e4) and asserted
// as regressions afterwards.
inline constexpr double rees_control_floor = 0.047;
inline constexpr double rees_long_pair_floor = 0.17;


}  // namespace blowup

#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace blowup {

struct Atom {
    double position;  // in [0, 1)
    double mass;      // > 0
};

struct MassInterval {
    double lo;
    double hi;
};

/// Continuous strictly increasing map given by a forward and an inverse oracle.
///
/// Interval maps act on [0,1]. Circle maps (`circle == true`) are carried in
/// cut coordinates: `forward` and `inverse` return values in [0,1) and the
/// cut point 0 is sent to `forward(0)`.
struct MonotoneMapOracle {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    bool circle = false;

    static MonotoneMapOracle identity();
    static MonotoneMapOracle rotation(double shift);
};

/// Probability measure on [0,1] (or on the circle cut at 0) made of finitely
/// many atoms plus an absolutely continuous part given through its CDF.
///
/// The atomic part may be a truncation of a countable one; `tail_bound()`
/// bounds the mass of the omitted atoms.
class HybridMeasure {
public:
    using AcCdf = std::function<double(double)>;

    /// Validates the invariants and sorts the atoms. Throws DomainError on
    /// repeated or out-of-range atoms, nonpositive masses, or a mass budget
    /// that misses `total_mass` by more than tail_bound + 1e-12.
    HybridMeasure(std::vector<Atom> atoms, AcCdf ac_cdf, double tail_bound = 0.0,
                  double total_mass = 1.0);

    static HybridMeasure lebesgue();

    std::span<const Atom> atoms() const { return atoms_; }
    const AcCdf& ac_cdf() const { return ac_; }
    double total_mass() const { return total_mass_; }
    double tail_bound() const { return tail_bound_; }
    bool full_support() const { return full_support_; }

    /// Mass of the atom at exactly y, 0 if none.
    double atom_mass(double y) const;

private:
    std::vector<Atom> atoms_;
    AcCdf ac_;
    double tail_bound_;
    double total_mass_;
    bool full_support_;
};

/// m([0, y]).
double cdf(const HybridMeasure& m, double y);

/// m([0, y)).
double cdf_left(const HybridMeasure& m, double y);

/// min{ y : m[0,y] >= x } up to `tol`, by bisection on the monotone CDF.
double quantile(const HybridMeasure& m, double x, double tol = 1e-12);

/// The fibre of the quantile map over y: [m[0,y), m[0,y]].
MassInterval preimage_interval(const HybridMeasure& m, double y);

/// g_* m. Atoms move to g(position) with unchanged mass.
HybridMeasure pushforward(const HybridMeasure& m, const MonotoneMapOracle& g);

/// Number of bisection steps that brings a unit bracket below `tol`.
int bisection_steps(double tol);

/// Smallest point of the dyadic grid of depth `steps` on [0,1] at which the
/// nondecreasing predicate `reaches(y)` holds. `reaches(1)` is assumed true.
template <class Pred>
double bisect_first(Pred&& reaches, int steps) {
    if (reaches(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < steps; ++i) {
        double mid = 0.5 * (lo + hi);
        if (reaches(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace blowup

#include "blowup/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "blowup/circle.hpp"
#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr int kSupportGrid = 1024;

void check_coordinate(double y) {
    if (!(y >= 0.0 && y <= 1.0)) {
        std::ostringstream os;
        os << "coordinate " << y << " outside [0,1]";
        throw DomainError(os.str());
    }
}

}  // namespace

MonotoneMapOracle MonotoneMapOracle::identity() {
    return {[](double y) { return y; }, [](double y) { return y; }, false};
}

MonotoneMapOracle MonotoneMapOracle::rotation(double shift) {
    return {[shift](double y) { return wrap01(y + shift); },
            [shift](double y) { return wrap01(y - shift); }, true};
}

HybridMeasure::HybridMeasure(std::vector<Atom> atoms, AcCdf ac_cdf, double tail_bound,
                             double total_mass)
    : atoms_(std::move(atoms)),
      ac_(std::move(ac_cdf)),
      tail_bound_(tail_bound),
      total_mass_(total_mass) {
    if (!ac_) throw DomainError("missing absolutely continuous CDF");
    if (tail_bound_ < 0.0) throw DomainError("negative tail bound");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    double atom_total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom& a = atoms_[i];
        if (!(a.position >= 0.0 && a.position < 1.0))
            throw DomainError("atom position outside [0,1)");
        if (!(a.mass > 0.0)) throw DomainError("atom mass must be positive");
        if (i > 0 && atoms_[i - 1].position == a.position)
            throw DomainError("atom positions must be pairwise distinct");
        atom_total += a.mass;
    }
    double unaccounted = total_mass_ - atom_total - ac_(1.0);
    if (unaccounted < -1e-12 || unaccounted > tail_bound_ + 1e-12) {
        std::ostringstream os;
        os << "mass budget off by " << unaccounted << " (tail bound " << tail_bound_ << ")";
        throw DomainError(os.str());
    }

    full_support_ = true;
    double prev = ac_(0.0);
    for (int i = 1; i <= kSupportGrid; ++i) {
        double cur = ac_(static_cast<double>(i) / kSupportGrid);
        if (!(cur > prev)) {
            full_support_ = false;
            break;
        }
        prev = cur;
    }
}

HybridMeasure HybridMeasure::lebesgue() {
    return HybridMeasure({}, [](double y) { return y; });
}

double HybridMeasure::atom_mass(double y) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), y,
                               [](const Atom& a, double v) { return a.position < v; });
    return (it != atoms_.end() && it->position == y) ? it->mass : 0.0;
}

double cdf(const HybridMeasure& m, double y) {
    check_coordinate(y);
    double s = m.ac_cdf()(y);
    for (const Atom& a : m.atoms()) {
        if (a.position > y) break;
        s += a.mass;
    }
    return s;
}

double cdf_left(const HybridMeasure& m, double y) {
    check_coordinate(y);
    double s = m.ac_cdf()(y);
    for (const Atom& a : m.atoms()) {
        if (a.position >= y) break;
        s += a.mass;
    }
    return s;
}

int bisection_steps(double tol) {
    if (!(tol > 0.0)) throw DomainError("quantile tolerance must be positive");
    return std::max(1, static_cast<int>(std::ceil(-std::log2(tol))));
}

double quantile(const HybridMeasure& m, double x, double tol) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("quantile level outside [0,1]");
    if (!m.full_support())
        throw PreconditionError("quantile requires a measure with full topological support");
    return bisect_first([&](double y) { return cdf(m, y) >= x; }, bisection_steps(tol));
}

MassInterval preimage_interval(const HybridMeasure& m, double y) {
    if (!m.full_support())
        throw PreconditionError("preimage interval requires full topological support");
    return {cdf_left(m, y), cdf(m, y)};
}

HybridMeasure pushforward(const HybridMeasure& m, const MonotoneMapOracle& g) {
    if (!g.forward || !g.inverse) throw OracleError("push-forward needs forward and inverse");
    std::vector<Atom> moved;
    moved.reserve(m.atoms().size());
    for (const Atom& a : m.atoms()) {
        double p = g.forward(a.position);
        if (!std::isfinite(p)) throw OracleError("forward map failed on an atom");
        moved.push_back({p, a.mass});
    }

    HybridMeasure::AcCdf ac = m.ac_cdf();
    HybridMeasure::AcCdf moved_ac;
    if (!g.circle) {
        auto inv = g.inverse;
        moved_ac = [ac, inv](double y) {
            double u = inv(y);
            if (!std::isfinite(u)) throw OracleError("inverse map evaluation failed");
            return ac(std::clamp(u, 0.0, 1.0));
        };
    } else {
        // The new cut sits at the preimage of 0; mass is counted from there.
        auto inv = g.inverse;
        double cut = inv(0.0);
        double ac_cut = ac(cut);
        double ac_total = ac(1.0);
        moved_ac = [ac, inv, cut, ac_cut, ac_total](double y) {
            if (y >= 1.0) return ac_total;
            double u = inv(y);
            if (!std::isfinite(u)) throw OracleError("inverse map evaluation failed");
            double v = ac(u) - ac_cut;
            return u < cut ? v + ac_total : v;
        };
    }
    return HybridMeasure(std::move(moved), std::move(moved_ac), m.tail_bound(), m.total_mass());
}

}  // namespace blowup

#include "blowup/weights.hpp"

#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

WeightSequence::WeightSequence(double c, double r) : c_(c), r_(r) {
    if (!(c > 0.0)) throw DomainError("weight scale c must be positive");
    if (!(r > 0.0 && r < 1.0)) throw DomainError("weight ratio r must lie in (0,1)");
    if (!(total() < 1.0)) throw DomainError("weights must sum to less than 1");
}

double WeightSequence::operator()(long n) const {
    return c_ * std::pow(r_, static_cast<double>(std::labs(n)));
}

double WeightSequence::total() const { return c_ * (1.0 + r_) / (1.0 - r_); }

double WeightSequence::tail(long N) const {
    if (N < 0) return total();
    return 2.0 * c_ * std::pow(r_, static_cast<double>(N + 1)) / (1.0 - r_);
}

double WeightSequence::partial(long N) const {
    if (N < 0) return 0.0;
    // summed smallest first
    double s = 0.0;
    for (long n = N; n >= 1; --n) s += 2.0 * (*this)(n);
    return s + c_;
}

}  // namespace blowup

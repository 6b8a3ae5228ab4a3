#pragma once

#include <cstdlib>

namespace blowup {

/// Blow-up weights a_n = c * r^|n|, n in Z, with closed-form partial sums.
class WeightSequence {
public:
    /// Throws DomainError unless c > 0, 0 < r < 1 and the total stays below 1.
    explicit WeightSequence(double c = 0.25, double r = 1.0 / 3.0);

    double c() const { return c_; }
    double r() const { return r_; }

    double operator()(long n) const;

    /// sum over all n of a_n
    double total() const;
    /// 1 - total()
    double b() const { return 1.0 - total(); }
    /// sum over |n| > N of a_n; N = -1 gives total().
    double tail(long N) const;
    /// sum over |n| <= N of a_n
    double partial(long N) const;
    /// Lebesgue coefficient after folding the omitted tail back in: b + tail(N).
    double lebesgue_coefficient(long N) const { return 1.0 - partial(N); }

    WeightSequence scaled(double factor) const { return WeightSequence(c_ * factor, r_); }

private:
    double c_;
    double r_;
};

}  // namespace blowup

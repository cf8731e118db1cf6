#pragma once

#include <cstddef>

namespace heurreg {

// Neumaier's compensated accumulator.  Results depend only on the order in
// which terms are added, never on chunking, so every reduction in the library
// runs it sequentially over a fixed index order.
class compensated_sum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (abs_(sum_) >= abs_(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    static double abs_(double v) { return v < 0 ? -v : v; }
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Compensated sum of f(i) for i in [0, n), in index order.
template <class F>
double sum_indexed(std::size_t n, F&& f) {
    compensated_sum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(f(i));
    return acc.value();
}

} // namespace heurreg

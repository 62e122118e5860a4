#ifndef ZIC_NUMERIC_HPP
#define ZIC_NUMERIC_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace zic {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2PiE = 2.8378770664093454836;  // ln(2*pi*e)

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> geomspace(double lo, double hi, std::size_t n);

// Entropy of N(0, v) in nats.
double gaussian_entropy(double variance);

// Counter-based generator: draw i of stream s is a pure function of (seed, s, i).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}
    std::uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);
    double normal();
    std::uint64_t counter() const { return counter_; }
    CounterRng substream(std::uint64_t s) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Number of worker threads; ZIC_THREADS caps it.
unsigned worker_count();

// Runs body(i) for i in [0, n); results must be written by index for determinism.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Least squares solve of the columns in `basis` against y (normal equations via QR).
std::vector<double> least_squares(const std::vector<std::vector<double>>& basis, const std::vector<double>& y);

// Slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Bisection for a sign change of f on [a, b].
double bisect(const std::function<double(double)>& f, double a, double b, double xtol = 1e-13, int max_iter = 200);

}  // namespace zic

#endif

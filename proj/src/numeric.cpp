#include "zic/numeric.hpp"

#include "zic/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace zic {

void CompensatedSum::add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    require(n >= 1, "linspace needs n >= 1");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    double h = (hi - lo) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + h * double(i);
    v[n - 1] = hi;
    return v;
}

std::vector<double> geomspace(double lo, double hi, std::size_t n) {
    require(lo > 0 && hi > 0, "geomspace needs positive endpoints");
    auto e = linspace(std::log(lo), std::log(hi), n);
    for (auto& x : e) x = std::exp(x);
    if (n > 1) {
        e.front() = lo;
        e.back() = hi;
    }
    return e;
}

double gaussian_entropy(double variance) { return 0.5 * (kLn2PiE + std::log(variance)); }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t CounterRng::next_u64() {
    std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream_ + 0x632be59bd9b4e019ULL));
    return splitmix64(key + counter_++ * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

CounterRng CounterRng::substream(std::uint64_t s) const {
    return CounterRng(seed_, splitmix64(stream_ * 0x100000001b3ULL + s + 1));
}

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ZIC_THREADS")) {
        try {
            long cap = std::stol(env);
            if (cap >= 1) hw = std::min<unsigned>(hw, unsigned(cap));
        } catch (...) {
        }
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned w = std::min<std::size_t>(worker_count(), n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& basis, const std::vector<double>& y) {
    require(!basis.empty(), "least_squares needs at least one column");
    const auto m = y.size();
    const auto k = basis.size();
    require(m >= k, "least_squares needs at least as many rows as columns");
    Eigen::MatrixXd a(m, k);
    Eigen::VectorXd b(m);
    for (std::size_t j = 0; j < k; ++j) {
        require(basis[j].size() == m, "least_squares column length mismatch");
        for (std::size_t i = 0; i < m; ++i) a(i, j) = basis[j][i];
    }
    for (std::size_t i = 0; i < m; ++i) b(i) = y[i];
    // column scaling keeps the powers of t comparable
    Eigen::VectorXd s(k);
    for (std::size_t j = 0; j < k; ++j) {
        s(j) = a.col(j).norm();
        if (s(j) == 0.0) s(j) = 1.0;
        a.col(j) /= s(j);
    }
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    std::vector<double> out(k);
    for (std::size_t j = 0; j < k; ++j) out[j] = x(j) / s(j);
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "loglog_slope needs matching inputs");
    std::vector<double> lx(x.size()), ly(y.size()), ones(x.size(), 1.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(std::fabs(y[i]));
    }
    return least_squares({ones, lx}, ly)[1];
}

double bisect(const std::function<double(double)>& f, double a, double b, double xtol, int max_iter) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    require((fa < 0) != (fb < 0), "bisect needs a sign change");
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace zic

#include "hmcf/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace hmcf {

namespace {

// FFTW plan creation/destruction is not thread-safe; executing distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class FftWorkspace {
  public:
    explicit FftWorkspace(int n) : n_(n) {
        real_ = fftw_alloc_real(n);
        spec_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
    }

    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(bwd_);
        fftw_destroy_plan(fwd_);
        fftw_free(spec_);
        fftw_free(real_);
    }

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    void derivative(std::span<const double> in, int order, std::span<double> out) {
        const int nc = n_ / 2 + 1;
        const double scale = 1.0 / n_;
        for (int j = 0; j < n_; ++j) real_[j] = in[j];
        fftw_execute(fwd_);
        if (order == 1) {
            for (int k = 0; k < nc; ++k) {
                const double re = spec_[k][0];
                const double im = spec_[k][1];
                spec_[k][0] = -scale * k * im;
                spec_[k][1] = scale * k * re;
            }
            spec_[nc - 1][0] = 0.0; // Nyquist
            spec_[nc - 1][1] = 0.0;
        } else {
            for (int k = 0; k < nc; ++k) {
                const double f = -scale * static_cast<double>(k) * k;
                spec_[k][0] *= f;
                spec_[k][1] *= f;
            }
        }
        fftw_execute(bwd_);
        for (int j = 0; j < n_; ++j) out[j] = real_[j];
    }

    void lowpass_two_thirds(std::span<const double> in, std::span<double> out) {
        const int nc = n_ / 2 + 1;
        const double scale = 1.0 / n_;
        for (int j = 0; j < n_; ++j) real_[j] = in[j];
        fftw_execute(fwd_);
        const int cutoff = n_ / 3;
        for (int k = 0; k < nc; ++k) {
            const double f = (k > cutoff) ? 0.0 : scale;
            spec_[k][0] *= f;
            spec_[k][1] *= f;
        }
        fftw_execute(bwd_);
        for (int j = 0; j < n_; ++j) out[j] = real_[j];
    }

  private:
    int n_;
    double* real_;
    fftw_complex* spec_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

// One workspace per grid size per thread, so concurrent runs never share plans
// or buffers.
FftWorkspace& workspace_for(int n) {
    thread_local std::map<int, std::unique_ptr<FftWorkspace>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<FftWorkspace>(n);
    return *slot;
}

} // namespace

std::vector<double> deriv_theta(const ThetaGrid& grid, std::span<const double> samples,
                                int order) {
    if (static_cast<int>(samples.size()) != grid.size()) {
        throw GridMismatchError("deriv_theta: sample count " + std::to_string(samples.size()) +
                                " does not match grid size " + std::to_string(grid.size()));
    }
    if (order != 1 && order != 2) {
        throw InvalidConfigError("deriv_theta: order must be 1 or 2, got " +
                                 std::to_string(order));
    }
    std::vector<double> out(samples.size());
    workspace_for(grid.size()).derivative(samples, order, out);
    return out;
}

double integrate(const ThetaGrid& grid, std::span<const double> samples) {
    if (static_cast<int>(samples.size()) != grid.size()) {
        throw GridMismatchError("integrate: sample count does not match grid size");
    }
    double sum = 0.0;
    for (double v : samples) sum += v;
    return grid.spacing() * sum;
}

std::vector<double> dealias_two_thirds(const ThetaGrid& grid, std::span<const double> samples) {
    if (static_cast<int>(samples.size()) != grid.size()) {
        throw GridMismatchError("dealias_two_thirds: sample count does not match grid size");
    }
    std::vector<double> out(samples.size());
    workspace_for(grid.size()).lowpass_two_thirds(samples, out);
    return out;
}

std::vector<double> fd_weights(std::span<const double> x, double x0, int m) {
    const int n = static_cast<int>(x.size());
    if (n < m + 1) {
        throw InvalidConfigError("fd_weights: need at least m+1 nodes");
    }
    // Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    w[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    w[k][i] = c1 * (k * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                w[k][j] = ((x[i] - x0) * w[k][j] - k * w[k - 1][j]) / c3;
            }
            w[0][j] = (x[i] - x0) * w[0][j] / c3;
        }
        c1 = c2;
    }
    return w[m];
}

} // namespace hmcf

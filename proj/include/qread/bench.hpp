#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qread/gridfn.hpp"
#include "qread/readout_qae.hpp"
#include "qread/readout_sampling.hpp"

namespace qread {

struct TestFunction {
    std::string name;
    GridSpec spec;
    std::vector<double> values;
    std::function<double(const std::vector<double>&)> eval;  // closed form, if any

    GridFunction grid() const { return {spec, values}; }
};

// two off-center Gaussian bumps on [0,1]^2 (smooth, non-periodic boundary)
TestFunction make_gaussian2d(int n0 = 9);
// sin(2 pi x) sin(2 pi y) + 1 on [0,1]^2 (smooth, periodic, nonnegative)
TestFunction make_sine2d(int n0 = 9);
// f(x) = x on [0,1) (periodic wrap has a jump)
TestFunction make_ramp1d(int n0 = 9);
TestFunction test_function_from_grid(const std::string& name, const GridFunction& g);

enum class AbscissaKind { Shots, Queries, BlockM, GridN };
std::string abscissa_kind_name(AbscissaKind kind);

struct ScalingPoint {
    double abscissa = 0.0;  // shots / M0 / N; measured median queries for QAE
    std::vector<double> errors;
    std::vector<uint64_t> seeds;
    double median_error = 0.0;
};

struct ScalingRun {
    std::string method;
    AbscissaKind kind = AbscissaKind::Shots;
    std::vector<ScalingPoint> points;
    double slope = 0.0;
    double slope_stderr = 0.0;
    bool fitted = false;
};

struct BenchOptions {
    int repeats = 5;
    uint64_t seed = 1;
    int jobs = 0;  // 0 = hardware concurrency

    // sampling methods
    int fsr_p_hat = 2;
    double fsr_tau = 4.0;
    std::optional<std::vector<uint64_t>> fixed_m;
    bool tune_m = true;  // ARSR (and fixed-M FSR sweeps): pick M minimizing the true error
    double shift = 0.0;

    // QAE methods
    double gamma = 0.05;
    double q = 2.0;
    uint64_t qae_m_max = 16;  // tuning reuses sub-blocks of one run at this size
};

// method: rsr | arsr | fsr | extfsr (kind Shots or BlockM),
//         fsqae | fsqae2 (kind Queries; abscissas are the eps0 list).
ScalingRun run_scaling_experiment(const std::string& method, const TestFunction& fn,
                                  AbscissaKind kind, const std::vector<double>& abscissas,
                                  const BenchOptions& opt);

// ordinary least squares on (log10 x, log10 y); returns {slope, stderr}
std::pair<double, double> fit_loglog_slope(const std::vector<double>& x,
                                           const std::vector<double>& y);
void fit_scaling_run(ScalingRun& run);

// Post-processing study: RSR histograms at each grid size, each average with
// its error-minimizing block, errors vs total grid number N.
struct PostprocStudy {
    std::vector<double> grid_n;                       // total N per size
    std::vector<std::string> methods;                 // rms, mean, sharm, fmf
    std::vector<std::vector<double>> errors;          // [method][size]
    std::vector<double> slopes;                       // fitted vs N
};
PostprocStudy run_postproc_study(const std::function<double(double, double)>& f,
                                 const std::vector<int>& n0_list, uint64_t shots,
                                 uint64_t seed, int jobs = 0);

// Closed-form shot estimates with N = eps^-d.
//   rsr:  eps^-(2+d)
//   arsr: eps^-(2+d/2) for continuous piecewise W21, rsr-equal for W11
//   fsr:  eps^-(2+s) * ln(1/eps)^(c(d-1)), s = 2/(2p-1), c = 1 (p=1), 1/2 (p>=2)
enum class RegularityClass { W11, W21 };
double estimate_required_shots(const std::string& method, int d, double eps,
                               RegularityClass cls);

double round_sig(double v, int digits);

}  // namespace qread

#pragma once

// Received-signal synthesis, the maximum-likelihood range statistic
// Lambda(rho), grid-plus-golden-section range estimation and the Monte
// Carlo RMSE harness.
//
// Lambda evaluation comes in two flavors with identical semantics:
//   ml_statistic      - direct discretization of the defining integrals;
//                       reference path, used by tests and small studies.
//   MlEvaluator       - per-pair matched-filter tables computed once per
//                       batch, then band-limited interpolation per
//                       hypothesis; used by the search and the harness.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "nfre/array_geometry.hpp"
#include "nfre/common.hpp"
#include "nfre/detail/sinc_interp.hpp"
#include "nfre/scenario.hpp"

namespace nfre {

struct SynthesisOptions {
  // Pulse margin kept on each side of the covered delays, in units of 1/B
  // (clamped to the waveform's tabulated support).
  double window_lobes = 128.0;
  // Hypothesis interval the window must additionally cover; 0 -> true range.
  double coverage_min = 0.0;
  double coverage_max = 0.0;
};

struct ReceivedBatch {
  // One complex sample vector per antenna pair, receive-major:
  // samples[l' * N_t + l][n] at t = t_start + n / sample_rate.
  std::vector<std::vector<cplx>> samples;
  double sample_rate = 0.0;
  double t_start = 0.0;
  size_t n_samples = 0;
  double pulse_margin = 0.0;  // seconds of pulse support covered around a delay
  std::uint64_t seed = 0;

  double t_end() const { return t_start + static_cast<double>(n_samples - 1) / sample_rate; }
};

// Noisy received signals u = xi e^{-jkr} s(t - r/c) + w per antenna pair,
// with exact-model distances for the truth and white complex noise of PSD
// gamma_n (per-sample variance gamma_n * f_s). Deterministic per seed.
inline ReceivedBatch synthesize(const Scenario& s, double sample_rate, std::uint64_t seed,
                                const SynthesisOptions& options = {}) {
  s.validate();
  const double bandwidth = s.waveform.bandwidth();
  detail::require(sample_rate >= 2.0 * bandwidth,
                  "synthesize: sample rate below 2B undersamples the waveform");
  const double cover_lo =
      options.coverage_min > 0.0 ? std::min(options.coverage_min, s.range) : s.range;
  const double cover_hi =
      options.coverage_max > 0.0 ? std::max(options.coverage_max, s.range) : s.range;

  const TargetModel exact{s.target.kind, DistanceMode::exact};
  double d_lo = std::numeric_limits<double>::infinity();
  double d_hi = -std::numeric_limits<double>::infinity();
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      d_lo = std::min(d_lo, propagation_distance(exact, cover_lo, z, y) / speed_of_light);
      d_hi = std::max(d_hi, propagation_distance(exact, cover_hi, z, y) / speed_of_light);
    }
  }
  ReceivedBatch batch;
  batch.sample_rate = sample_rate;
  batch.pulse_margin =
      std::min(options.window_lobes / bandwidth, s.waveform.time_halfwidth());
  batch.t_start = d_lo - batch.pulse_margin;
  batch.n_samples = static_cast<size_t>(
                        std::ceil((d_hi - d_lo + 2.0 * batch.pulse_margin) * sample_rate)) +
                    1;
  batch.seed = seed;

  const double k = s.wavenumber();
  const double dt = 1.0 / sample_rate;
  std::mt19937_64 rng(seed);
  const double component_sigma = std::sqrt(s.noise_psd * sample_rate / 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  batch.samples.reserve(s.array.pair_count());
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      const double r = propagation_distance(exact, s.range, z, y);
      const cplx amp = s.gain * std::polar(1.0, -k * r);
      const double delay = r / speed_of_light;
      std::vector<cplx> u(batch.n_samples);
      for (size_t n = 0; n < batch.n_samples; ++n) {
        const double t = batch.t_start + static_cast<double>(n) * dt;
        u[n] = amp * s.waveform.time_sample(t - delay);
      }
      if (component_sigma > 0.0) {
        for (size_t n = 0; n < batch.n_samples; ++n) {
          const double re = gauss(rng), im = gauss(rng);
          u[n] += cplx(component_sigma * re, component_sigma * im);
        }
      }
      batch.samples.push_back(std::move(u));
    }
  }
  return batch;
}

namespace detail {

inline void check_window(const ReceivedBatch& batch, double delay) {
  const double slack = 0.5 / batch.sample_rate;
  if (delay - batch.pulse_margin < batch.t_start - slack ||
      delay + batch.pulse_margin > batch.t_end() + slack) {
    throw window_coverage_error(
        "hypothesized delay pushes the signal model outside the sampled window");
  }
}

}  // namespace detail

// Lambda(rho) = |sum_p int u mu_p* dt| / sqrt(sum_p int |mu_p|^2 dt),
// discretized at the batch sample rate. The hypothesis model mu uses the
// scenario's target model.
inline double ml_statistic(const ReceivedBatch& batch, const Scenario& s, double rho) {
  detail::require(rho > 0.0, "ml_statistic: hypothesized range must be positive");
  detail::require(batch.samples.size() == s.array.pair_count(),
                  "ml_statistic: batch shape does not match the array");
  const double k = s.wavenumber();
  const double dt = 1.0 / batch.sample_rate;
  cplx num{0.0, 0.0};
  double den = 0.0;
  size_t pair = 0;
  for (double y : s.array.rx_positions) {
    for (double z : s.array.tx_positions) {
      const double rho_p = propagation_distance(s.target, rho, z, y);
      const double delay = rho_p / speed_of_light;
      detail::check_window(batch, delay);
      const std::vector<cplx>& u = batch.samples[pair++];
      cplx corr{0.0, 0.0};
      double energy = 0.0;
      for (size_t n = 0; n < batch.n_samples; ++n) {
        const double t = batch.t_start + static_cast<double>(n) * dt;
        const cplx sv = s.waveform.time_sample(t - delay);
        corr += u[n] * std::conj(sv);
        energy += std::norm(sv);
      }
      num += std::polar(1.0, k * rho_p) * corr * dt;
      den += energy * dt;
    }
  }
  if (den <= 0.0) {
    throw window_coverage_error("ml_statistic: hypothesis model has no energy in the window");
  }
  return std::abs(num) / std::sqrt(den);
}

// Precomputed matched-filter tables for fast repeated Lambda evaluation on
// one batch over a hypothesis interval.
class MlEvaluator {
 public:
  MlEvaluator(const ReceivedBatch& batch, const Scenario& s, double rho_min, double rho_max)
      : scenario_(&s), batch_(&batch), kernel_(&detail::interp_kernel_64()) {
    detail::require(rho_min > 0.0 && rho_max >= rho_min, "MlEvaluator: bad hypothesis interval");
    detail::require(batch.samples.size() == s.array.pair_count(),
                    "MlEvaluator: batch shape does not match the array");
    const double fs = batch.sample_rate;
    const int guard = kernel_->taps() / 2 + 2;
    const auto n = static_cast<std::ptrdiff_t>(batch.n_samples);

    // Pair delay windows at the interval ends (distances increase with rho).
    const size_t pairs = s.array.pair_count();
    j_lo_.resize(pairs);
    tables_.resize(pairs);
    std::ptrdiff_t j_min = std::numeric_limits<std::ptrdiff_t>::max();
    std::ptrdiff_t j_max = std::numeric_limits<std::ptrdiff_t>::min();
    std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> spans(pairs);
    {
      size_t pair = 0;
      for (double y : s.array.rx_positions) {
        for (double z : s.array.tx_positions) {
          const double d0 = propagation_distance(s.target, rho_min, z, y) / speed_of_light;
          const double d1 = propagation_distance(s.target, rho_max, z, y) / speed_of_light;
          detail::check_window(batch, d0);
          detail::check_window(batch, d1);
          const auto lo =
              static_cast<std::ptrdiff_t>(std::floor((d0 - batch.t_start) * fs)) - guard;
          const auto hi =
              static_cast<std::ptrdiff_t>(std::ceil((d1 - batch.t_start) * fs)) + guard;
          spans[pair++] = {lo, hi};
          j_min = std::min(j_min, lo);
          j_max = std::max(j_max, hi);
        }
      }
    }

    // Model samples on the batch grid. The correlation below only ever
    // shifts by whole samples; fractional delays are recovered by
    // band-limited interpolation of the correlation itself.
    const std::ptrdiff_t m_lo = -j_max;
    const std::ptrdiff_t m_hi = n - 1 - j_min;
    const auto m_count = static_cast<size_t>(m_hi - m_lo + 1);
    const bool real_model = s.waveform.kind() == WaveformKind::cardinal_sine;
    std::vector<double> model_re(m_count);
    std::vector<cplx> model_cx(real_model ? 0 : m_count);
    const double dt = 1.0 / fs;
    for (size_t i = 0; i < m_count; ++i) {
      const double t = static_cast<double>(m_lo + static_cast<std::ptrdiff_t>(i)) * dt;
      const cplx v = s.waveform.time_sample(t);
      if (real_model) {
        model_re[i] = v.real();
      } else {
        model_cx[i] = v;
      }
    }

    // Shared hypothesis-energy table over the union of pair spans.
    energy_j0_ = j_min;
    energy_.assign(static_cast<size_t>(j_max - j_min + 1), 0.0);
    for (size_t ji = 0; ji < energy_.size(); ++ji) {
      const std::ptrdiff_t j = j_min + static_cast<std::ptrdiff_t>(ji);
      double e = 0.0;
      if (real_model) {
        for (std::ptrdiff_t m = 0; m < n; ++m) {
          const double v = model_re[static_cast<size_t>(m - j - m_lo)];
          e += v * v;
        }
      } else {
        for (std::ptrdiff_t m = 0; m < n; ++m) {
          e += std::norm(model_cx[static_cast<size_t>(m - j - m_lo)]);
        }
      }
      energy_[ji] = e * dt;
    }

    // Per-pair correlation tables q_p(j) = sum_n u[n] s*(t_n - j/fs) / fs.
    for (size_t pair = 0; pair < pairs; ++pair) {
      const auto [lo, hi] = spans[pair];
      j_lo_[pair] = lo;
      auto& table = tables_[pair];
      table.assign(static_cast<size_t>(hi - lo + 1), cplx{0.0, 0.0});
      const std::vector<cplx>& u = batch.samples[pair];
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        const size_t base = static_cast<size_t>(-j - m_lo);
        double acc_re = 0.0, acc_im = 0.0;
        if (real_model) {
          const double* sm = model_re.data() + base;
          for (size_t nn = 0; nn < batch.n_samples; ++nn) {
            acc_re += u[nn].real() * sm[nn];
            acc_im += u[nn].imag() * sm[nn];
          }
        } else {
          const cplx* sm = model_cx.data() + base;
          for (size_t nn = 0; nn < batch.n_samples; ++nn) {
            const cplx term = u[nn] * std::conj(sm[nn]);
            acc_re += term.real();
            acc_im += term.imag();
          }
        }
        table[static_cast<size_t>(j - lo)] = cplx(acc_re * dt, acc_im * dt);
      }
    }
  }

  double operator()(double rho) const {
    detail::require(rho > 0.0, "MlEvaluator: hypothesized range must be positive");
    const Scenario& s = *scenario_;
    const double k = s.wavenumber();
    const double fs = batch_->sample_rate;
    cplx num{0.0, 0.0};
    double den = 0.0;
    size_t pair = 0;
    for (double y : s.array.rx_positions) {
      for (double z : s.array.tx_positions) {
        const double rho_p = propagation_distance(s.target, rho, z, y);
        const double dj = (rho_p / speed_of_light - batch_->t_start) * fs;
        const auto& table = tables_[pair];
        const double x = dj - static_cast<double>(j_lo_[pair]);
        const auto tn = static_cast<std::ptrdiff_t>(table.size());
        if (!kernel_->covered(tn, x)) {
          throw window_coverage_error(
              "MlEvaluator: hypothesis outside the prepared interval");
        }
        num += std::polar(1.0, k * rho_p) * (*kernel_)(table.data(), tn, x);
        den += (*kernel_)(energy_.data(), static_cast<std::ptrdiff_t>(energy_.size()),
                          dj - static_cast<double>(energy_j0_));
        ++pair;
      }
    }
    return std::abs(num) / std::sqrt(den);
  }

 private:
  const Scenario* scenario_;
  const ReceivedBatch* batch_;
  const detail::SincKernel* kernel_;
  std::vector<std::ptrdiff_t> j_lo_;
  std::vector<std::vector<cplx>> tables_;
  std::ptrdiff_t energy_j0_ = 0;
  std::vector<double> energy_;
};

struct SearchSpec {
  double rho_min = 0.0;
  double rho_max = 0.0;
  double coarse_step = 0.0;  // 0 -> c/(4B)
  double refine_tol = 0.0;   // 0 -> 1e-4 c/(4B)
  bool keep_grid = true;
};

struct EstimationResult {
  double r_hat = 0.0;
  double lambda_peak = 0.0;
  bool boundary_warning = false;
  std::vector<std::pair<double, double>> grid;  // coarse (rho, Lambda) table
};

namespace detail {

template <typename F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, double tol) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best_x = f1 > f2 ? x1 : x2;
  double best_f = std::max(f1, f2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
    if (f1 > best_f) best_f = f1, best_x = x1;
    if (f2 > best_f) best_f = f2, best_x = x2;
  }
  // The bracket midpoint bounds the argmax error by tol/2.
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm >= best_f) return {mid, fm};
  return {best_x, best_f};
}

}  // namespace detail

// Two-stage search: coarse grid at waveform-lobe resolution, then
// golden-section refinement around the coarse peak. A peak on the grid
// boundary sets the boundary warning instead of failing.
inline EstimationResult estimate_range(const ReceivedBatch& batch, const Scenario& s,
                                       const SearchSpec& search) {
  detail::require(search.rho_min > 0.0 && search.rho_max > search.rho_min,
                  "estimate_range: search interval is empty");
  const double span = search.rho_max - search.rho_min;
  const double lobe_step = speed_of_light / (4.0 * s.waveform.bandwidth());
  const double step_req = search.coarse_step > 0.0 ? search.coarse_step : lobe_step;
  const auto points = static_cast<size_t>(std::ceil(span / step_req)) + 1;
  detail::require(points >= 3, "estimate_range: grid needs at least 3 points");
  const double step = span / static_cast<double>(points - 1);
  const double tol = search.refine_tol > 0.0 ? search.refine_tol : 1e-4 * lobe_step;

  MlEvaluator evaluate(batch, s, search.rho_min, search.rho_max);
  EstimationResult result;
  size_t best = 0;
  double best_value = -1.0;
  std::vector<double> values(points);
  for (size_t i = 0; i < points; ++i) {
    const double rho = search.rho_min + static_cast<double>(i) * step;
    values[i] = evaluate(rho);
    if (values[i] > best_value) {
      best_value = values[i];
      best = i;
    }
    if (search.keep_grid) result.grid.emplace_back(rho, values[i]);
  }
  result.boundary_warning = (best == 0 || best + 1 == points);

  const double peak_rho = search.rho_min + static_cast<double>(best) * step;
  const double lo = std::max(search.rho_min, peak_rho - step);
  const double hi = std::min(search.rho_max, peak_rho + step);
  auto [r_hat, lambda] = detail::golden_section_max(evaluate, lo, hi, tol);
  if (best_value > lambda) {
    r_hat = peak_rho;
    lambda = best_value;
  }
  result.r_hat = r_hat;
  result.lambda_peak = lambda;
  return result;
}

struct MonteCarloResult {
  double rmse = 0.0;  // over trials inside the outlier gate
  double bias = 0.0;
  std::vector<double> estimates;  // all trials, in trial order
  double outlier_fraction = 0.0;
  size_t boundary_failures = 0;
  size_t trials_kept = 0;
  double outlier_gate = 0.0;  // meters, 3x waveform main-lobe half width
};

// Repeated synthesize + estimate with per-trial seeds seed xor t; the result
// is independent of how trials are scheduled across threads.
inline MonteCarloResult monte_carlo(const Scenario& s, size_t trials, double sample_rate,
                                    const SearchSpec& search, std::uint64_t seed,
                                    unsigned threads = 0) {
  detail::require(trials >= 1, "monte_carlo: need at least one trial");
  SynthesisOptions synth;
  synth.coverage_min = search.rho_min;
  synth.coverage_max = search.rho_max;

  std::vector<double> estimates(trials);
  std::vector<unsigned char> boundary(trials, 0);
  const auto run_range = [&](size_t lo, size_t hi) {
    for (size_t t = lo; t < hi; ++t) {
      const ReceivedBatch batch =
          synthesize(s, sample_rate, seed ^ static_cast<std::uint64_t>(t), synth);
      SearchSpec per_trial = search;
      per_trial.keep_grid = false;
      const EstimationResult est = estimate_range(batch, s, per_trial);
      estimates[t] = est.r_hat;
      boundary[t] = est.boundary_warning ? 1 : 0;
    }
  };

  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<size_t>(n_threads, trials));
  if (n_threads <= 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (trials + n_threads - 1) / n_threads;
    for (unsigned w = 0; w < n_threads; ++w) {
      const size_t lo = w * chunk;
      const size_t hi = std::min(trials, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  MonteCarloResult out;
  out.estimates = std::move(estimates);
  out.outlier_gate = 3.0 * speed_of_light / (2.0 * s.waveform.bandwidth());
  double sq = 0.0, sum = 0.0;
  for (size_t t = 0; t < trials; ++t) {
    out.boundary_failures += boundary[t];
    const double err = out.estimates[t] - s.range;
    if (std::abs(err) > out.outlier_gate) continue;
    sq += err * err;
    sum += err;
    ++out.trials_kept;
  }
  out.outlier_fraction =
      static_cast<double>(trials - out.trials_kept) / static_cast<double>(trials);
  if (out.trials_kept > 0) {
    out.rmse = std::sqrt(sq / static_cast<double>(out.trials_kept));
    out.bias = sum / static_cast<double>(out.trials_kept);
  } else {
    out.rmse = std::numeric_limits<double>::quiet_NaN();
    out.bias = std::numeric_limits<double>::quiet_NaN();
    warn("monte_carlo: every trial fell outside the outlier gate");
  }
  return out;
}

}  // namespace nfre

#include <cmath>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "tqp/open_system.hpp"

namespace tqp {

double cooling_rate(double eta, double nu, double gamma_dc, double gamma_dp, double delta, double omega) {
  const double o2 = omega * omega;
  const double num = 4.0 * eta * eta * nu * nu * gamma_dc * gamma_dp * delta * o2;
  const double den = nu * (gamma_dp * gamma_dp + delta * delta + o2) *
                     (gamma_dc * (gamma_dp * gamma_dp + delta * delta) + gamma_dp * o2);
  return den > 0.0 ? num / den : 0.0;
}

namespace {

// The peak is flat to rounding within ~sqrt(eps) in log variables.
constexpr double kSimplexSize = 1e-6;

struct CoolingArgs {
  const NoiseParams* noise;
};

double negative_rate(const gsl_vector* x, void* params) {
  const auto* args = static_cast<const CoolingArgs*>(params);
  const NoiseParams& n = *args->noise;
  const double delta = std::pow(10.0, gsl_vector_get(x, 0));
  const double omega = std::pow(10.0, gsl_vector_get(x, 1));
  return -cooling_rate(n.eta, n.nu, n.gamma_dc, n.gamma_dp, delta, omega);
}

}  // namespace

CoolingReport cooling_comparison(const NoiseParams& noise, double mean_excitation) {
  noise.validate();
  if (!(noise.gamma_dc > 0.0) || !(noise.gamma_dp > 0.0) || !(noise.eta > 0.0)) {
    throw std::invalid_argument("cooling_comparison: eta, gamma_dc and gamma_dp must be positive");
  }
  CoolingReport r;

  // Coarse grid over log10 Δ and log10 Ω.
  constexpr std::size_t kGrid = 32;
  double best = -1.0;
  double best_ld = 0.0;
  double best_lo = 0.0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double ld = r.log_lower + (r.log_upper - r.log_lower) * static_cast<double>(i) / (kGrid - 1);
    for (std::size_t j = 0; j < kGrid; ++j) {
      const double lo = r.log_lower + (r.log_upper - r.log_lower) * static_cast<double>(j) / (kGrid - 1);
      const double g = cooling_rate(noise.eta, noise.nu, noise.gamma_dc, noise.gamma_dp, std::pow(10.0, ld),
                                    std::pow(10.0, lo));
      if (g > best) {
        best = g;
        best_ld = ld;
        best_lo = lo;
      }
    }
  }
  r.grid_points = kGrid * kGrid;

  CoolingArgs args{&noise};
  gsl_multimin_function f{&negative_rate, 2, &args};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, best_ld);
  gsl_vector_set(x, 1, best_lo);
  gsl_vector_set_all(step, 0.2);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(s, &f, x, step);
  int status = GSL_CONTINUE;
  std::size_t iter = 0;
  while (status == GSL_CONTINUE && iter < 2000) {
    ++iter;
    const int step_status = gsl_multimin_fminimizer_iterate(s);
    status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), kSimplexSize);
    if (step_status != GSL_SUCCESS) break;
  }
  const double ld = gsl_vector_get(s->x, 0);
  const double lo = gsl_vector_get(s->x, 1);
  const double fmin = s->fval;
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);

  r.iterations = iter;
  r.converged = status == GSL_SUCCESS;
  if (!r.converged) {
    throw ConvergenceError("cooling_comparison: Nelder-Mead did not converge in " + std::to_string(iter) +
                           " iterations");
  }
  r.delta = std::pow(10.0, ld);
  r.omega = std::pow(10.0, lo);
  r.gamma_c = std::max(-fmin, best);
  r.scaling = noise.eta * noise.eta * noise.nu * noise.gamma_dc / noise.gamma_dp;
  r.ratio = r.gamma_c / r.scaling;
  r.eps_cool = noise.n_th * noise.kappa() / r.gamma_c;
  r.eps_tqp = epsilon_tqp(noise, mean_excitation, noise.eta);
  r.eps_ratio = r.eps_cool > 0.0 ? r.eps_tqp / r.eps_cool : 0.0;
  r.tqp_favoured = mean_excitation < 0.1 * noise.gamma_dp / noise.gamma_dc;
  return r;
}

}  // namespace tqp

#include "polish.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <memory>
#include <random>

namespace poolmech::detail {

namespace {

constexpr double kPenalty = 1e100;
constexpr std::size_t kMaxIterations = 2000;

struct Context {
  const std::function<double(const std::vector<double>&)>* objective;
  std::vector<double> scratch;
};

double minimized(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  for (std::size_t i = 0; i < ctx->scratch.size(); ++i) {
    ctx->scratch[i] = gsl_vector_get(v, i);
  }
  const double value = (*ctx->objective)(ctx->scratch);
  return std::isfinite(value) ? -value : kPenalty;
}

PolishResult run(const std::function<double(const std::vector<double>&)>& objective,
                 const std::vector<double>& start, double step) {
  const std::size_t dim = start.size();
  Context ctx{&objective, std::vector<double>(dim)};
  gsl_multimin_function fn{&minimized, dim, &ctx};

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(dim),
                                                            &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> steps(
      gsl_vector_alloc(dim), &gsl_vector_free);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x.get(), i, start[i]);
  }
  gsl_vector_set_all(steps.get(), step);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)>
      solver(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim),
             &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), steps.get());

  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) {
      break;
    }
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, 1e-12) == GSL_SUCCESS) {
      break;
    }
  }
  PolishResult out{std::vector<double>(dim), 0.0};
  for (std::size_t i = 0; i < dim; ++i) {
    out.x[i] = gsl_vector_get(solver->x, i);
  }
  out.value = objective(out.x);
  return out;
}

}  // namespace

PolishResult maximize_multistart(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& x0, double step, std::size_t starts,
    std::uint64_t seed) {
  PolishResult best{x0, objective(x0)};
  if (x0.empty()) {
    return best;
  }
  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, step);
  for (std::size_t s = 0; s < starts; ++s) {
    std::vector<double> start = x0;
    if (s > 0) {
      for (double& v : start) {
        v += jitter(rng);
      }
    }
    const auto result = run(objective, start, step);
    if (std::isfinite(result.value) &&
        (!std::isfinite(best.value) || result.value > best.value)) {
      best = result;
    }
  }
  gsl_set_error_handler(previous);
  return best;
}

}  // namespace poolmech::detail

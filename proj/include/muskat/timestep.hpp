#pragma once

// Explicit time integrators for autonomous systems y' = F(y): classical RK4,
// the Dormand-Prince 5(4) pair with a PI step-size controller, and a one-stage
// exponential (Duhamel) step for the confined model.

#include "muskat/models.hpp"
#include "muskat/spectral.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace muskat {

using State = std::vector<double>;
using Rhs = std::function<State(const State&)>;

struct StepController {
  double dt = 0.0;        ///< fixed step (rk4, duhamel); initial trial step for rk45, 0 = automatic
  double tol_rel = 1e-8;
  double tol_abs = 1e-10;
  double dt_min = 1e-12;
  double dt_max = 0.1;
  double safety = 0.9;

  /// Throws ParameterError on inconsistent values.
  void validate() const;
};

State rk4_step(const State& y, const Rhs& rhs, double dt);

struct Dopri5Trial {
  State y;     ///< fifth-order solution
  State error; ///< difference to the embedded fourth-order solution
  State k_end; ///< F(y), reusable as the first stage of the next step
};

/// One Dormand-Prince step from y with given first stage k1 = F(y), no control.
Dopri5Trial dopri5_trial(const State& y, const State& k1, const Rhs& rhs, double dt);

/// max_j |e_j| / (tol_abs + tol_rel max(|y_j|, |y_new_j|)).
double mixed_error_norm(const State& error, const State& y, const State& y_new,
                        double tol_rel, double tol_abs);

struct Rk45Result {
  State state;
  double dt_used = 0.0;
  double dt_next = 0.0;
  double error_estimate = 0.0; ///< mixed norm of the accepted step
  std::size_t rejected = 0;
};

/// Adaptive stepper. Keeps the previous error for the PI controller and the
/// FSAL stage of the last accepted step.
class Rk45Stepper {
public:
  explicit Rk45Stepper(StepController controller);

  /// Advances from (t, y) by one accepted step of at most t_limit - t.
  /// Throws StepSizeUnderflow when the step would drop below dt_min.
  Rk45Result step(const State& y, double t, const Rhs& rhs, double t_limit);

  double next_dt() const noexcept { return dt_; }
  std::size_t rejected_total() const noexcept { return rejected_total_; }

private:
  double initial_dt(const State& y, const State& k1, const Rhs& rhs) const;

  StepController c_;
  double dt_ = 0.0;
  double err_prev_ = 1e-4;
  State fsal_y_, fsal_k_;
  std::size_t rejected_total_ = 0;
};

/// Single controlled step with a fresh stepper, starting from controller.dt
/// (or dt_max when unset).
Rk45Result rk45_step(const State& y, const Rhs& rhs, const StepController& controller);

/// f ← e^{-dt C Λ} f + dt e^{-(dt/2) C Λ} NL(f), C = l²/(1+l²).
PeriodicField duhamel_step(const PeriodicField& f, double l, double dt,
                           const SpectralOptions& opts = {});

} // namespace muskat

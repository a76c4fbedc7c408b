#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phibound/models.hpp"
#include "phibound/orlicz.hpp"
#include "phibound/types.hpp"

namespace phib {

enum class NormMethod { analytic, mgf_grid, sample_plug_in, moment_grid, bisection };

std::string_view to_string(NormMethod method) noexcept;

struct NormEstimate {
  double value = 0.0;
  NormMethod method = NormMethod::analytic;
  std::optional<Interval> search_range;  ///< set for every grid-based method
  double argmax = 0.0;  ///< lambda (or p) attaining the supremum; 0 when not applicable
  std::string caveat;

  bool operator==(const NormEstimate&) const = default;
};

/// Search configuration for the tau_phi supremum over lambda.
struct TauSearch {
  double lambda_min = 1e-4;
  double lambda_max = 50.0;
  int grid_points = 400;
  bool require_centered = true;
};

/// tau_phi(X) = sup_{lambda != 0} phi^{-1}(log E e^{lambda X}) / |lambda|.
///
/// Closed form for Gaussian X with quadratic or scaled-quadratic phi;
/// otherwise a log-spaced lambda grid over +-[lambda_min, lambda_max] with
/// golden-section refinement around the best grid point. When the supremum
/// sits at the left edge (lambda -> 0) the edge value is returned.
NormEstimate tau_phi_norm(const RandomModel& model, const OrliczFunction& phi, const TauSearch& search = {});

/// inf{a >= 0 : log E e^{lambda X} <= phi(a lambda) on the lambda grid}, by
/// bisection on a. Evaluates phi only (never phi^{-1}), so it is an
/// independent route to the same number on analytic models.
NormEstimate tau_phi_inf_form(const RandomModel& model, const OrliczFunction& phi, const TauSearch& search = {});

/// Plug-in version of tau_phi_norm: the samples are centred by their mean
/// and log E e^{lambda X} is replaced by the log of the sample mean of
/// e^{lambda X}. Needs >= 1000 samples. The result is a lower estimate.
NormEstimate tau_phi_norm_empirical(std::span<const double> samples, const OrliczFunction& phi,
                                    Interval lambda_range, int grid_points = 400);

/// sup_{1 <= p <= p_max} ||X||_p / phi^{-1}(p) on a 0.25-step grid with
/// golden-section refinement. Requires phi^{-1}(1) = 1 within 1e-9.
NormEstimate moment_orlicz_norm(const RandomModel& model, const OrliczFunction& phi, double p_max = 50.0);

/// psi_1 norm inf{t > 0 : E exp(|X|/t) <= threshold}.
NormEstimate exp_orlicz_norm(const RandomModel& model, double threshold = 2.0);
NormEstimate exp_orlicz_norm(std::span<const double> samples, double threshold = 2.0);

/// ||X - EX||_tau <= 2 ||X||_tau. The right side is evaluated without the
/// centring precondition; for a non-centred X it grows without bound as the
/// lambda grid approaches 0, so it is the grid supremum.
CheckReport centering_inflation_check(const RandomModel& model, const OrliczFunction& phi,
                                      const TauSearch& search = {});

/// Single-column CSV of samples (optional header).
std::vector<double> read_samples_csv(std::istream& in);
void write_samples_csv(std::ostream& out, std::span<const double> samples);

}  // namespace phib

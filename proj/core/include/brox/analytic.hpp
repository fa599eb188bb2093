#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "brox/environment.hpp"
#include "brox/rng.hpp"
#include "brox/scale.hpp"

namespace brox {

// Closed-form quenched laws of the Brox local time at site a, observed at
// first-passage times tau(b) (and increments between tau(b) and tau(c)).
// Transforms use the Laplace convention E[exp(-t X)], t >= 0.

/// L_X(tau(b), a) ~ Exp(lambda), lambda = e^{W(a)} / (2 (s(b) - s(a))).
struct PassageLaw {
  double lambda;
};

/// L_X(tau(c), a) - L_X(tau(b), a): atom of mass alpha at 0, otherwise
/// Exp(lambda) with lambda = e^{W(a)} / (2 (s(c) - s(a))),
/// alpha = (s(b) - s(a)) / (s(c) - s(a)).
struct IncrementLaw {
  double lambda;
  double alpha;
};

/// Atom and absolutely continuous part of the increment law at t.
struct DensityValue {
  double atom_mass;         // alpha at t == 0, else 0
  double continuous_value;  // lambda (1 - alpha) e^{-lambda t}
};

/// Requires 0 < a < b, both on the grid. InvalidArgument / DomainError.
PassageLaw passage_law(const ScaleMap& sm, const Environment& env, double a, double b);

/// Requires 0 < a <= b < c; a == b gives the alpha = 0 passage law at c.
IncrementLaw increment_law(const ScaleMap& sm, const Environment& env, double a, double b,
                           double c);

double passage_cdf(const PassageLaw& law, double t);

DensityValue increment_density(const IncrementLaw& law, double t);

/// Right-continuous, jump of size alpha at 0.
double increment_cdf(const IncrementLaw& law, double t);

/// alpha + (1 - alpha) lambda / (lambda + t); t >= 0.
double increment_mgf(const IncrementLaw& law, double t);

/// The transform written directly in terms of W and s:
/// (e^{W(a)} + 2t(s(b)-s(a))) / (e^{W(a)} + 2t(s(c)-s(a))).
/// Kept separate from increment_mgf so the two can be checked against each other.
double mgf_paper_form(const ScaleMap& sm, const Environment& env, double a, double b, double c,
                      double t);

/// n-th moment of the increment:
/// n! * [2(s(c)-s(b)) e^{-W(a)}] * [2(s(c)-s(a)) e^{-W(a)}]^{n-1}, n >= 1.
double increment_moment(const ScaleMap& sm, const Environment& env, double a, double b, double c,
                        int n);

/// Mean increment 2 (s(c) - s(b)) e^{-W(a)} for each a in a_grid, all in (0, b).
std::vector<double> expected_increment_profile(const ScaleMap& sm, const Environment& env,
                                               double b, double c,
                                               std::span<const double> a_grid);

/// The a maximizing the profile, smallest a on ties. Since the profile is a
/// positive constant times e^{-W(a)}, this is the minimizer of W over a_grid.
double favorite_point(const Environment& env, std::span<const double> a_grid,
                      std::span<const double> profile);

/// Exp(lambda) by inversion.
double sample_passage(const PassageLaw& law, Rng& rng);

/// 0 with probability alpha, else Exp(lambda).
double sample_increment(const IncrementLaw& law, Rng& rng);

nlohmann::json law_to_json(const IncrementLaw& law);

/// `t,atom,density` on `points` evenly spaced t in [0, t_max].
void write_density_csv(const IncrementLaw& law, double t_max, int points, std::ostream& out);
/// `t,cdf` on `points` evenly spaced t in [0, t_max].
void write_cdf_csv(const IncrementLaw& law, double t_max, int points, std::ostream& out);

}  // namespace brox

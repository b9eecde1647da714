#pragma once

// Krasovsky solutions: generators of the Krasovsky set at discontinuity
// points, cross/slide/leave classification, single-manifold sliding and
// branch enumeration.

#include "bcdyn/caratheodory.hpp"
#include "bcdyn/integrator.hpp"
#include "bcdyn/piecewise.hpp"
#include "bcdyn/switching.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcdyn {

struct LimitFieldSet {
  std::vector<Velocities> vertices;
  std::vector<std::string> provenance;
  std::vector<InteractionGraph> graphs;
};

/// Fields of every tie resolution over the manifolds active at x (within tol),
/// deduplicated. A singleton {vector_field(x)} at continuity points.
LimitFieldSet limit_field_vertices(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel,
                                   double tol = 1e-9);

/// 0 in conv(limit_field_vertices(x)) up to hull tolerance `tol`.
bool zero_in_krasovsky(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel, double tol,
                       double tol_active = 1e-9);

/// α with ∇θ·(α f⁻ + (1-α) f⁺) = 0 when it lies in [0, 1]. Both sides tangent gives 1/2.
std::optional<double> sliding_coefficient(const Positions& x, const Manifold& m, const Velocities& f_minus,
                                          const Velocities& f_plus);

struct EventClassification {
  enum class Kind { CrossUp, CrossDown, Slide, Leave };
  Kind kind = Kind::CrossUp;
  double rate_minus = 0.0;  ///< ∇θ·f⁻
  double rate_plus = 0.0;   ///< ∇θ·f⁺
  /// A sliding motion on the manifold is a Krasovsky continuation (attracting or repulsive).
  bool sliding_admissible = false;
  std::optional<double> alpha;
};

std::string to_string(EventClassification::Kind kind);

/// Classification from the side fields built on `base`.
EventClassification classify_event(const Positions& x, const Manifold& m, const InteractionGraph& base,
                                   const InteractionKernel& kernel);
/// Same, with the pointwise graph at x as base.
EventClassification classify_event(const Positions& x, const Manifold& m, const ModelSpec& spec,
                                   const InteractionKernel& kernel);

struct BranchChoice {
  enum class Kind { CrossMinus, CrossPlus, Slide };
  Kind kind = Kind::CrossMinus;
  /// Exit time for slides, measured from the start of the slide; +inf slides forever.
  double exit_time = 0.0;

  static BranchChoice parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const BranchChoice&, const BranchChoice&) = default;
};

struct BranchPolicy {
  enum class Mode { Enumerate, Fixed };
  Mode mode = Mode::Fixed;
  int max_branches = 16;
  int max_depth = 3;
  /// Finite slide exit times offered when enumerating (forever is always offered).
  std::vector<double> exit_times;
  /// Choices consumed in order at decision points with more than one option.
  std::vector<BranchChoice> choices;

  /// "default", "enumerate[:T1,T2,...]", "fixed:c1,c2,..." or a bare choice
  /// list such as "slide" or "slide@1.5,cross_plus".
  static BranchPolicy parse(std::string_view text);
  std::string to_string() const;
  void validate() const;
};

struct KrasovskyOptions {
  double tie_tol = 1e-9;
  double coincide_tol = 1e-12;
  /// Slack on α in [0, 1] before a sliding segment is declared over.
  double alpha_slack = 1e-9;
};

/// Branch tree of Krasovsky solutions; every entry is a full trajectory from
/// x0 with its lineage. Throws BranchOverflowError past policy.max_branches,
/// UnsupportedSlidingError when a second manifold is reached while sliding.
std::vector<PiecewiseTrajectory> simulate_krasovsky(const Configuration& x0, const ModelSpec& spec,
                                                    const InteractionKernel& kernel, const BranchPolicy& policy,
                                                    const StepControl& ctrl, double horizon,
                                                    const KrasovskyOptions& options = {});

struct CertificateReport {
  double max_distance = 0.0;
  int violations = 0;
  int checked = 0;
  double worst_t = 0.0;
  bool passed() const { return violations == 0 && checked > 0; }
};

/// Hull distance from the finite-difference derivative to
/// conv(limit_field_vertices(x(t))) at (at least) n_samples evenly spread samples.
CertificateReport krasovsky_certificate(const Trajectory& traj, const ModelSpec& spec,
                                        const InteractionKernel& kernel, double tol_hull, double tol_active = 1e-7,
                                        int n_samples = 100);

struct SlideExitTargets {
  double x3_at_exit = 0.0;
  /// Limit when agents 1 and 2 stop interacting with agent 3 at the exit.
  Positions stop_interacting_limit;
  /// Limit when the pair keeps interacting after the exit (consensus at the mean).
  Positions interacting_limit;
};

/// Closed-form targets for the three-agent metric family x = (x1, x2, x2 + 1),
/// 0 < x2 - x1 < 1, a ≡ 1, radius 1, sliding on |x3 - x2| = 1 for time T
/// (T may be +inf). Throws UnsupportedError for anything else.
SlideExitTargets slide_exit_targets(const Configuration& x0, double exit_time);

}  // namespace bcdyn

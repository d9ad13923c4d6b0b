#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slim/coefset.hpp"
#include "slim/dataset.hpp"
#include "slim/objective.hpp"

namespace slim {

enum class MipVariant { kStandard, kWeighted, kPilm };
std::string to_string(MipVariant v);
MipVariant parse_mip_variant(const std::string& text);

enum class VarKind { kBinary, kInteger, kContinuous };
enum class Sense { kLe, kGe, kEq };

struct MipVariable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = 0.0;  ///< may be +infinity

  bool operator==(const MipVariable&) const = default;
};

struct MipTerm {
  std::string var;
  double coef = 0.0;

  bool operator==(const MipTerm&) const = default;
};

struct MipConstraint {
  std::string name;
  std::vector<MipTerm> terms;
  Sense sense = Sense::kGe;
  double rhs = 0.0;

  bool operator==(const MipConstraint&) const = default;
};

/// Parameters the model was built with; written into the LP header so a
/// model file can be verified on its own.
struct MipParameters {
  MipVariant variant = MipVariant::kStandard;
  Index n = 0;
  Index p = 0;
  double c0 = 0.0;
  double c1 = 0.0;
  double w_plus = 1.0;
  double w_minus = 1.0;
  double gamma = 0.1;
  std::vector<std::string> feature_names;

  bool operator==(const MipParameters&) const = default;
};

/// Minimize objective subject to linear constraints.
///
/// Variable names: z_i (loss indicator), lam_j (coefficient), alpha_j
/// (nonzero indicator), beta_j (|lam_j|), I_j (penalty of coefficient j),
/// u_j_k (value indicator of a gapped domain), u_j_r_k and s_j_r (tier value
/// and tier indicators).
struct MipModel {
  MipParameters params;
  std::vector<MipVariable> variables;
  std::vector<MipConstraint> constraints;
  std::vector<MipTerm> objective;

  const MipVariable* find_variable(const std::string& name) const;
  const MipConstraint* find_constraint(const std::string& name) const;
  std::size_t count(VarKind kind) const;

  bool operator==(const MipModel&) const = default;
};

/// M_i = gamma + max over the lattice of -y_i x_i . lambda, by per-coefficient interval arithmetic.
std::vector<double> big_m(const Dataset& d, const CoefficientSet& s, double gamma);

/// Smallest positive |score| the data and lattice can produce. With this gamma
/// the exported loss constraints count exactly the examples with margin <= 0.
double score_resolution(const Dataset& d, const CoefficientSet& s);

/// Builds the MIP for the given variant. The standard variant uses unit class
/// weights; the weighted variant uses cfg.w_plus and cfg.w_minus; the pilm
/// variant additionally encodes the tiers of `s`.
MipModel build_model(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, MipVariant variant);

/// CPLEX LP text. Identical models give identical bytes.
std::string to_lp(const MipModel& m);
void write_lp(const MipModel& m, std::ostream& out);
void write_lp(const MipModel& m, const std::string& path);
/// Reads the subset of LP written by write_lp.
MipModel parse_lp(std::istream& in);
MipModel read_lp(const std::string& path);

using Assignment = std::map<std::string, double>;

/// Whitespace-separated "name value" pairs; '#' and '\' start comments.
Assignment read_solution(std::istream& in);
Assignment read_solution_file(const std::string& path);
void write_solution(const Assignment& a, std::ostream& out);

/// Objective of the model at an assignment.
double model_objective(const MipModel& m, const Assignment& a);

/// Name of the first violated bound, integrality condition or constraint
/// (tolerance tol), or nullopt when the assignment is feasible.
std::optional<std::string> first_violation(const MipModel& m, const Assignment& a, double tol = 1e-6);

/// Coefficient vector held by the lam_j variables, rounded to `decimals`.
Eigen::VectorXd extract_lambda(const MipModel& m, const Assignment& a, int decimals = 9);

struct VerifiedSolution {
  Eigen::VectorXd lambda;
  double model_objective = 0.0;
  ObjectiveValue objective;
};

/// Checks feasibility (InfeasibleSolutionError naming the constraint), then
/// recomputes the objective of the extracted coefficients on d and compares
/// it with the model objective (VerificationError beyond 1e-6). Penalties and
/// weights come from the model; `s` supplies tiers for the pilm variant.
VerifiedSolution verify_solution(const MipModel& m, const Assignment& a, const Dataset& d,
                                 const CoefficientSet* s = nullptr);

/// The assignment a solved coefficient vector induces: z, alpha, beta, I and
/// the value and tier indicators set to their smallest feasible values.
Assignment assignment_for(const MipModel& m, const Dataset& d, const CoefficientSet& s,
                          const Eigen::Ref<const Eigen::VectorXd>& lambda);

}  // namespace slim

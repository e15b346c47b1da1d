#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "graspaff/affordance.hpp"
#include "graspaff/distribution.hpp"
#include "graspaff/manifest.hpp"
#include "graspaff/random.hpp"

namespace graspaff {

enum class PriorSource { Uniform, Empirical };

std::string_view to_string(PriorSource source) noexcept;
PriorSource parse_prior_source(std::string_view s);

/// Marginal grasp-type prior p(g).
struct ClassPrior {
  Distribution values;
  PriorSource source = PriorSource::Uniform;
};

/// Uniform prior (1/K everywhere).
ClassPrior uniform_prior(std::size_t k);
/// Normalized global grasp-label histogram of the manifest.
ClassPrior empirical_prior(const DatasetManifest& manifest);
/// Dispatches on `source`; Empirical requires a manifest.
ClassPrior make_prior(PriorSource source, std::size_t k, const DatasetManifest* manifest = nullptr);

enum class Method { CnnOnly, UniformOnly, VariedOnly, CnnUniform, CnnVaried };

inline constexpr std::array<Method, 5> kAllMethods = {Method::CnnOnly, Method::UniformOnly, Method::VariedOnly,
                                                      Method::CnnUniform, Method::CnnVaried};

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view s);

struct FusionResult {
  Distribution posterior;
  ClassIndex decision = 0;
  Method method = Method::CnnVaried;
  bool fallback_used = false;
};

/// Unnormalized posterior cnn[g] * affordance[g] / prior[g]. Templated so the
/// kernel can be evaluated in any scalar type; entries where the numerator is
/// zero stay exactly zero regardless of the prior.
template <typename DerivedA, typename DerivedB, typename DerivedC>
ProbVector<typename DerivedA::Scalar> fusion_product(const Eigen::MatrixBase<DerivedA>& cnn,
                                                     const Eigen::MatrixBase<DerivedB>& affordance,
                                                     const Eigen::MatrixBase<DerivedC>& prior) {
  using Scalar = typename DerivedA::Scalar;
  const auto numerator = (cnn.array() * affordance.array()).eval();
  return (numerator > Scalar(0)).select(numerator / prior.array(), Scalar(0)).matrix();
}

/// Combines p(g|i), p(g|o) and p(g) into p(g|i,o) and picks its argmax (lowest
/// index on ties). When the product vanishes everywhere the decision falls back
/// to argmax(affordance), `fallback_used` is set, and the posterior is the affordance.
FusionResult fuse(const Distribution& cnn, const AffordanceVector& affordance, const ClassPrior& prior);

/// Everything a decision may draw on. Only the inputs the method needs must be set.
struct DecisionInputs {
  const Distribution* cnn = nullptr;
  const AffordanceVector* varied = nullptr;
  const AffordanceVector* uniform = nullptr;
  const ClassPrior* prior = nullptr;
  SeedStream* stream = nullptr;  // used by UniformOnly
};

/// One of the five compared decision rules. Throws MissingInput naming the
/// absent component.
FusionResult decide(Method method, const DecisionInputs& inputs);

}  // namespace graspaff

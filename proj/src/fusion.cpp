#include "graspaff/fusion.hpp"

#include "graspaff/error.hpp"

namespace graspaff {

std::string_view to_string(PriorSource source) noexcept {
  return source == PriorSource::Uniform ? "uniform" : "empirical";
}

PriorSource parse_prior_source(std::string_view s) {
  if (s == "uniform") return PriorSource::Uniform;
  if (s == "empirical") return PriorSource::Empirical;
  throw Error(ErrorCode::SchemaViolation, "prior must be uniform or empirical, got '" + std::string(s) + "'");
}

ClassPrior uniform_prior(std::size_t k) {
  return {normalize(VectorXd::Ones(static_cast<Eigen::Index>(k))), PriorSource::Uniform};
}

ClassPrior empirical_prior(const DatasetManifest& manifest) {
  if (manifest.empty()) throw Error(ErrorCode::EmptyManifest, "empirical prior needs a non-empty manifest");
  VectorXd counts = VectorXd::Zero(static_cast<Eigen::Index>(manifest.taxonomy().size()));
  for (const auto& r : manifest.records()) counts(static_cast<Eigen::Index>(r.grasp_label)) += 1.0;
  return {normalize(counts), PriorSource::Empirical};
}

ClassPrior make_prior(PriorSource source, std::size_t k, const DatasetManifest* manifest) {
  if (source == PriorSource::Uniform) return uniform_prior(k);
  if (manifest == nullptr) throw Error(ErrorCode::EmptyManifest, "empirical prior needs a manifest");
  return empirical_prior(*manifest);
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::CnnOnly: return "cnn_only";
    case Method::UniformOnly: return "uniform_only";
    case Method::VariedOnly: return "varied_only";
    case Method::CnnUniform: return "cnn_uniform";
    case Method::CnnVaried: return "cnn_varied";
  }
  return "unknown";
}

Method parse_method(std::string_view s) {
  for (const auto m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  throw Error(ErrorCode::SchemaViolation, "unknown method '" + std::string(s) + "'");
}

FusionResult fuse(const Distribution& cnn, const AffordanceVector& affordance, const ClassPrior& prior) {
  const auto k = cnn.size();
  if (affordance.values.size() != k || prior.values.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "cnn has " + std::to_string(k) + " entries, affordance " +
                                                  std::to_string(affordance.values.size()) + ", prior " +
                                                  std::to_string(prior.values.size()));
  }
  const auto& c = cnn.values();
  const auto& a = affordance.values.values();
  const auto& p = prior.values.values();
  for (Eigen::Index g = 0; g < k; ++g) {
    if (c(g) * a(g) > 0.0 && !(p(g) > 0.0)) {
      throw Error(ErrorCode::PriorZeroOnSupport, "prior is zero at class " + std::to_string(g));
    }
  }

  // a constant prior cancels under normalization; skipping the division keeps
  // the result bit-identical to the plain product
  const bool constant_prior = (p.array() == p(0)).all();
  const VectorXd product = constant_prior ? VectorXd(c.cwiseProduct(a)) : fusion_product(c, a, p);
  if (!(product.array() > 0.0).any()) {
    return {affordance.values, static_cast<ClassIndex>(argmax(a)), Method::CnnVaried, true};
  }
  auto posterior = normalize(product);
  const auto decision = static_cast<ClassIndex>(argmax(posterior));
  return {std::move(posterior), decision, Method::CnnVaried, false};
}

namespace {

template <typename T>
T& require(T* p, std::string_view what, Method method) {
  if (p == nullptr) {
    throw Error(ErrorCode::MissingInput, std::string(to_string(method)) + " needs " + std::string(what));
  }
  return *p;
}

}  // namespace

FusionResult decide(Method method, const DecisionInputs& in) {
  switch (method) {
    case Method::CnnOnly: {
      const auto& cnn = require(in.cnn, "cnn distribution", method);
      return {cnn, static_cast<ClassIndex>(argmax(cnn)), method, false};
    }
    case Method::VariedOnly: {
      const auto& varied = require(in.varied, "varied affordance", method);
      return {varied.values, static_cast<ClassIndex>(argmax(varied.values)), method, false};
    }
    case Method::UniformOnly: {
      const auto& uniform = require(in.uniform, "uniform affordance", method);
      auto& stream = require(in.stream, "seeded stream", method);
      const auto support = uniform.support();
      const auto pick = support[static_cast<std::size_t>(stream.uniform_below(support.size()))];
      return {flatten(uniform.values), pick, method, false};
    }
    case Method::CnnUniform:
    case Method::CnnVaried: {
      const auto& cnn = require(in.cnn, "cnn distribution", method);
      const auto& aff = method == Method::CnnUniform ? require(in.uniform, "uniform affordance", method)
                                                     : require(in.varied, "varied affordance", method);
      const auto& prior = require(in.prior, "class prior", method);
      auto result = fuse(cnn, aff, prior);
      result.method = method;
      return result;
    }
  }
  throw Error(ErrorCode::MissingInput, "unknown method");
}

}  // namespace graspaff

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locdep/neighborhood.hpp"
#include "locdep/rng.hpp"

namespace locdep {

// One sampled vector of standardized field values.
struct Realization {
    std::vector<double> values;
    std::uint64_t seed = 0;
};

enum class BaseDist { Rademacher, Uniform, ShiftedExponential };

std::string base_name(BaseDist base);
BaseDist base_from_name(const std::string& name);

// Exact finite support over the primitive noise of a model.  outcome(k, out)
// fills the standardized field values of the k-th primitive pattern and
// returns its probability.
class Enumerator {
public:
    virtual ~Enumerator() = default;
    virtual std::uint64_t size() const = 0;
    virtual double outcome(std::uint64_t k, std::span<double> out) const = 0;
};

struct Standardization {
    bool exact = true;     // closed-form scale from the covariance oracle
    double scale = 1.0;    // global factor s applied to the raw field
    double var_se = 0.0;   // zero when exact
};

struct ModelInfo {
    std::string kind;
    std::int64_t n = 0;
    std::optional<BaseDist> base;
    std::optional<std::vector<std::int64_t>> shape;  // lattice models
    std::optional<std::int64_t> m;
    std::optional<std::int64_t> graph_degree;        // local maxima
    std::optional<double> raw_mean;                  // EW of the unstandardized field
    std::optional<double> raw_variance;              // Var(W) of the unstandardized field
    std::optional<std::int64_t> erickson_bsq;        // B_n^2
};

// A generative specification of a locally dependent field {X_i}.  Sampling
// is a pure function of the Rng handed in; Var(sum X_i) = 1 by construction
// for every built-in model (all carry an exact covariance oracle).
class FieldModel {
public:
    virtual ~FieldModel() = default;

    const NeighborhoodSystem& system() const { return system_; }
    std::int64_t size() const { return system_.size(); }
    const ModelInfo& info() const { return info_; }
    const Standardization& standardization() const { return standardization_; }

    virtual void sample_into(Rng& rng, std::span<double> out) const = 0;

    // Draw only W = sum_i X_i (same law as summing sample_into; models
    // override this with cheaper generators where possible).
    virtual double sample_w(Rng& rng) const;

    Realization sample(std::uint64_t seed) const;

    virtual const Enumerator* enumerator() const { return nullptr; }

    virtual bool has_covariance() const { return false; }
    virtual double covariance(std::int32_t i, std::int32_t j) const;

    // Primitive-noise ids X_i reads; disjoint footprints across A_i^c is the
    // construction-level independence guarantee.
    virtual std::vector<std::int64_t> noise_footprint(std::int32_t i) const = 0;

    // Canonical JSON model spec ("kind" discriminator), round-trippable via
    // model_from_json.
    virtual std::string spec_json() const = 0;

protected:
    NeighborhoodSystem system_;
    ModelInfo info_;
    Standardization standardization_;
};

using ModelPtr = std::shared_ptr<const FieldModel>;

ModelPtr make_iid_field(std::int64_t n, BaseDist base);
ModelPtr make_moving_sum_field(const std::vector<std::int64_t>& shape, std::int64_t m,
                               BaseDist base);

// Regular graph given as vertex count + undirected edges.
ModelPtr make_local_maxima_field(std::int64_t n_vertices,
                                 const std::vector<std::pair<std::int64_t, std::int64_t>>& edges);
ModelPtr make_local_maxima_cycle(std::int64_t n_vertices);

ModelPtr make_erickson_field(std::int64_t n);

// Model spec JSON -> model.  Accepts the kinds
//   {"kind":"iid","n":..,"base":".."}
//   {"kind":"moving_sum","shape":[..],"m":..,"base":".."}
//   {"kind":"local_maxima","cycle":N} | {"kind":"local_maxima","vertices":N,"edges":[[u,v],..]}
//   {"kind":"erickson","n":..}
ModelPtr model_from_json(const std::string& text);

// Exact law of W for enumerable models: merged atoms (w, probability),
// sorted by w.  Throws capability_error when the model has no enumerator.
std::vector<std::pair<double, double>> exact_enumerate(const FieldModel& model);

// True iff every X_i reads primitive noise disjoint from that of X_{A_i^c};
// returns the offending pair otherwise.
std::optional<std::pair<std::int32_t, std::int32_t>> structural_independence_violation(
    const FieldModel& model);

// Deterministic one-dependent copy/fresh pattern of the Erickson sequence:
// variance of the partial sums, B_k^2 for k = 1..n (1-based; [0] unused).
std::vector<std::int64_t> erickson_bsq_sequence(std::int64_t n);

}  // namespace locdep

// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssrl/error.hpp"
#include "ssrl/policy.hpp"

namespace ssrl {

/// Raw (JVA, JME, ME1, ME2) values at one evaluation tick.
using MetricVector = std::array<double, 4>;

inline constexpr int kDefaultLags = 6;

/// Metric-major lags, most recent first, then the tick index:
/// [jva_0..jva_{k-1}, jme_0.., me1_0.., me2_0.., tick]. Length 4k+1.
struct FeatureVector {
    std::vector<double> values;
    int lags = kDefaultLags;

    std::int64_t tick_index() const { return static_cast<std::int64_t>(values.back()); }
    double lag(Metric m, int i) const {
        return values[static_cast<std::size_t>(static_cast<int>(m) * lags + i)];
    }
};

/// Features at the newest entry of `history` (oldest first). Lags reaching
/// before the start are filled from `pad`.
FeatureVector build_features(std::span<const MetricVector> history, std::int64_t tick_index,
                             const MetricVector& pad, int k = kDefaultLags);

/// One session's per-tick metric series with the baselines used to discretize it.
struct MetricSeries {
    std::vector<MetricVector> values;
    Baselines baselines{};
    std::string session_hash;

    MetricVector baseline_means() const;
};

struct TrainingSet {
    std::vector<FeatureVector> features;
    std::vector<MetricVector> targets;
};

/// Sliding (features at tick i, values at tick i + horizon_ticks) pairs.
TrainingSet training_pairs(std::span<const MetricSeries> sessions, int horizon_ticks,
                           int k = kDefaultLags);

// --- single-target regressors ------------------------------------------------

/// Row-major design matrix.
struct Design {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

Design design_from(std::span<const FeatureVector> features);

/// y = intercept + beta . x, fitted on centered data.
struct LinearModel {
    double intercept = 0.0;
    std::vector<double> beta;
    bool used_ridge = false;

    double predict(std::span<const double> x) const;
};

inline constexpr double kRidgeLambda = 1e-6;

/// OLS when there are at least cols+1 rows and the centered design has full
/// column rank, ridge (lambda) otherwise. With allow_ridge = false a
/// degenerate design throws DomainError.
LinearModel fit_linear(const Design& x, std::span<const double> y, bool allow_ridge = true,
                       double lambda = kRidgeLambda);

struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;  // x < threshold goes left
    double left = 0.0;
    double right = 0.0;

    double eval(std::span<const double> x) const { return x[feature] < threshold ? left : right; }
};

struct BoostParams {
    int rounds = 100;
    double shrinkage = 0.1;
    std::size_t min_rows = 20;
};

/// Gradient-boosted depth-1 trees on squared loss.
struct StumpEnsemble {
    double init = 0.0;
    double shrinkage = 0.1;
    std::vector<Stump> stumps;
    /// Mean squared training loss after each round (index 0 = initial mean).
    std::vector<double> train_loss;

    double predict(std::span<const double> x) const;
};

StumpEnsemble fit_stumps(const Design& x, std::span<const double> y, const BoostParams& p = {});

// --- forecaster contract --------------------------------------------------------

class Forecaster {
  public:
    virtual ~Forecaster() = default;
    virtual std::string_view id() const = 0;
    virtual void fit(std::span<const FeatureVector> features,
                     std::span<const MetricVector> targets) = 0;
    virtual MetricVector predict(const FeatureVector& features) const = 0;
    /// Called before predicting on a session; only the oracle cares.
    virtual void begin_session(const MetricSeries& /*session*/) {}
    /// Model-specific JSON object (type and parameters).
    virtual std::string to_json() const = 0;
};

class PersistenceForecaster final : public Forecaster {
  public:
    std::string_view id() const override { return "persistence"; }
    void fit(std::span<const FeatureVector>, std::span<const MetricVector>) override {}
    MetricVector predict(const FeatureVector& f) const override;
    std::string to_json() const override;
};

class LinearForecaster final : public Forecaster {
  public:
    explicit LinearForecaster(bool allow_ridge = true) : allow_ridge_(allow_ridge) {}
    std::string_view id() const override { return "ar"; }
    void fit(std::span<const FeatureVector> features,
             std::span<const MetricVector> targets) override;
    MetricVector predict(const FeatureVector& f) const override;
    std::string to_json() const override;

    const std::array<LinearModel, 4>& models() const { return models_; }
    static std::unique_ptr<LinearForecaster> from_json(std::string_view text);

  private:
    bool allow_ridge_;
    bool fitted_ = false;
    std::array<LinearModel, 4> models_{};
};

class StumpForecaster final : public Forecaster {
  public:
    explicit StumpForecaster(BoostParams params = {}) : params_(params) {}
    std::string_view id() const override { return "gbstump"; }
    void fit(std::span<const FeatureVector> features,
             std::span<const MetricVector> targets) override;
    MetricVector predict(const FeatureVector& f) const override;
    std::string to_json() const override;

    const std::array<StumpEnsemble, 4>& models() const { return models_; }
    static std::unique_ptr<StumpForecaster> from_json(std::string_view text);

  private:
    BoostParams params_;
    bool fitted_ = false;
    std::array<StumpEnsemble, 4> models_{};
};

/// Reads the bound session's true values horizon_ticks ahead of the feature
/// tick, holding the last value past the end.
class OracleForecaster final : public Forecaster {
  public:
    explicit OracleForecaster(int horizon_ticks = 1) : horizon_(horizon_ticks) {}
    std::string_view id() const override { return "oracle"; }
    void fit(std::span<const FeatureVector>, std::span<const MetricVector>) override {}
    void begin_session(const MetricSeries& session) override { truth_ = session.values; }
    MetricVector predict(const FeatureVector& f) const override;
    std::string to_json() const override;

  private:
    int horizon_;
    std::vector<MetricVector> truth_;
};

std::unique_ptr<Forecaster> make_forecaster(std::string_view id, int horizon_ticks = 1);

// --- model files ---------------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

struct ModelFile {
    std::unique_ptr<Forecaster> model;
    int lags = kDefaultLags;
    int horizon_ticks = 1;
    std::vector<std::string> training_sessions;  // content hashes
};

std::string serialize_model(const ModelFile& m);
ModelFile parse_model(std::string_view text);

// --- evaluation -------------------------------------------------------------------------

struct EvalReport {
    MetricVector mae{};
    MetricVector level_accuracy{};
    std::size_t predictions = 0;
};

/// Predicts every tick with a full horizon ahead and compares against the
/// truth. Levels use each session's own baselines.
EvalReport evaluate(Forecaster& forecaster, std::span<const MetricSeries> sessions,
                    int horizon_ticks, int k = kDefaultLags, double sd_k = kDefaultSdK);

}  // namespace ssrl

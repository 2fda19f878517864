// Copyright 2026 The ssrl-engine Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "ssrl/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <json.hpp>

namespace ssrl {

using nlohmann::ordered_json;

FeatureVector build_features(std::span<const MetricVector> history, std::int64_t tick_index,
                             const MetricVector& pad, int k) {
    if (k < 1) throw DomainError("features: lag count must be positive");
    FeatureVector f;
    f.lags = k;
    f.values.resize(static_cast<std::size_t>(4 * k + 1));
    const auto n = static_cast<std::ptrdiff_t>(history.size());
    for (std::size_t m = 0; m < 4; ++m) {
        for (int j = 0; j < k; ++j) {
            const std::ptrdiff_t src = n - 1 - j;
            f.values[m * static_cast<std::size_t>(k) + static_cast<std::size_t>(j)] =
                src >= 0 ? history[static_cast<std::size_t>(src)][m] : pad[m];
        }
    }
    f.values.back() = static_cast<double>(tick_index);
    return f;
}

MetricVector MetricSeries::baseline_means() const {
    MetricVector out{};
    for (std::size_t m = 0; m < 4; ++m) out[m] = baselines[m].mean;
    return out;
}

TrainingSet training_pairs(std::span<const MetricSeries> sessions, int horizon_ticks, int k) {
    if (horizon_ticks < 1) throw DomainError("horizon must be at least one tick");
    TrainingSet out;
    for (const auto& s : sessions) {
        const auto pad = s.baseline_means();
        const auto h = static_cast<std::size_t>(horizon_ticks);
        for (std::size_t i = 0; i + h < s.values.size(); ++i) {
            out.features.push_back(build_features(std::span(s.values).first(i + 1),
                                                  static_cast<std::int64_t>(i), pad, k));
            out.targets.push_back(s.values[i + h]);
        }
    }
    return out;
}

Design design_from(std::span<const FeatureVector> features) {
    Design d;
    d.rows = features.size();
    d.cols = features.empty() ? 0 : features.front().values.size();
    d.data.reserve(d.rows * d.cols);
    for (const auto& f : features) {
        if (f.values.size() != d.cols) throw DomainError("features of unequal length");
        d.data.insert(d.data.end(), f.values.begin(), f.values.end());
    }
    return d;
}

// --- linear ---------------------------------------------------------------------

double LinearModel::predict(std::span<const double> x) const {
    double y = intercept;
    for (std::size_t i = 0; i < beta.size(); ++i) y += beta[i] * x[i];
    return y;
}

LinearModel fit_linear(const Design& x, std::span<const double> y, bool allow_ridge,
                       double lambda) {
    if (x.rows == 0) throw DomainError("linear fit: no training rows");
    if (y.size() != x.rows) throw DomainError("linear fit: target count differs from rows");
    const auto n = static_cast<Eigen::Index>(x.rows);
    const auto p = static_cast<Eigen::Index>(x.cols);

    Eigen::MatrixXd xc(n, p);
    Eigen::VectorXd yc(n);
    Eigen::VectorXd xmean = Eigen::VectorXd::Zero(p);
    double ymean = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) {
            xc(r, c) = x.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
        yc(r) = y[static_cast<std::size_t>(r)];
    }
    xmean = xc.colwise().mean();
    ymean = yc.mean();
    xc.rowwise() -= xmean.transpose();
    yc.array() -= ymean;

    LinearModel model;
    Eigen::VectorXd beta;
    bool solved = false;
    if (n >= p + 1) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
        qr.setThreshold(1e-10);
        if (qr.rank() == p) {
            beta = qr.solve(yc);
            solved = true;
        }
    }
    if (!solved) {
        if (!allow_ridge) throw DomainError("linear fit: degenerate design matrix");
        const Eigen::MatrixXd gram =
            xc.transpose() * xc + lambda * Eigen::MatrixXd::Identity(p, p);
        beta = gram.ldlt().solve(xc.transpose() * yc);
        model.used_ridge = true;
    }
    model.beta.assign(beta.data(), beta.data() + beta.size());
    model.intercept = ymean - xmean.dot(beta);
    return model;
}

// --- boosted stumps ------------------------------------------------------------------

double StumpEnsemble::predict(std::span<const double> x) const {
    double y = init;
    for (const auto& s : stumps) y += shrinkage * s.eval(x);
    return y;
}

StumpEnsemble fit_stumps(const Design& x, std::span<const double> y, const BoostParams& p) {
    if (x.rows < p.min_rows) {
        throw DomainError("gbstump: need at least " + std::to_string(p.min_rows) +
                          " training rows, got " + std::to_string(x.rows));
    }
    if (y.size() != x.rows) throw DomainError("gbstump: target count differs from rows");
    const std::size_t n = x.rows;

    // Per-feature row order, computed once.
    std::vector<std::vector<std::size_t>> order(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        auto& o = order[f];
        o.resize(n);
        std::iota(o.begin(), o.end(), 0);
        std::stable_sort(o.begin(), o.end(),
                         [&](std::size_t a, std::size_t b) { return x.at(a, f) < x.at(b, f); });
    }

    StumpEnsemble model;
    model.shrinkage = p.shrinkage;
    model.init = std::accumulate(y.begin(), y.end(), 0.0) / double(n);
    std::vector<double> fitted(n, model.init);
    std::vector<double> resid(n);

    auto loss = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (y[i] - fitted[i]) * (y[i] - fitted[i]);
        return s / double(n);
    };
    model.train_loss.push_back(loss());

    for (int round = 0; round < p.rounds; ++round) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = y[i] - fitted[i];
            total += resid[i];
        }
        Stump best{0, std::numeric_limits<double>::infinity(), total / double(n),
                   total / double(n)};
        double best_gain = total * total / double(n);

        for (std::size_t f = 0; f < x.cols; ++f) {
            const auto& o = order[f];
            double left = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left += resid[o[i]];
                const double a = x.at(o[i], f);
                const double b = x.at(o[i + 1], f);
                if (!(a < b)) continue;
                const double nl = double(i + 1);
                const double nr = double(n - i - 1);
                const double right = total - left;
                const double gain = left * left / nl + right * right / nr;
                if (gain > best_gain) {
                    double thr = a + (b - a) / 2.0;
                    if (!(thr > a)) thr = b;
                    best = {f, thr, left / nl, right / nr};
                    best_gain = gain;
                }
            }
        }
        model.stumps.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            fitted[i] += p.shrinkage * best.eval(std::span(&x.data[i * x.cols], x.cols));
        }
        model.train_loss.push_back(loss());
    }
    return model;
}

// --- forecasters --------------------------------------------------------------------------

namespace {

std::vector<double> target_column(std::span<const MetricVector> targets, std::size_t m) {
    std::vector<double> out(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) out[i] = targets[i][m];
    return out;
}

void check_fit_inputs(std::span<const FeatureVector> f, std::span<const MetricVector> t) {
    if (f.size() != t.size()) throw DomainError("forecaster: feature and target counts differ");
}

}  // namespace

MetricVector PersistenceForecaster::predict(const FeatureVector& f) const {
    return {f.lag(Metric::JVA, 0), f.lag(Metric::JME, 0), f.lag(Metric::ME1, 0),
            f.lag(Metric::ME2, 0)};
}

std::string PersistenceForecaster::to_json() const {
    return ordered_json{{"type", "persistence"}}.dump();
}

void LinearForecaster::fit(std::span<const FeatureVector> features,
                           std::span<const MetricVector> targets) {
    check_fit_inputs(features, targets);
    const auto d = design_from(features);
    for (std::size_t m = 0; m < 4; ++m) {
        models_[m] = fit_linear(d, target_column(targets, m), allow_ridge_);
    }
    fitted_ = true;
}

MetricVector LinearForecaster::predict(const FeatureVector& f) const {
    if (!fitted_) throw DomainError("ar: predict before fit");
    MetricVector out{};
    for (std::size_t m = 0; m < 4; ++m) {
        if (models_[m].beta.size() != f.values.size())
            throw DomainError("ar: feature length differs from training");
        out[m] = models_[m].predict(f.values);
    }
    return out;
}

std::string LinearForecaster::to_json() const {
    ordered_json j;
    j["type"] = "ar";
    j["ridge_lambda"] = kRidgeLambda;
    j["allow_ridge"] = allow_ridge_;
    auto arr = ordered_json::array();
    for (const auto& lm : models_) {
        arr.push_back({{"intercept", lm.intercept}, {"beta", lm.beta}, {"ridge", lm.used_ridge}});
    }
    j["models"] = arr;
    return j.dump();
}

std::unique_ptr<LinearForecaster> LinearForecaster::from_json(std::string_view text) {
    const auto j = ordered_json::parse(text);
    auto f = std::make_unique<LinearForecaster>(j.value("allow_ridge", true));
    const auto& arr = j.at("models");
    if (arr.size() != 4) throw DomainError("ar model needs four metric models");
    for (std::size_t m = 0; m < 4; ++m) {
        f->models_[m].intercept = arr[m].at("intercept").get<double>();
        f->models_[m].beta = arr[m].at("beta").get<std::vector<double>>();
        f->models_[m].used_ridge = arr[m].value("ridge", false);
    }
    f->fitted_ = true;
    return f;
}

void StumpForecaster::fit(std::span<const FeatureVector> features,
                          std::span<const MetricVector> targets) {
    check_fit_inputs(features, targets);
    const auto d = design_from(features);
    for (std::size_t m = 0; m < 4; ++m) {
        models_[m] = fit_stumps(d, target_column(targets, m), params_);
    }
    fitted_ = true;
}

MetricVector StumpForecaster::predict(const FeatureVector& f) const {
    if (!fitted_) throw DomainError("gbstump: predict before fit");
    MetricVector out{};
    for (std::size_t m = 0; m < 4; ++m) out[m] = models_[m].predict(f.values);
    return out;
}

std::string StumpForecaster::to_json() const {
    ordered_json j;
    j["type"] = "gbstump";
    j["rounds"] = params_.rounds;
    j["shrinkage"] = params_.shrinkage;
    auto arr = ordered_json::array();
    for (const auto& e : models_) {
        auto stumps = ordered_json::array();
        for (const auto& s : e.stumps) {
            // An infinite threshold (no split) is stored as null.
            ordered_json thr = std::isfinite(s.threshold) ? ordered_json(s.threshold) : nullptr;
            stumps.push_back({s.feature, thr, s.left, s.right});
        }
        arr.push_back({{"init", e.init}, {"stumps", stumps}});
    }
    j["models"] = arr;
    return j.dump();
}

std::unique_ptr<StumpForecaster> StumpForecaster::from_json(std::string_view text) {
    const auto j = ordered_json::parse(text);
    BoostParams p;
    p.rounds = j.at("rounds").get<int>();
    p.shrinkage = j.at("shrinkage").get<double>();
    auto f = std::make_unique<StumpForecaster>(p);
    const auto& arr = j.at("models");
    if (arr.size() != 4) throw DomainError("gbstump model needs four metric models");
    for (std::size_t m = 0; m < 4; ++m) {
        auto& e = f->models_[m];
        e.init = arr[m].at("init").get<double>();
        e.shrinkage = p.shrinkage;
        for (const auto& s : arr[m].at("stumps")) {
            Stump st;
            st.feature = s.at(0).get<std::size_t>();
            st.threshold = s.at(1).is_null() ? std::numeric_limits<double>::infinity()
                                             : s.at(1).get<double>();
            st.left = s.at(2).get<double>();
            st.right = s.at(3).get<double>();
            e.stumps.push_back(st);
        }
    }
    f->fitted_ = true;
    return f;
}

MetricVector OracleForecaster::predict(const FeatureVector& f) const {
    if (truth_.empty()) throw DomainError("oracle: no session bound");
    const auto idx = std::min<std::int64_t>(f.tick_index() + horizon_,
                                            static_cast<std::int64_t>(truth_.size()) - 1);
    return truth_[static_cast<std::size_t>(std::max<std::int64_t>(idx, 0))];
}

std::string OracleForecaster::to_json() const {
    return ordered_json{{"type", "oracle"}, {"horizon_ticks", horizon_}}.dump();
}

std::unique_ptr<Forecaster> make_forecaster(std::string_view id, int horizon_ticks) {
    if (id == "persistence") return std::make_unique<PersistenceForecaster>();
    if (id == "ar") return std::make_unique<LinearForecaster>();
    if (id == "gbstump") return std::make_unique<StumpForecaster>();
    if (id == "oracle") return std::make_unique<OracleForecaster>(horizon_ticks);
    throw DomainError("unknown forecaster '" + std::string(id) +
                      "' (expected persistence, ar, gbstump or oracle)");
}

// --- model files ------------------------------------------------------------------------------

std::string serialize_model(const ModelFile& m) {
    if (!m.model) throw DomainError("model file without a model");
    ordered_json j;
    j["format"] = "ssrl-forecaster";
    j["version"] = kModelFormatVersion;
    j["lags"] = m.lags;
    j["horizon_ticks"] = m.horizon_ticks;
    j["training_sessions"] = m.training_sessions;
    j["model"] = ordered_json::parse(m.model->to_json());
    return j.dump(2) + "\n";
}

ModelFile parse_model(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(1, std::string("model file: ") + e.what());
    }
    try {
        if (j.value("format", "") != "ssrl-forecaster")
            throw IoError("not a forecaster model file");
        const int version = j.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw IoError("unsupported model format version " + std::to_string(version));
        ModelFile m;
        m.lags = j.at("lags").get<int>();
        m.horizon_ticks = j.at("horizon_ticks").get<int>();
        m.training_sessions = j.at("training_sessions").get<std::vector<std::string>>();
        const auto& body = j.at("model");
        const auto type = body.at("type").get<std::string>();
        const auto dumped = body.dump();
        if (type == "ar") {
            m.model = LinearForecaster::from_json(dumped);
        } else if (type == "gbstump") {
            m.model = StumpForecaster::from_json(dumped);
        } else {
            m.model = make_forecaster(type, body.value("horizon_ticks", m.horizon_ticks));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("model file: ") + e.what());
    }
}

// --- evaluation -----------------------------------------------------------------------------------

EvalReport evaluate(Forecaster& forecaster, std::span<const MetricSeries> sessions,
                    int horizon_ticks, int k, double sd_k) {
    if (horizon_ticks < 1) throw DomainError("horizon must be at least one tick");
    EvalReport r;
    MetricVector abs_err{};
    MetricVector hits{};
    for (const auto& s : sessions) {
        forecaster.begin_session(s);
        const auto pad = s.baseline_means();
        const auto h = static_cast<std::size_t>(horizon_ticks);
        for (std::size_t i = 0; i + h < s.values.size(); ++i) {
            const auto f = build_features(std::span(s.values).first(i + 1),
                                          static_cast<std::int64_t>(i), pad, k);
            const auto pred = forecaster.predict(f);
            const auto& truth = s.values[i + h];
            for (std::size_t m = 0; m < 4; ++m) {
                abs_err[m] += std::abs(pred[m] - truth[m]);
                if (discretize(pred[m], s.baselines[m], sd_k) ==
                    discretize(truth[m], s.baselines[m], sd_k))
                    hits[m] += 1.0;
            }
            ++r.predictions;
        }
    }
    if (r.predictions > 0) {
        for (std::size_t m = 0; m < 4; ++m) {
            r.mae[m] = abs_err[m] / double(r.predictions);
            r.level_accuracy[m] = hits[m] / double(r.predictions);
        }
    }
    return r;
}

}  // namespace ssrl

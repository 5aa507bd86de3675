#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "carecoord/bus.hpp"
#include "carecoord/domain.hpp"
#include "carecoord/rng.hpp"

namespace carecoord {

struct DayFeature {
    double adherence = 0.0;     // fraction of scheduled intakes completed, [0,1]
    double glucose_z = 0.0;     // standardized daily mean
    double hr_z = 0.0;
    double steps_z = 0.0;
    double hydration_frac = 0.0; // fraction of daily hydration target, [0,1]
};

Eigen::VectorXd feature_vec(const DayFeature& f); // 5 entries, field order above

struct MonitorConfig {
    int hidden = 8;
    int window = 14; // days per training window, target is the last day
    double lr = 0.05;
    int epochs = 500;
    double tau_mult = 2.0;
};

void validate(const MonitorConfig& cfg); // throws std::invalid_argument

struct GruParams {
    Eigen::MatrixXd Wz, Wr, Wh; // H x 5
    Eigen::MatrixXd Uz, Ur, Uh; // H x H
    Eigen::VectorXd bz, br, bh; // H
    Eigen::VectorXd w;          // readout, H
    double b = 0.0;
    std::optional<double> sigma_residual; // set by training

    int hidden() const { return static_cast<int>(Wz.rows()); }
    static GruParams zeros(int hidden);
    static GruParams random_init(int hidden, Rng& rng); // N(0, 0.1) entries

    ojson to_json() const;
    static GruParams from_json(const ojson& j);
};

struct GruForward {
    std::vector<Eigen::VectorXd> hidden; // h_1 .. h_T
    double prediction = 0.0;
};

// Standard gated recurrence: z and r gates, tanh candidate,
// h_t = (1-z)*h_{t-1} + z*h_cand, scalar readout off h_T.
GruForward gru_forward(const std::vector<DayFeature>& seq, const GruParams& p);

struct TrainingDivergence : std::runtime_error {
    int epoch;
    explicit TrainingDivergence(int at)
        : std::runtime_error("training diverged at epoch " + std::to_string(at)),
          epoch(at) {}
};

// Analytic full-batch gradient of the mean squared prediction error.
// Exposed so the finite-difference check can target it directly.
struct GruGradients {
    Eigen::MatrixXd Wz, Wr, Wh, Uz, Ur, Uh;
    Eigen::VectorXd bz, br, bh, w;
    double b = 0.0;
    double loss = 0.0;
};

GruGradients gru_gradients(const std::vector<std::vector<DayFeature>>& windows,
                           const GruParams& p);

// Full-batch deterministic gradient descent. Each window feeds its
// first window-1 days and regresses onto the final day's adherence.
// sigma_residual is left in the returned params.
GruParams gru_train(const std::vector<std::vector<DayFeature>>& windows,
                    const MonitorConfig& cfg, Rng& rng,
                    std::vector<double>* loss_curve = nullptr);

// Deviation of observed next-day adherence from the model's prediction;
// alert over tau = tau_mult * sigma_residual, caregiver tier over 2*tau
// or a glucose z-score above 3. user_id/day left for the caller.
std::optional<Alert> detect(const std::vector<DayFeature>& seq,
                            const DayFeature& observed_next, const GruParams& p,
                            const MonitorConfig& cfg);

// Rolling-statistics cross-check: alert when the observation sits more
// than z_threshold rolling stds from the rolling mean (std floored at
// 1e-3).
std::optional<Alert> baseline_detect(const std::vector<DayFeature>& seq,
                                     const DayFeature& observed_next, int window = 7,
                                     double z_threshold = 2.5);

// Fixed-threshold comparison stack: alert below the absolute adherence
// floor, caregiver tier below the lower floor or on extreme glucose.
std::optional<Alert> threshold_detect(const DayFeature& observed_next,
                                      double alert_below = 0.6,
                                      double caregiver_below = 0.35);

// Raw per-day aggregates as the simulator accumulates them.
struct DailyRaw {
    double adherence = 0.0;
    double glucose_mean = 0.0;
    double hr_mean = 0.0;
    double steps_total = 0.0;
    double hydration_total = 0.0;
};

// Standardizes physiology against the first baseline_days entries
// (std floored at 1e-6) and scales hydration by its daily target.
std::vector<DayFeature> standardize(const std::vector<DailyRaw>& raw, int baseline_days,
                                    double hydration_target);

// Sliding windows of the given length.
std::vector<std::vector<DayFeature>> make_windows(const std::vector<DayFeature>& features,
                                                  int window);

} // namespace carecoord

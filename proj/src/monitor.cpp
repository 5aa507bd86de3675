#include "carecoord/monitor.hpp"

#include <algorithm>
#include <cmath>

namespace carecoord {

namespace {

constexpr int kInputDim = 5;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& v) {
    return (1.0 / (1.0 + (-v.array()).exp())).matrix();
}

void check_shapes(const GruParams& p) {
    const int h = p.hidden();
    bool ok = p.Wz.rows() == h && p.Wz.cols() == kInputDim && p.Wr.rows() == h &&
              p.Wr.cols() == kInputDim && p.Wh.rows() == h && p.Wh.cols() == kInputDim &&
              p.Uz.rows() == h && p.Uz.cols() == h && p.Ur.rows() == h && p.Ur.cols() == h &&
              p.Uh.rows() == h && p.Uh.cols() == h && p.bz.size() == h && p.br.size() == h &&
              p.bh.size() == h && p.w.size() == h;
    if (!ok) throw std::invalid_argument("gru params: shape mismatch");
}

ojson matrix_to_json(const Eigen::MatrixXd& m) {
    ojson rows = ojson::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        ojson row = ojson::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const ojson& j) {
    const auto rows = j.size();
    const auto cols = rows == 0 ? 0 : j.at(0).size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    }
    return m;
}

ojson vector_to_json(const Eigen::VectorXd& v) {
    ojson out = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const ojson& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j.at(i).get<double>();
    return v;
}

struct StepCache {
    Eigen::VectorXd x, z, r, hcand, h;
};

// Forward pass keeping per-step activations for backprop.
std::vector<StepCache> forward_cached(const std::vector<DayFeature>& seq,
                                      const GruParams& p) {
    const int h = p.hidden();
    std::vector<StepCache> steps;
    steps.reserve(seq.size());
    Eigen::VectorXd hidden = Eigen::VectorXd::Zero(h);
    for (const auto& f : seq) {
        StepCache s;
        s.x = feature_vec(f);
        s.z = sigmoid(p.Wz * s.x + p.Uz * hidden + p.bz);
        s.r = sigmoid(p.Wr * s.x + p.Ur * hidden + p.br);
        s.hcand = (p.Wh * s.x + p.Uh * (s.r.array() * hidden.array()).matrix() + p.bh)
                      .array()
                      .tanh()
                      .matrix();
        s.h = ((1.0 - s.z.array()) * hidden.array() + s.z.array() * s.hcand.array())
                  .matrix();
        hidden = s.h;
        steps.push_back(std::move(s));
    }
    return steps;
}

} // namespace

Eigen::VectorXd feature_vec(const DayFeature& f) {
    Eigen::VectorXd x(kInputDim);
    x << f.adherence, f.glucose_z, f.hr_z, f.steps_z, f.hydration_frac;
    return x;
}

void validate(const MonitorConfig& cfg) {
    if (cfg.hidden < 1) throw std::invalid_argument("monitor: hidden < 1");
    if (cfg.window < 2) throw std::invalid_argument("monitor: window < 2");
    // lr 0 is allowed so a zero-rate run provably leaves params alone.
    if (cfg.lr < 0.0) throw std::invalid_argument("monitor: negative lr");
    if (cfg.epochs < 0) throw std::invalid_argument("monitor: negative epochs");
    if (!(cfg.tau_mult > 0.0)) throw std::invalid_argument("monitor: tau_mult <= 0");
}

GruParams GruParams::zeros(int hidden) {
    GruParams p;
    p.Wz = Eigen::MatrixXd::Zero(hidden, kInputDim);
    p.Wr = Eigen::MatrixXd::Zero(hidden, kInputDim);
    p.Wh = Eigen::MatrixXd::Zero(hidden, kInputDim);
    p.Uz = Eigen::MatrixXd::Zero(hidden, hidden);
    p.Ur = Eigen::MatrixXd::Zero(hidden, hidden);
    p.Uh = Eigen::MatrixXd::Zero(hidden, hidden);
    p.bz = Eigen::VectorXd::Zero(hidden);
    p.br = Eigen::VectorXd::Zero(hidden);
    p.bh = Eigen::VectorXd::Zero(hidden);
    p.w = Eigen::VectorXd::Zero(hidden);
    p.b = 0.0;
    return p;
}

GruParams GruParams::random_init(int hidden, Rng& rng) {
    GruParams p = zeros(hidden);
    auto fill_matrix = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal() * 0.1;
        }
    };
    auto fill_vector = [&](Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal() * 0.1;
    };
    fill_matrix(p.Wz);
    fill_matrix(p.Wr);
    fill_matrix(p.Wh);
    fill_matrix(p.Uz);
    fill_matrix(p.Ur);
    fill_matrix(p.Uh);
    fill_vector(p.bz);
    fill_vector(p.br);
    fill_vector(p.bh);
    fill_vector(p.w);
    p.b = 0.0;
    return p;
}

ojson GruParams::to_json() const {
    ojson j;
    j["hidden"] = hidden();
    j["Wz"] = matrix_to_json(Wz);
    j["Wr"] = matrix_to_json(Wr);
    j["Wh"] = matrix_to_json(Wh);
    j["Uz"] = matrix_to_json(Uz);
    j["Ur"] = matrix_to_json(Ur);
    j["Uh"] = matrix_to_json(Uh);
    j["bz"] = vector_to_json(bz);
    j["br"] = vector_to_json(br);
    j["bh"] = vector_to_json(bh);
    j["w"] = vector_to_json(w);
    j["b"] = b;
    if (sigma_residual) j["sigma_residual"] = *sigma_residual;
    return j;
}

GruParams GruParams::from_json(const ojson& j) {
    GruParams p;
    p.Wz = matrix_from_json(j.at("Wz"));
    p.Wr = matrix_from_json(j.at("Wr"));
    p.Wh = matrix_from_json(j.at("Wh"));
    p.Uz = matrix_from_json(j.at("Uz"));
    p.Ur = matrix_from_json(j.at("Ur"));
    p.Uh = matrix_from_json(j.at("Uh"));
    p.bz = vector_from_json(j.at("bz"));
    p.br = vector_from_json(j.at("br"));
    p.bh = vector_from_json(j.at("bh"));
    p.w = vector_from_json(j.at("w"));
    p.b = j.at("b").get<double>();
    if (j.contains("sigma_residual")) p.sigma_residual = j.at("sigma_residual").get<double>();
    check_shapes(p);
    return p;
}

GruForward gru_forward(const std::vector<DayFeature>& seq, const GruParams& p) {
    if (seq.empty()) throw std::invalid_argument("gru_forward: empty sequence");
    check_shapes(p);
    auto steps = forward_cached(seq, p);
    GruForward out;
    out.hidden.reserve(steps.size());
    for (const auto& s : steps) out.hidden.push_back(s.h);
    out.prediction = p.w.dot(steps.back().h) + p.b;
    return out;
}

GruGradients gru_gradients(const std::vector<std::vector<DayFeature>>& windows,
                           const GruParams& p) {
    if (windows.empty()) throw std::invalid_argument("gru_gradients: empty dataset");
    check_shapes(p);
    const int h = p.hidden();

    GruGradients g;
    g.Wz = Eigen::MatrixXd::Zero(h, kInputDim);
    g.Wr = Eigen::MatrixXd::Zero(h, kInputDim);
    g.Wh = Eigen::MatrixXd::Zero(h, kInputDim);
    g.Uz = Eigen::MatrixXd::Zero(h, h);
    g.Ur = Eigen::MatrixXd::Zero(h, h);
    g.Uh = Eigen::MatrixXd::Zero(h, h);
    g.bz = Eigen::VectorXd::Zero(h);
    g.br = Eigen::VectorXd::Zero(h);
    g.bh = Eigen::VectorXd::Zero(h);
    g.w = Eigen::VectorXd::Zero(h);
    g.b = 0.0;
    g.loss = 0.0;

    const double n = static_cast<double>(windows.size());
    for (const auto& window : windows) {
        if (window.size() < 2) {
            throw std::invalid_argument("gru_gradients: window shorter than 2 days");
        }
        std::vector<DayFeature> input(window.begin(), window.end() - 1);
        const double target = window.back().adherence;

        auto steps = forward_cached(input, p);
        const double pred = p.w.dot(steps.back().h) + p.b;
        const double err = pred - target;
        g.loss += err * err / n;

        const double dy = 2.0 * err / n;
        g.w += dy * steps.back().h;
        g.b += dy;

        Eigen::VectorXd dh = dy * p.w;
        for (int t = static_cast<int>(steps.size()) - 1; t >= 0; --t) {
            const auto& s = steps[static_cast<std::size_t>(t)];
            const Eigen::VectorXd h_prev =
                t > 0 ? steps[static_cast<std::size_t>(t - 1)].h
                      : Eigen::VectorXd::Zero(h);

            Eigen::VectorXd dz =
                (dh.array() * (s.hcand.array() - h_prev.array())).matrix();
            Eigen::VectorXd dhcand = (dh.array() * s.z.array()).matrix();
            Eigen::VectorXd dah =
                (dhcand.array() * (1.0 - s.hcand.array().square())).matrix();

            g.Wh += dah * s.x.transpose();
            g.Uh += dah * (s.r.array() * h_prev.array()).matrix().transpose();
            g.bh += dah;

            const Eigen::VectorXd uh_dah = p.Uh.transpose() * dah;
            Eigen::VectorXd dr = (uh_dah.array() * h_prev.array()).matrix();

            Eigen::VectorXd daz =
                (dz.array() * s.z.array() * (1.0 - s.z.array())).matrix();
            g.Wz += daz * s.x.transpose();
            g.Uz += daz * h_prev.transpose();
            g.bz += daz;

            Eigen::VectorXd dar =
                (dr.array() * s.r.array() * (1.0 - s.r.array())).matrix();
            g.Wr += dar * s.x.transpose();
            g.Ur += dar * h_prev.transpose();
            g.br += dar;

            dh = (dh.array() * (1.0 - s.z.array())).matrix() +
                 (uh_dah.array() * s.r.array()).matrix() + p.Uz.transpose() * daz +
                 p.Ur.transpose() * dar;
        }
    }
    return g;
}

GruParams gru_train(const std::vector<std::vector<DayFeature>>& windows,
                    const MonitorConfig& cfg, Rng& rng, std::vector<double>* loss_curve) {
    validate(cfg);
    if (windows.empty()) throw std::invalid_argument("gru_train: empty dataset");
    for (const auto& w : windows) {
        if (static_cast<int>(w.size()) != cfg.window) {
            throw std::invalid_argument("gru_train: window length mismatch");
        }
    }

    GruParams p = GruParams::random_init(cfg.hidden, rng);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        GruGradients g = gru_gradients(windows, p);
        if (!std::isfinite(g.loss)) throw TrainingDivergence(epoch);
        if (loss_curve) loss_curve->push_back(g.loss);
        p.Wz -= cfg.lr * g.Wz;
        p.Wr -= cfg.lr * g.Wr;
        p.Wh -= cfg.lr * g.Wh;
        p.Uz -= cfg.lr * g.Uz;
        p.Ur -= cfg.lr * g.Ur;
        p.Uh -= cfg.lr * g.Uh;
        p.bz -= cfg.lr * g.bz;
        p.br -= cfg.lr * g.br;
        p.bh -= cfg.lr * g.bh;
        p.w -= cfg.lr * g.w;
        p.b -= cfg.lr * g.b;
    }

    const double final_loss = gru_gradients(windows, p).loss;
    if (!std::isfinite(final_loss)) throw TrainingDivergence(cfg.epochs);
    p.sigma_residual = std::sqrt(final_loss);
    return p;
}

std::optional<Alert> detect(const std::vector<DayFeature>& seq,
                            const DayFeature& observed_next, const GruParams& p,
                            const MonitorConfig& cfg) {
    if (!p.sigma_residual) throw std::logic_error("detect: untrained params");
    const double pred = gru_forward(seq, p).prediction;
    const double tau = cfg.tau_mult * *p.sigma_residual;
    const double deviation = std::abs(pred - observed_next.adherence);
    if (deviation <= tau) return std::nullopt;
    Alert a;
    a.predicted = pred;
    a.observed = observed_next.adherence;
    a.deviation = deviation;
    a.severity = (deviation > 2.0 * tau || observed_next.glucose_z > 3.0)
                     ? AlertSeverity::notify_caregiver
                     : AlertSeverity::notify_user;
    a.source = "gru";
    return a;
}

std::optional<Alert> baseline_detect(const std::vector<DayFeature>& seq,
                                     const DayFeature& observed_next, int window,
                                     double z_threshold) {
    if (static_cast<int>(seq.size()) < window) {
        throw std::invalid_argument("baseline_detect: history shorter than window");
    }
    double mean = 0.0;
    for (std::size_t i = seq.size() - static_cast<std::size_t>(window); i < seq.size();
         ++i) {
        mean += seq[i].adherence;
    }
    mean /= window;
    double var = 0.0;
    for (std::size_t i = seq.size() - static_cast<std::size_t>(window); i < seq.size();
         ++i) {
        var += (seq[i].adherence - mean) * (seq[i].adherence - mean);
    }
    var /= window;
    const double sd = std::max(std::sqrt(var), 1e-3);

    const double deviation = std::abs(observed_next.adherence - mean);
    if (deviation <= z_threshold * sd) return std::nullopt;
    Alert a;
    a.predicted = mean;
    a.observed = observed_next.adherence;
    a.deviation = deviation;
    a.severity = (deviation > 2.0 * z_threshold * sd || observed_next.glucose_z > 3.0)
                     ? AlertSeverity::notify_caregiver
                     : AlertSeverity::notify_user;
    a.source = "rolling";
    return a;
}

std::optional<Alert> threshold_detect(const DayFeature& observed_next, double alert_below,
                                      double caregiver_below) {
    if (observed_next.adherence >= alert_below && observed_next.glucose_z <= 3.0) {
        return std::nullopt;
    }
    Alert a;
    a.predicted = alert_below;
    a.observed = observed_next.adherence;
    a.deviation = std::abs(alert_below - observed_next.adherence);
    a.severity = (observed_next.adherence < caregiver_below || observed_next.glucose_z > 3.0)
                     ? AlertSeverity::notify_caregiver
                     : AlertSeverity::notify_user;
    a.source = "threshold";
    return a;
}

std::vector<DayFeature> standardize(const std::vector<DailyRaw>& raw, int baseline_days,
                                    double hydration_target) {
    const std::size_t base =
        std::min(raw.size(), static_cast<std::size_t>(std::max(baseline_days, 1)));
    auto stats = [&](auto getter) {
        double mean = 0.0;
        for (std::size_t i = 0; i < base; ++i) mean += getter(raw[i]);
        mean /= static_cast<double>(base);
        double var = 0.0;
        for (std::size_t i = 0; i < base; ++i) {
            const double d = getter(raw[i]) - mean;
            var += d * d;
        }
        var /= static_cast<double>(base);
        return std::pair<double, double>{mean, std::max(std::sqrt(var), 1e-6)};
    };
    const auto [gm, gs] = stats([](const DailyRaw& d) { return d.glucose_mean; });
    const auto [hm, hs] = stats([](const DailyRaw& d) { return d.hr_mean; });
    const auto [sm, ss] = stats([](const DailyRaw& d) { return d.steps_total; });

    std::vector<DayFeature> out;
    out.reserve(raw.size());
    for (const auto& d : raw) {
        DayFeature f;
        f.adherence = std::clamp(d.adherence, 0.0, 1.0);
        f.glucose_z = (d.glucose_mean - gm) / gs;
        f.hr_z = (d.hr_mean - hm) / hs;
        f.steps_z = (d.steps_total - sm) / ss;
        f.hydration_frac = hydration_target > 0.0
                               ? std::clamp(d.hydration_total / hydration_target, 0.0, 1.0)
                               : 0.0;
        out.push_back(f);
    }
    return out;
}

std::vector<std::vector<DayFeature>> make_windows(const std::vector<DayFeature>& features,
                                                  int window) {
    std::vector<std::vector<DayFeature>> out;
    if (window < 1 || static_cast<int>(features.size()) < window) return out;
    for (std::size_t start = 0; start + static_cast<std::size_t>(window) <= features.size();
         ++start) {
        out.emplace_back(features.begin() + static_cast<long>(start),
                         features.begin() + static_cast<long>(start) + window);
    }
    return out;
}

} // namespace carecoord

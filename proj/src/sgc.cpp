#include "gal/sgc.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <deque>
#include <string>

#include "gal/error.hpp"
#include "gal/logprob.hpp"

namespace gal {
namespace {

// Per-sample weights: |train| / (#present classes * class count), 1.0 when
// balancing is off.
std::vector<double> class_weights(const std::vector<int>& labels, int num_classes,
                                  bool balanced) {
    std::vector<double> count(static_cast<std::size_t>(num_classes), 0.0);
    for (int y : labels) count[static_cast<std::size_t>(y)] += 1.0;
    int present = 0;
    for (double c : count)
        if (c > 0.0) ++present;
    std::vector<double> w(static_cast<std::size_t>(num_classes), 1.0);
    if (balanced)
        for (int c = 0; c < num_classes; ++c)
            if (count[static_cast<std::size_t>(c)] > 0.0)
                w[static_cast<std::size_t>(c)] =
                    static_cast<double>(labels.size()) / (present * count[static_cast<std::size_t>(c)]);
    return w;
}

struct Packed {
    // Parameter vector layout: W column-major (d*C), then bias (C).
    static Eigen::VectorXd pack(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) {
        Eigen::VectorXd theta(w.size() + b.size());
        theta.head(w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        theta.tail(b.size()) = b;
        return theta;
    }
    static void unpack(const Eigen::VectorXd& theta, Eigen::MatrixXd& w, Eigen::VectorXd& b) {
        w = Eigen::Map<const Eigen::MatrixXd>(theta.data(), w.rows(), w.cols());
        b = theta.tail(b.size());
    }
};

}  // namespace

Eigen::MatrixXd diffuse(const Graph& g, int k) {
    if (k < 0) throw ValidationError("diffusion steps must be >= 0");
    Eigen::MatrixXd x = g.features();
    if (k == 0) return x;
    const Eigen::SparseMatrix<double> s = normalized_adjacency(g);
    for (int step = 0; step < k; ++step) x = s * x;
    return x;
}

double sgc_objective(const Eigen::MatrixXd& diffused, const std::vector<int>& train_nodes,
                     const std::vector<int>& train_labels, int num_classes, const SgcConfig& cfg,
                     const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                     Eigen::VectorXd* grad_out) {
    const auto sample_w = class_weights(train_labels, num_classes, cfg.class_balanced);
    const int rows = static_cast<int>(train_nodes.size());
    Eigen::MatrixXd xt(rows, diffused.cols());
    Eigen::VectorXd wv(rows);
    for (int t = 0; t < rows; ++t) {
        xt.row(t) = diffused.row(train_nodes[static_cast<std::size_t>(t)]);
        wv(t) = sample_w[static_cast<std::size_t>(train_labels[static_cast<std::size_t>(t)])];
    }

    Eigen::MatrixXd logits = (xt * weights).rowwise() + bias.transpose();
    double loss = 0.0;
    Eigen::MatrixXd resid;  // row t: wv(t) * (p_t - onehot(y_t))
    if (grad_out) resid.resize(rows, num_classes);
    for (int t = 0; t < rows; ++t) {
        const int y = train_labels[static_cast<std::size_t>(t)];
        const double m = logits.row(t).maxCoeff();
        const Eigen::RowVectorXd shifted = (logits.row(t).array() - m).exp();
        const double z = shifted.sum();
        loss += wv(t) * (m + std::log(z) - logits(t, y));
        if (grad_out) {
            resid.row(t) = shifted / z;
            resid(t, y) -= 1.0;
            resid.row(t) *= wv(t);
        }
    }
    loss += 0.5 * cfg.l2_weight * weights.squaredNorm();
    if (grad_out) {
        Eigen::MatrixXd grad_w = xt.transpose() * resid + cfg.l2_weight * weights;
        Eigen::VectorXd grad_b = resid.colwise().sum().transpose();
        *grad_out = Packed::pack(grad_w, grad_b);
    }
    return loss;
}

SgcModel fit(const Eigen::MatrixXd& diffused, const std::vector<int>& train_nodes,
             const std::vector<int>& train_labels, int num_classes, const SgcConfig& cfg,
             const SgcModel* init) {
    if (train_nodes.empty()) throw ValidationError("fit needs at least one labeled node");
    if (train_nodes.size() != train_labels.size())
        throw ValidationError("train_nodes and train_labels disagree in length");
    for (std::size_t t = 0; t < train_nodes.size(); ++t) {
        if (train_nodes[t] < 0 || train_nodes[t] >= diffused.rows())
            throw ValidationError("train node index out of range");
        if (train_labels[t] < 0 || train_labels[t] >= num_classes)
            throw ValidationError("train label out of range");
    }
    if (!(cfg.l2_weight >= 0.0)) throw ValidationError("l2_weight must be >= 0");

    const int d = static_cast<int>(diffused.cols());
    Eigen::MatrixXd w = init ? init->weights : Eigen::MatrixXd::Zero(d, num_classes);
    Eigen::VectorXd b = init ? init->bias : Eigen::VectorXd::Zero(num_classes);

    auto eval = [&](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
        Eigen::MatrixXd wt(d, num_classes);
        Eigen::VectorXd bt(num_classes);
        Packed::unpack(theta, wt, bt);
        return sgc_objective(diffused, train_nodes, train_labels, num_classes, cfg, wt, bt, grad);
    };

    // Plain L-BFGS with Armijo backtracking; everything full-batch and
    // deterministic.
    constexpr int kMemory = 10;
    constexpr double kArmijo = 1e-4;
    Eigen::VectorXd theta = Packed::pack(w, b);
    Eigen::VectorXd grad(theta.size());
    double f = eval(theta, &grad);
    std::deque<Eigen::VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    SgcModel model;
    int iter = 0;
    for (; iter < cfg.max_solver_iterations; ++iter) {
        if (grad.cwiseAbs().maxCoeff() <= cfg.solver_tolerance) {
            model.converged = true;
            break;
        }
        // Two-loop recursion.
        Eigen::VectorXd q = grad;
        std::vector<double> alpha(s_hist.size());
        for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
            alpha[static_cast<std::size_t>(h)] =
                rho_hist[static_cast<std::size_t>(h)] * s_hist[static_cast<std::size_t>(h)].dot(q);
            q -= alpha[static_cast<std::size_t>(h)] * y_hist[static_cast<std::size_t>(h)];
        }
        if (!s_hist.empty()) {
            const auto& s_last = s_hist.back();
            const auto& y_last = y_hist.back();
            q *= s_last.dot(y_last) / y_last.dot(y_last);
        }
        for (std::size_t h = 0; h < s_hist.size(); ++h) {
            const double beta = rho_hist[h] * y_hist[h].dot(q);
            q += (alpha[h] - beta) * s_hist[h];
        }
        Eigen::VectorXd dir = -q;
        double slope = grad.dot(dir);
        if (!(slope < 0.0)) {  // fall back to steepest descent
            dir = -grad;
            slope = grad.dot(dir);
        }

        double step = 1.0;
        Eigen::VectorXd theta_next;
        Eigen::VectorXd grad_next(theta.size());
        double f_next = f;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            theta_next = theta + step * dir;
            f_next = eval(theta_next, &grad_next);
            if (f_next <= f + kArmijo * step * slope) {
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;  // no progress possible at double precision

        Eigen::VectorXd s_vec = theta_next - theta;
        Eigen::VectorXd y_vec = grad_next - grad;
        const double sy = s_vec.dot(y_vec);
        if (sy > 1e-10 * s_vec.norm() * y_vec.norm()) {
            s_hist.push_back(std::move(s_vec));
            y_hist.push_back(std::move(y_vec));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > kMemory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = std::move(theta_next);
        grad = std::move(grad_next);
        f = f_next;
    }
    if (!model.converged && grad.cwiseAbs().maxCoeff() <= cfg.solver_tolerance)
        model.converged = true;
    model.iterations = iter;
    model.weights.resize(d, num_classes);
    model.bias.resize(num_classes);
    Packed::unpack(theta, model.weights, model.bias);
    if (!model.weights.allFinite() || !model.bias.allFinite())
        throw ValidationError("solver produced non-finite parameters");
    return model;
}

Eigen::MatrixXd predict_proba(const SgcModel& model, const Eigen::MatrixXd& diffused) {
    Eigen::MatrixXd logits =
        (diffused * model.weights).rowwise() + model.bias.transpose();
    for (int i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        logits.row(i) = (logits.row(i).array() - m).exp();
        logits.row(i) /= logits.row(i).sum();
    }
    return logits;
}

Eigen::MatrixXd log_predict_proba(const SgcModel& model, const Eigen::MatrixXd& diffused) {
    Eigen::MatrixXd logits =
        (diffused * model.weights).rowwise() + model.bias.transpose();
    for (int i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
        logits.row(i) = logits.row(i).array() - lse;
    }
    return logits;
}

double energy_score(const SgcModel& model, const Eigen::MatrixXd& diffused, int i, double tau) {
    if (!(tau > 0.0)) throw ValidationError("energy temperature must be > 0");
    const Eigen::VectorXd logits =
        model.weights.transpose() * diffused.row(i).transpose() + model.bias;
    const double m = logits.maxCoeff();
    return -tau * (m + std::log((logits.array() - m).exp().sum()));
}

}  // namespace gal

#include "mdrl/osi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mdrl {

namespace {
constexpr double kSigmaFloor = 1e-6;

double clamped(double sigma) { return std::max(sigma, kSigmaFloor); }

// Output-bias value placing member j's initial prediction near the (j+1)/(k+1)
// quantile of the squashed output range.
double logit_spread(int j, int k, Rng& rng) {
    const double target = (j + 1.0) / (k + 1.0) + 0.05 * (rng.next_double() - 0.5);
    const double t = std::clamp(target, 0.05, 0.95);
    return std::log(t / (1.0 - t));
}
} // namespace

Posterior Posterior::uniform_over(int n_domains) {
    Posterior p;
    p.form = Form::discrete;
    p.weights.assign(static_cast<std::size_t>(n_domains), 1.0 / n_domains);
    return p;
}

Posterior Posterior::from_weights(std::vector<double> w) {
    Posterior p;
    p.form = Form::discrete;
    p.weights = std::move(w);
    return p;
}

Posterior Posterior::from_moments(std::vector<double> mu, std::vector<double> sigma) {
    Posterior p;
    p.form = Form::moments;
    p.mu = std::move(mu);
    p.sigma = std::move(sigma);
    return p;
}

Posterior Posterior::from_preference(const Preference& pref, const std::vector<std::vector<double>>& kappas) {
    if (pref.is_box()) return from_moments(pref.mu, pref.sigma);
    (void)kappas;
    return from_weights(pref.weights);
}

double Posterior::entropy() const {
    if (form == Form::discrete) {
        double h = 0.0;
        for (double w : weights)
            if (w > 0.0) h -= w * std::log(w);
        return h;
    }
    double h = 0.0;
    for (double s : sigma) h += std::log(clamped(s) * std::sqrt(2.0 * M_PI * M_E));
    return h;
}

std::vector<double> Posterior::domain_weights(const std::vector<std::vector<double>>& kappas) const {
    if (form == Form::discrete) {
        if (weights.size() != kappas.size())
            throw std::invalid_argument("Posterior::domain_weights: length mismatch");
        return weights;
    }
    return Preference::box(mu, sigma).discretize(kappas);
}

std::pair<std::vector<double>, std::vector<double>> Posterior::kappa_moments(
    const std::vector<std::vector<double>>& kappas) const {
    if (form == Form::moments) return {mu, sigma};
    const std::size_t dim = kappas.empty() ? 0 : kappas[0].size();
    std::vector<double> m(dim, 0.0), s(dim, 0.0);
    for (std::size_t j = 0; j < kappas.size(); ++j)
        for (std::size_t c = 0; c < dim; ++c) m[c] += weights[j] * kappas[j][c];
    for (std::size_t j = 0; j < kappas.size(); ++j)
        for (std::size_t c = 0; c < dim; ++c) s[c] += weights[j] * (kappas[j][c] - m[c]) * (kappas[j][c] - m[c]);
    for (double& v : s) v = std::sqrt(v);
    return {m, s};
}

Posterior bayes_filter_step(const Posterior& prior, const MultiDomainMDP& mdp, int s, int a, int s2) {
    if (prior.form != Posterior::Form::discrete)
        throw std::invalid_argument("bayes_filter_step: prior must be discrete");
    if (static_cast<int>(prior.weights.size()) != mdp.n_domains())
        throw std::invalid_argument("bayes_filter_step: prior length mismatch");
    std::vector<double> post(prior.weights.size(), 0.0);
    double z = 0.0;
    for (int d = 0; d < mdp.n_domains(); ++d) {
        post[static_cast<std::size_t>(d)] = mdp.p(d, s, a, s2) * prior.weights[static_cast<std::size_t>(d)];
        z += post[static_cast<std::size_t>(d)];
    }
    if (z <= 0.0) {
        Posterior out = prior;
        out.warning = true;
        return out;
    }
    for (double& w : post) w /= z;
    return Posterior::from_weights(std::move(post));
}

DynamicsModel DynamicsModel::make(const MultiDomainMDP& mdp, double pseudo_count) {
    DynamicsModel dyn;
    dyn.n_states = mdp.n_states;
    dyn.n_actions = mdp.n_actions;
    dyn.n_domains = mdp.n_domains();
    dyn.pseudo_count = pseudo_count;
    dyn.counts.assign(static_cast<std::size_t>(dyn.n_domains) * dyn.n_states * dyn.n_actions * dyn.n_states, 0.0);
    for (const auto& d : mdp.domains) dyn.kappas.push_back(d.kappa);
    // Bandwidth from the spread of the domain parameters.
    double max_dist = 0.0;
    for (std::size_t i = 0; i < dyn.kappas.size(); ++i)
        for (std::size_t j = i + 1; j < dyn.kappas.size(); ++j) {
            double dist = 0.0;
            for (std::size_t c = 0; c < dyn.kappas[i].size(); ++c)
                dist += (dyn.kappas[i][c] - dyn.kappas[j][c]) * (dyn.kappas[i][c] - dyn.kappas[j][c]);
            max_dist = std::max(max_dist, std::sqrt(dist));
        }
    dyn.bandwidth = max_dist > 0.0 ? max_dist / 2.0 : 1.0;
    return dyn;
}

void DynamicsModel::observe(int domain, int s, int a, int s2) {
    counts[((static_cast<std::size_t>(domain) * n_states + s) * n_actions + a) * n_states + s2] += 1.0;
}

double DynamicsModel::prob(int domain, int s, int a, int s2) const {
    const std::size_t base = ((static_cast<std::size_t>(domain) * n_states + s) * n_actions + a) *
                             static_cast<std::size_t>(n_states);
    double total = 0.0;
    for (int t = 0; t < n_states; ++t) total += counts[base + static_cast<std::size_t>(t)];
    const double denom = total + pseudo_count * n_states;
    if (denom <= 0.0) return 0.0; // unsmoothed and never observed
    return (counts[base + static_cast<std::size_t>(s2)] + pseudo_count) / denom;
}

double DynamicsModel::log_prob_at(const std::vector<double>& kappa, int s, int a, int s2,
                                  std::vector<double>* grad) const {
    // Gaussian-kernel weights over the discrete domain set keep the density
    // differentiable in kappa.
    const std::size_t D = kappas.size();
    const std::size_t dim = kappa.size();
    std::vector<double> w(D, 0.0);
    double wmax = -std::numeric_limits<double>::infinity();
    std::vector<double> logits(D, 0.0);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    for (std::size_t j = 0; j < D; ++j) {
        double dist = 0.0;
        for (std::size_t c = 0; c < dim; ++c) dist += (kappa[c] - kappas[j][c]) * (kappa[c] - kappas[j][c]);
        logits[j] = -dist * inv2h2;
        wmax = std::max(wmax, logits[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
        w[j] = std::exp(logits[j] - wmax);
        z += w[j];
    }
    for (double& x : w) x /= z;

    double density = 0.0;
    std::vector<double> probs(D, 0.0);
    for (std::size_t j = 0; j < D; ++j) {
        probs[j] = prob(static_cast<int>(j), s, a, s2);
        density += w[j] * probs[j];
    }
    if (grad) {
        grad->assign(dim, 0.0);
        // dw_j/dk_c = w_j * (dlogit_j/dk_c - sum_l w_l dlogit_l/dk_c)
        std::vector<double> dlogit(D, 0.0);
        for (std::size_t c = 0; c < dim; ++c) {
            double mean_dlogit = 0.0;
            for (std::size_t j = 0; j < D; ++j) {
                dlogit[j] = -2.0 * (kappa[c] - kappas[j][c]) * inv2h2;
                mean_dlogit += w[j] * dlogit[j];
            }
            double ddensity = 0.0;
            for (std::size_t j = 0; j < D; ++j) ddensity += w[j] * (dlogit[j] - mean_dlogit) * probs[j];
            (*grad)[c] = ddensity / density;
        }
    }
    return std::log(density);
}

MlpRegressor MlpRegressor::make(int n_in, int n_hidden, int n_out, Rng& rng) {
    MlpRegressor m;
    m.n_in = n_in;
    m.n_hidden = n_hidden;
    m.n_out = n_out;
    auto init = [&](std::vector<double>& v, std::size_t n, double scale) {
        v.resize(n);
        for (auto& x : v) x = scale * (2.0 * rng.next_double() - 1.0);
    };
    init(m.w1, static_cast<std::size_t>(n_hidden) * n_in, 1.0 / std::sqrt(static_cast<double>(n_in)));
    init(m.b1, static_cast<std::size_t>(n_hidden), 0.1);
    init(m.w2, static_cast<std::size_t>(n_out) * n_hidden, 1.0 / std::sqrt(static_cast<double>(n_hidden)));
    init(m.b2, static_cast<std::size_t>(n_out), 0.1);
    return m;
}

std::vector<double> MlpRegressor::forward(const std::vector<double>& x, const std::vector<double>& lo,
                                          const std::vector<double>& hi, Cache* cache) const {
    std::vector<double> h(static_cast<std::size_t>(n_hidden));
    for (int j = 0; j < n_hidden; ++j) {
        double acc = b1[static_cast<std::size_t>(j)];
        for (int i = 0; i < n_in; ++i) acc += w1[static_cast<std::size_t>(j) * n_in + i] * x[static_cast<std::size_t>(i)];
        h[static_cast<std::size_t>(j)] = std::tanh(acc);
    }
    std::vector<double> u(static_cast<std::size_t>(n_out));
    std::vector<double> y(static_cast<std::size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
        double acc = b2[static_cast<std::size_t>(o)];
        for (int j = 0; j < n_hidden; ++j) acc += w2[static_cast<std::size_t>(o) * n_hidden + j] * h[static_cast<std::size_t>(j)];
        u[static_cast<std::size_t>(o)] = acc;
        const double sig = 1.0 / (1.0 + std::exp(-acc));
        y[static_cast<std::size_t>(o)] = lo[static_cast<std::size_t>(o)] +
                                         (hi[static_cast<std::size_t>(o)] - lo[static_cast<std::size_t>(o)]) * sig;
    }
    if (cache) {
        cache->x = x;
        cache->h = std::move(h);
        cache->u = std::move(u);
    }
    return y;
}

void MlpRegressor::sgd_step(const Cache& cache, const std::vector<double>& dL_dy, const std::vector<double>& lo,
                            const std::vector<double>& hi, double lr) {
    std::vector<double> du(static_cast<std::size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
        const double sig = 1.0 / (1.0 + std::exp(-cache.u[static_cast<std::size_t>(o)]));
        du[static_cast<std::size_t>(o)] = dL_dy[static_cast<std::size_t>(o)] *
                                          (hi[static_cast<std::size_t>(o)] - lo[static_cast<std::size_t>(o)]) * sig *
                                          (1.0 - sig);
    }
    std::vector<double> dh(static_cast<std::size_t>(n_hidden), 0.0);
    for (int o = 0; o < n_out; ++o)
        for (int j = 0; j < n_hidden; ++j)
            dh[static_cast<std::size_t>(j)] += du[static_cast<std::size_t>(o)] * w2[static_cast<std::size_t>(o) * n_hidden + j];
    for (int o = 0; o < n_out; ++o) {
        for (int j = 0; j < n_hidden; ++j)
            w2[static_cast<std::size_t>(o) * n_hidden + j] -= lr * du[static_cast<std::size_t>(o)] * cache.h[static_cast<std::size_t>(j)];
        b2[static_cast<std::size_t>(o)] -= lr * du[static_cast<std::size_t>(o)];
    }
    for (int j = 0; j < n_hidden; ++j) {
        const double t = cache.h[static_cast<std::size_t>(j)];
        const double dpre = dh[static_cast<std::size_t>(j)] * (1.0 - t * t);
        for (int i = 0; i < n_in; ++i)
            w1[static_cast<std::size_t>(j) * n_in + i] -= lr * dpre * cache.x[static_cast<std::size_t>(i)];
        b1[static_cast<std::size_t>(j)] -= lr * dpre;
    }
}

EnsembleOSI EnsembleOSI::make(const MultiDomainMDP& mdp, const std::vector<double>& lo, const std::vector<double>& hi,
                              int k, int n_hidden, Rng& rng) {
    if (k < 1) throw std::invalid_argument("EnsembleOSI::make: k must be >= 1");
    EnsembleOSI osi;
    osi.k = k;
    osi.n_states = mdp.n_states;
    osi.n_actions = mdp.n_actions;
    for (const auto& d : mdp.domains) osi.kappas.push_back(d.kappa);
    osi.lo = lo;
    osi.hi = hi;
    const int dim = static_cast<int>(lo.size());
    const int n_in = 2 * mdp.n_states + mdp.n_actions + 2 * dim;
    for (int j = 0; j < k; ++j) {
        Rng member_rng = rng.split(static_cast<std::uint64_t>(j) + 101);
        auto member = MlpRegressor::make(n_in, n_hidden, dim, member_rng);
        // Spread the output biases so the initial predictions disagree across
        // the range; a near-identical initialization collapses the predictive
        // std immediately and the belief update anchors on it.
        for (int c = 0; c < dim; ++c)
            member.b2[static_cast<std::size_t>(c)] = logit_spread(j, k, member_rng);
        osi.members.push_back(std::move(member));
    }
    return osi;
}

std::vector<double> EnsembleOSI::features(int s, int a, int s2, const Posterior& prior) const {
    const std::size_t dim = lo.size();
    std::vector<double> x(static_cast<std::size_t>(2 * n_states + n_actions) + 2 * dim, 0.0);
    x[static_cast<std::size_t>(s)] = 1.0;
    x[static_cast<std::size_t>(n_states + a)] = 1.0;
    x[static_cast<std::size_t>(n_states + n_actions + s2)] = 1.0;
    auto [m, sd] = prior.kappa_moments(kappas);
    for (std::size_t c = 0; c < dim; ++c) {
        const double range = hi[c] - lo[c];
        x[static_cast<std::size_t>(2 * n_states + n_actions) + c] = range > 0.0 ? (m[c] - lo[c]) / range : 0.0;
        x[static_cast<std::size_t>(2 * n_states + n_actions) + dim + c] = range > 0.0 ? sd[c] / range : 0.0;
    }
    return x;
}

std::vector<std::vector<double>> EnsembleOSI::member_predictions(int s, int a, int s2, const Posterior& prior) const {
    auto x = features(s, a, s2, prior);
    std::vector<std::vector<double>> preds;
    preds.reserve(static_cast<std::size_t>(k));
    for (const auto& m : members) preds.push_back(m.forward(x, lo, hi));
    return preds;
}

Posterior ensemble_predict(const EnsembleOSI& osi, int s, int a, int s2, const Posterior& prior) {
    auto preds = osi.member_predictions(s, a, s2, prior);
    const std::size_t dim = osi.lo.size();
    std::vector<double> mu(dim, 0.0), sd(dim, 0.0);
    for (const auto& p : preds)
        for (std::size_t c = 0; c < dim; ++c) mu[c] += p[c];
    for (double& v : mu) v /= static_cast<double>(preds.size());
    Posterior out;
    if (preds.size() < 2) {
        out = Posterior::from_moments(std::move(mu), std::move(sd));
        out.warning = true;
        return out;
    }
    for (const auto& p : preds)
        for (std::size_t c = 0; c < dim; ++c) sd[c] += (p[c] - mu[c]) * (p[c] - mu[c]);
    for (double& v : sd) v = std::sqrt(v / static_cast<double>(preds.size())); // population convention
    return Posterior::from_moments(std::move(mu), std::move(sd));
}

double kl_discrete(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_discrete: length mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

double kl_gaussian(const std::vector<double>& mu1, const std::vector<double>& sigma1,
                   const std::vector<double>& mu0, const std::vector<double>& sigma0) {
    double kl = 0.0;
    for (std::size_t c = 0; c < mu1.size(); ++c) {
        const double s1 = clamped(sigma1[c]);
        const double s0 = clamped(sigma0[c]);
        kl += std::log(s0 / s1) + (s1 * s1 + (mu1[c] - mu0[c]) * (mu1[c] - mu0[c])) / (2.0 * s0 * s0) - 0.5;
    }
    return kl;
}

double vae_loss(const DynamicsModel& dynamics, const Posterior& posterior_new, const Posterior& posterior_old,
                std::span<const OsiSample> batch) {
    if (batch.empty()) throw std::invalid_argument("vae_loss: empty batch");
    double recon = 0.0;
    for (const auto& item : batch) {
        if (posterior_new.form == Posterior::Form::discrete) {
            double term = 0.0;
            for (std::size_t j = 0; j < posterior_new.weights.size(); ++j) {
                const double w = posterior_new.weights[j];
                if (w <= 0.0) continue;
                const double pr = dynamics.prob(static_cast<int>(j), item.s, item.a, item.s2);
                if (pr <= 0.0) return std::numeric_limits<double>::infinity();
                term += w * (-std::log(pr));
            }
            recon += term;
        } else {
            recon += -dynamics.log_prob_at(posterior_new.mu, item.s, item.a, item.s2);
        }
    }
    recon /= static_cast<double>(batch.size());
    double kl;
    if (posterior_new.form == Posterior::Form::discrete && posterior_old.form == Posterior::Form::discrete) {
        kl = kl_discrete(posterior_new.weights, posterior_old.weights);
    } else {
        auto [mu1, sd1] = posterior_new.kappa_moments(dynamics.kappas);
        auto [mu0, sd0] = posterior_old.kappa_moments(dynamics.kappas);
        kl = kl_gaussian(mu1, sd1, mu0, sd0);
    }
    return recon + kl;
}

double ensemble_update(EnsembleOSI& osi, DynamicsModel& dynamics, std::span<const OsiSample> batch, double lr,
                       Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("ensemble_update: empty batch");
    for (const auto& item : batch) dynamics.observe(item.kappa, item.s, item.a, item.s2);

    const std::size_t dim = osi.lo.size();
    double total_loss = 0.0;
    for (const auto& item : batch) {
        auto x = osi.features(item.s, item.a, item.s2, item.prior);
        std::vector<MlpRegressor::Cache> caches(static_cast<std::size_t>(osi.k));
        std::vector<std::vector<double>> preds(static_cast<std::size_t>(osi.k));
        for (int j = 0; j < osi.k; ++j)
            preds[static_cast<std::size_t>(j)] =
                osi.members[static_cast<std::size_t>(j)].forward(x, osi.lo, osi.hi, &caches[static_cast<std::size_t>(j)]);
        std::vector<double> mu(dim, 0.0), sd(dim, 0.0);
        for (const auto& p : preds)
            for (std::size_t c = 0; c < dim; ++c) mu[c] += p[c];
        for (double& v : mu) v /= osi.k;
        for (const auto& p : preds)
            for (std::size_t c = 0; c < dim; ++c) sd[c] += (p[c] - mu[c]) * (p[c] - mu[c]);
        for (double& v : sd) v = std::sqrt(v / osi.k);

        auto [mu0, sd0] = item.prior.kappa_moments(dynamics.kappas);

        const int j = rng.next_int(osi.k);
        const auto& kj = preds[static_cast<std::size_t>(j)];
        std::vector<double> dlogD;
        const double logD = dynamics.log_prob_at(kj, item.s, item.a, item.s2, &dlogD);
        total_loss += -logD + kl_gaussian(mu, sd, mu0, sd0);

        // d/dk_j of [-ln D(k_j) + KL(mean/std || prior)] through mu and sd.
        // Prior scales are floored at a fraction of the range so that an
        // over-confident stored belief cannot freeze the mean update.
        std::vector<double> dL_dy(dim, 0.0);
        for (std::size_t c = 0; c < dim; ++c) {
            const double range_floor = 0.05 * std::max(osi.hi[c] - osi.lo[c], kSigmaFloor);
            const double s1 = std::max(sd[c], range_floor);
            const double s0 = std::max(sd0[c], range_floor);
            const double dKL_dmu = (mu[c] - mu0[c]) / (s0 * s0);
            const double dKL_dsd = s1 / (s0 * s0) - 1.0 / s1;
            const double dsd_dyj = sd[c] > range_floor ? (kj[c] - mu[c]) / (osi.k * sd[c]) : 0.0;
            dL_dy[c] = -dlogD[c] + dKL_dmu / osi.k + dKL_dsd * dsd_dyj;
        }
        osi.members[static_cast<std::size_t>(j)].sgd_step(caches[static_cast<std::size_t>(j)], dL_dy, osi.lo, osi.hi,
                                                          lr);
    }
    return total_loss / static_cast<double>(batch.size());
}

double ensemble_update_regression(EnsembleOSI& osi, std::span<const OsiSample> batch, double lr, Rng& rng) {
    if (batch.empty()) throw std::invalid_argument("ensemble_update_regression: empty batch");
    const std::size_t dim = osi.lo.size();
    double total_loss = 0.0;
    for (const auto& item : batch) {
        auto x = osi.features(item.s, item.a, item.s2, item.prior);
        const int j = rng.next_int(osi.k);
        MlpRegressor::Cache cache;
        auto y = osi.members[static_cast<std::size_t>(j)].forward(x, osi.lo, osi.hi, &cache);
        const auto& target = osi.kappas[static_cast<std::size_t>(item.kappa)];
        std::vector<double> dL_dy(dim, 0.0);
        for (std::size_t c = 0; c < dim; ++c) {
            const double err = y[c] - target[c];
            total_loss += err * err;
            dL_dy[c] = 2.0 * err;
        }
        osi.members[static_cast<std::size_t>(j)].sgd_step(cache, dL_dy, osi.lo, osi.hi, lr);
    }
    return total_loss / static_cast<double>(batch.size());
}

} // namespace mdrl

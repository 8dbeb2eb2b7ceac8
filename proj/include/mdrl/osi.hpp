#pragma once

#include <span>
#include <vector>

#include "mdrl/mdp.hpp"
#include "mdrl/rng.hpp"

namespace mdrl {

/// Belief over domains: exact-filter form (weights over the finite domain set)
/// or ensemble form (mean/std per kappa coordinate).
struct Posterior {
    enum class Form { discrete, moments };
    Form form = Form::discrete;
    std::vector<double> weights;
    std::vector<double> mu;
    std::vector<double> sigma;
    bool warning = false; ///< zero-likelihood fallback, or std from a single member

    static Posterior uniform_over(int n_domains);
    static Posterior from_weights(std::vector<double> w);
    static Posterior from_moments(std::vector<double> mu, std::vector<double> sigma);
    static Posterior from_preference(const Preference& pref, const std::vector<std::vector<double>>& kappas);

    /// Shannon entropy for discrete form; Gaussian differential-entropy
    /// surrogate for the moments form.
    double entropy() const;
    /// Weights over the finite domain set; the moments form is projected as a
    /// uniform box over its support.
    std::vector<double> domain_weights(const std::vector<std::vector<double>>& kappas) const;
    /// Mean/std of kappa under the belief, given the domain parameters.
    std::pair<std::vector<double>, std::vector<double>> kappa_moments(
        const std::vector<std::vector<double>>& kappas) const;
};

/// Exact Bayes step against the true kernels: posterior proportional to
/// P_kappa(s'|s,a) * prior(kappa). If every likelihood is zero the prior is
/// returned unchanged with the warning flag set.
Posterior bayes_filter_step(const Posterior& prior, const MultiDomainMDP& mdp, int s, int a, int s2);

/// Laplace-smoothed empirical categorical next-state model per
/// (domain, state, action); exact for tabular environments in the limit.
/// Carries the domain parameters so the density can be queried at arbitrary
/// kappa through kernel interpolation.
struct DynamicsModel {
    int n_states = 0;
    int n_actions = 0;
    int n_domains = 0;
    double pseudo_count = 0.1;
    std::vector<double> counts; ///< [domain][s][a][s']
    std::vector<std::vector<double>> kappas;
    double bandwidth = 1.0;

    static DynamicsModel make(const MultiDomainMDP& mdp, double pseudo_count = 0.1);
    void observe(int domain, int s, int a, int s2);
    double prob(int domain, int s, int a, int s2) const;
    /// ln p(s'|s,a,kappa) smoothed over the domain set; optionally returns the
    /// gradient with respect to kappa.
    double log_prob_at(const std::vector<double>& kappa, int s, int a, int s2,
                       std::vector<double>* grad = nullptr) const;
};

/// One transition plus the belief that was in effect when it was sampled.
struct OsiSample {
    int s = 0, a = 0, s2 = 0;
    int kappa = 0; ///< true domain index
    Posterior prior;
};

/// Small two-layer regressor with tanh hidden units and a range-squashed
/// output; trained by plain SGD with manually derived gradients.
struct MlpRegressor {
    int n_in = 0, n_hidden = 0, n_out = 0;
    std::vector<double> w1, b1, w2, b2;

    static MlpRegressor make(int n_in, int n_hidden, int n_out, Rng& rng);
    struct Cache {
        std::vector<double> x, h, u; ///< input, tanh activations, output preactivations
    };
    std::vector<double> forward(const std::vector<double>& x, const std::vector<double>& lo,
                                const std::vector<double>& hi, Cache* cache = nullptr) const;
    void sgd_step(const Cache& cache, const std::vector<double>& dL_dy, const std::vector<double>& lo,
                  const std::vector<double>& hi, double lr);
};

/// Ensemble of k regressors mapping (s, a, s', belief) to a kappa estimate;
/// the belief output is the mean/std of the member predictions.
struct EnsembleOSI {
    int k = 4;
    int n_states = 0, n_actions = 0;
    std::vector<std::vector<double>> kappas;
    std::vector<double> lo, hi; ///< kappa range for feature scaling and output squash
    std::vector<MlpRegressor> members;

    static EnsembleOSI make(const MultiDomainMDP& mdp, const std::vector<double>& lo, const std::vector<double>& hi,
                            int k, int n_hidden, Rng& rng);
    std::vector<double> features(int s, int a, int s2, const Posterior& prior) const;
    std::vector<std::vector<double>> member_predictions(int s, int a, int s2, const Posterior& prior) const;
};

/// Mean/std (population convention) of the member predictions. k < 2 yields
/// sigma = 0 with the warning flag set.
Posterior ensemble_predict(const EnsembleOSI& osi, int s, int a, int s2, const Posterior& prior);

/// Two-term variational objective: E_{kappa ~ new}[-ln D] + KL(new || old).
/// Exact finite sums for discrete posteriors; Gaussian moment-matched KL and a
/// mean-point reconstruction for the moments form. Returns +infinity when a
/// next state has zero probability under every supported kappa.
double vae_loss(const DynamicsModel& dynamics, const Posterior& posterior_new, const Posterior& posterior_old,
                std::span<const OsiSample> batch);

/// One SGD step on the variational objective for a uniformly chosen member per
/// sample; dynamics counts are updated from the batch first. Returns the mean
/// per-sample objective at the pre-update parameters.
double ensemble_update(EnsembleOSI& osi, DynamicsModel& dynamics, std::span<const OsiSample> batch, double lr,
                       Rng& rng);

/// Plain regression alternative: squared error of a uniformly chosen member's
/// prediction against the true kappa.
double ensemble_update_regression(EnsembleOSI& osi, std::span<const OsiSample> batch, double lr, Rng& rng);

double kl_discrete(const std::vector<double>& p, const std::vector<double>& q);
double kl_gaussian(const std::vector<double>& mu1, const std::vector<double>& sigma1,
                   const std::vector<double>& mu0, const std::vector<double>& sigma0);

} // namespace mdrl

#include "mdrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mdrl/io.hpp"

namespace mdrl {

ScoreStats summarize(std::vector<double> samples) {
    ScoreStats st;
    st.n = static_cast<int>(samples.size());
    if (samples.empty()) return st;
    double sum = 0.0;
    for (double v : samples) sum += v;
    st.mean = sum / st.n;
    double var = 0.0;
    for (double v : samples) var += (v - st.mean) * (v - st.mean);
    st.stderr_ = st.n > 1 ? std::sqrt(var / (st.n - 1) / st.n) : 0.0;

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t lo = n / 4;
    const std::size_t hi = n - n / 4; // middle half [lo, hi)
    double iq_sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) iq_sum += sorted[i];
    st.iqm = iq_sum / static_cast<double>(hi - lo);
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        return i + 1 < n ? sorted[i] * (1.0 - frac) + sorted[i + 1] * frac : sorted[i];
    };
    st.iqr = quantile(0.75) - quantile(0.25);
    st.samples = std::move(samples);
    return st;
}

double rollout_return(const MultiDomainMDP& mdp, int domain, const PolicyTable& policy, int episode_len, Rng rng) {
    int s = rng.categorical(mdp.initial_dist);
    double ret = 0.0;
    double discount = 1.0;
    for (int t = 0; t < episode_len; ++t) {
        std::vector<double> row(static_cast<std::size_t>(mdp.n_actions));
        for (int a = 0; a < mdp.n_actions; ++a) row[static_cast<std::size_t>(a)] = policy.at(s, a);
        const int a = rng.categorical(row);
        auto [s2, r] = sample_transition(mdp, domain, s, a, rng);
        ret += discount * r;
        discount *= mdp.gamma;
        s = s2;
    }
    return ret;
}

ScoreStats ccs_score(const UniversalPolicy& policy, const PreferenceGrid& grid, const MultiDomainMDP& eval_mdp,
                     const Preference& pref, int trials, int episode_len, Rng rng) {
    if (trials < 1) throw std::invalid_argument("ccs_score: trials must be >= 1");
    std::vector<std::vector<double>> eval_kappas;
    for (const auto& d : eval_mdp.domains) eval_kappas.push_back(d.kappa);
    const std::vector<double> weights = pref.is_box() ? pref.discretize(eval_kappas) : pref.weights;
    if (weights.size() != static_cast<std::size_t>(eval_mdp.n_domains()))
        throw std::invalid_argument("ccs_score: preference does not match the evaluation domain set");

    const int cond_cell = grid.nearest_cell(pref.is_box() ? pref.discretize(eval_kappas) : pref.weights);
    const PolicyTable slice = policy.slice(cond_cell);

    std::vector<double> samples(static_cast<std::size_t>(trials), 0.0);
    const int D = eval_mdp.n_domains();
#pragma omp parallel for schedule(static)
    for (int t = 0; t < trials; ++t) {
        double acc = 0.0;
        for (int d = 0; d < D; ++d) {
            const double w = weights[static_cast<std::size_t>(d)];
            if (w == 0.0) continue;
            Rng episode_rng = rng.split(static_cast<std::uint64_t>(d) * 1000003ULL + static_cast<std::uint64_t>(t));
            acc += w * rollout_return(eval_mdp, d, slice, episode_len, episode_rng);
        }
        samples[static_cast<std::size_t>(t)] = acc;
    }
    return summarize(std::move(samples));
}

OsiMode osi_mode_from_string(const std::string& name) {
    if (name == "fixed-full") return OsiMode::fixed_full;
    if (name == "exact-bayes") return OsiMode::exact_bayes;
    if (name == "ensemble") return OsiMode::ensemble;
    throw std::invalid_argument("unknown OSI mode: " + name);
}

std::string osi_mode_name(OsiMode mode) {
    switch (mode) {
    case OsiMode::fixed_full: return "fixed-full";
    case OsiMode::exact_bayes: return "exact-bayes";
    case OsiMode::ensemble: return "ensemble";
    }
    return "?";
}

OsiEvalResult evaluate_with_osi(const UniversalPolicy& policy, const PreferenceGrid& grid, const MultiDomainMDP& mdp,
                                OsiMode mode, int episodes, int episode_len, const EnsembleOSI* osi, Rng rng) {
    if (mode == OsiMode::ensemble && !osi)
        throw std::invalid_argument("evaluate_with_osi: ensemble mode needs an identifier");
    const int D = mdp.n_domains();
    std::vector<std::vector<double>> kappas;
    for (const auto& d : mdp.domains) kappas.push_back(d.kappa);

    OsiEvalResult res;
    res.true_domain.resize(static_cast<std::size_t>(episodes));
    res.returns.resize(static_cast<std::size_t>(episodes));
    res.final_beliefs.resize(static_cast<std::size_t>(episodes));
#pragma omp parallel for schedule(static)
    for (int ep = 0; ep < episodes; ++ep) {
        const int domain = ep % D;
        Rng episode_rng = rng.split(static_cast<std::uint64_t>(ep));
        Posterior belief = Posterior::uniform_over(D);
        int s = episode_rng.categorical(mdp.initial_dist);
        double ret = 0.0;
        double discount = 1.0;
        for (int t = 0; t < episode_len; ++t) {
            const std::vector<double> w =
                mode == OsiMode::fixed_full ? Posterior::uniform_over(D).weights : belief.domain_weights(kappas);
            const int cell = grid.nearest_cell(w);
            std::vector<double> row(static_cast<std::size_t>(mdp.n_actions));
            for (int a = 0; a < mdp.n_actions; ++a) row[static_cast<std::size_t>(a)] = policy.at(cell, s, a);
            const int a = episode_rng.categorical(row);
            auto [s2, r] = sample_transition(mdp, domain, s, a, episode_rng);
            ret += discount * r;
            discount *= mdp.gamma;
            if (mode == OsiMode::exact_bayes)
                belief = bayes_filter_step(belief, mdp, s, a, s2);
            else if (mode == OsiMode::ensemble)
                belief = ensemble_predict(*osi, s, a, s2, belief);
            s = s2;
        }
        res.true_domain[static_cast<std::size_t>(ep)] = domain;
        res.returns[static_cast<std::size_t>(ep)] = ret;
        res.final_beliefs[static_cast<std::size_t>(ep)] = belief;
    }
    res.per_domain_mean.assign(static_cast<std::size_t>(D), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(D), 0);
    double total = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        res.per_domain_mean[static_cast<std::size_t>(res.true_domain[static_cast<std::size_t>(ep)])] +=
            res.returns[static_cast<std::size_t>(ep)];
        ++counts[static_cast<std::size_t>(res.true_domain[static_cast<std::size_t>(ep)])];
        total += res.returns[static_cast<std::size_t>(ep)];
    }
    for (int d = 0; d < D; ++d)
        if (counts[static_cast<std::size_t>(d)] > 0)
            res.per_domain_mean[static_cast<std::size_t>(d)] /= counts[static_cast<std::size_t>(d)];
    res.mean_return = episodes > 0 ? total / episodes : 0.0;
    return res;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (seeds[i] == seeds[j]) throw std::invalid_argument("ExperimentConfig: seeds must be distinct");
    if (eval_prefs.empty()) throw std::invalid_argument("ExperimentConfig: no evaluation preferences");
}

namespace {

std::vector<Preference> default_eval_prefs(const EnvSpec& env) {
    std::vector<Preference> prefs;
    if (env.name == "two_domain_chain") {
        for (int i = 0; i < 11; ++i)
            prefs.push_back(Preference::discrete({1.0 - 0.1 * i, 0.1 * i}));
        return prefs;
    }
    // Eleven boxes inside the full slip range, as (center, width) fractions.
    const double lo = env.kappa_lo.at(0);
    const double hi = env.kappa_hi.at(0);
    const double range = hi - lo;
    const double inv_sqrt12 = 1.0 / std::sqrt(12.0);
    const std::pair<double, double> fractions[] = {{0.5, 1.0}, {0.25, 0.5}, {0.75, 0.5}, {0.5, 0.5},
                                                   {0.1, 0.2}, {0.9, 0.2},  {0.3, 0.3},  {0.7, 0.3},
                                                   {0.5, 0.2}, {0.2, 0.1},  {0.8, 0.1}};
    for (auto [center, width] : fractions) {
        double mu = lo + center * range;
        double sigma = width * range * inv_sqrt12;
        // Clamp the support into the full randomization range.
        double half = std::sqrt(3.0) * sigma;
        double a = std::max(lo, mu - half), b = std::min(hi, mu + half);
        prefs.push_back(Preference::box({0.5 * (a + b)}, {(b - a) * inv_sqrt12}));
    }
    return prefs;
}

} // namespace

ExperimentConfig default_experiment_config(const std::string& env_name) {
    ExperimentConfig cfg;
    cfg.env = default_env_spec(env_name);
    cfg.algos = {"cmdrl"};
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8}; // eight-seed protocol
    cfg.eval_prefs = default_eval_prefs(cfg.env);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_experiment_config: cannot open " + path);
    ExperimentConfig cfg = default_experiment_config("two_domain_chain");
    cfg.algos.clear();
    std::string line;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    };
    std::string env_name = cfg.env.name;
    EnvSpec env_overrides = cfg.env;
    bool env_changed = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        if (key == "env") {
            env_name = value;
            env_overrides = default_env_spec(value);
            env_changed = true;
        } else if (key == "algos") {
            cfg.algos = split_list(value);
        } else if (key == "seeds") {
            cfg.seeds.clear();
            for (const auto& s : split_list(value)) cfg.seeds.push_back(std::stoull(s));
        } else if (key == "grid_resolution") {
            cfg.grid_resolution = std::stoi(value);
        } else if (key == "alpha") {
            cfg.alpha = std::stod(value);
        } else if (key == "tol") {
            cfg.tol = std::stod(value);
        } else if (key == "trials") {
            cfg.trials = std::stoi(value);
        } else if (key == "episode_len") {
            cfg.episode_len = std::stoi(value);
        } else if (key == "total_steps") {
            cfg.total_steps = std::stol(value);
        } else if (key == "warmup") {
            cfg.warmup = std::stol(value);
        } else if (key == "batch") {
            cfg.batch = std::stoi(value);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "chain_length") {
            env_overrides.length = std::stoi(value);
            env_changed = true;
        } else if (key == "slip_a") {
            env_overrides.slip_a = std::stod(value);
            env_changed = true;
        } else if (key == "slip_b") {
            env_overrides.slip_b = std::stod(value);
            env_changed = true;
        } else if (key == "step_cost") {
            env_overrides.step_cost = std::stod(value);
            env_changed = true;
        } else if (key == "goal_reward") {
            env_overrides.goal_reward = std::stod(value);
            env_changed = true;
        } else if (key == "gamma") {
            env_overrides.gamma = std::stod(value);
            env_changed = true;
        } else {
            throw std::runtime_error("load_experiment_config: unknown key '" + key + "'");
        }
    }
    if (env_changed) {
        env_overrides.name = env_name;
        cfg.env = env_overrides;
        cfg.eval_prefs = default_eval_prefs(cfg.env);
    }
    return cfg;
}

bool is_solver_algo(const std::string& name) {
    return name == "dr" || name == "cmdrl" || name == "emdrl" || name == "umdrl1" || name == "umdrl2";
}

SolveResult run_solver(const std::string& name, const MultiDomainMDP& mdp, const PreferenceGrid& grid,
                       const SolveOptions& opts) {
    if (name == "dr") return solve_dr(mdp, Preference::uniform(mdp.n_domains()), opts);
    if (name == "cmdrl") return solve_cmdrl(mdp, grid, opts);
    if (name == "emdrl") return solve_emdrl(mdp, grid, opts);
    if (name == "umdrl1") return solve_umdrl_v1(mdp, grid, opts);
    if (name == "umdrl2") return solve_umdrl_v2(mdp, grid, opts);
    throw std::invalid_argument("unknown solver: " + name);
}

namespace {

struct CellOutcome {
    bool ok = false;
    std::string error;
    std::vector<ScoreStats> per_pref;
};

UniversalPolicy policy_for_cell(const std::string& algo, std::uint64_t seed, const MultiDomainMDP& mdp,
                                const ExperimentConfig& cfg, const PreferenceGrid& grid) {
    if (is_solver_algo(algo)) {
        SolveOptions opts;
        opts.alpha = cfg.alpha;
        opts.tol = cfg.tol;
        auto res = run_solver(algo, mdp, grid, opts);
        if (algo == "dr") {
            // Replicate the single DR policy across all cells for uniform scoring.
            UniversalPolicy up = UniversalPolicy::uniform(grid.n_cells(), mdp.n_states, mdp.n_actions);
            for (int c = 0; c < grid.n_cells(); ++c)
                for (int s = 0; s < mdp.n_states; ++s)
                    for (int a = 0; a < mdp.n_actions; ++a) up.at(c, s, a) = res.policy.at(0, s, a);
            return up;
        }
        return res.policy;
    }
    TrainConfig tc;
    tc.algo = algo_from_string(algo);
    tc.total_steps = cfg.total_steps;
    tc.warmup = cfg.warmup;
    tc.batch = cfg.batch;
    tc.alpha = cfg.alpha;
    tc.grid_resolution = cfg.grid_resolution;
    tc.seed = seed;
    auto res = run_training(mdp, tc);
    if (tc.algo == Algo::drsac) {
        UniversalPolicy up = UniversalPolicy::uniform(grid.n_cells(), mdp.n_states, mdp.n_actions);
        for (int c = 0; c < grid.n_cells(); ++c)
            for (int s = 0; s < mdp.n_states; ++s)
                for (int a = 0; a < mdp.n_actions; ++a) up.at(c, s, a) = res.policy.at(0, s, a);
        return up;
    }
    return res.policy;
}

} // namespace

void run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    MultiDomainMDP train_mdp;
    MultiDomainMDP eval_mdp;
    if (cfg.env.name == "continuous_slip_chain") {
        auto [train, eval] = solve_sigma_point_pair(1, 10, 1e-6, 12345);
        auto env = build_continuous_slip_chain(cfg.env.length, cfg.env.kappa_lo[0], cfg.env.kappa_hi[0], train, eval);
        train_mdp = env.mdp;
        eval_mdp = env.eval_mdp;
    } else {
        train_mdp = build_env(cfg.env);
        eval_mdp = train_mdp;
    }
    PreferenceGrid grid = PreferenceGrid::simplex(train_mdp.n_domains(), cfg.grid_resolution);

    const int n_cells = static_cast<int>(cfg.algos.size() * cfg.seeds.size());
    std::vector<CellOutcome> outcomes(static_cast<std::size_t>(n_cells));
#pragma omp parallel for schedule(dynamic)
    for (int cell = 0; cell < n_cells; ++cell) {
        const std::size_t ai = static_cast<std::size_t>(cell) / cfg.seeds.size();
        const std::size_t si = static_cast<std::size_t>(cell) % cfg.seeds.size();
        auto& outcome = outcomes[static_cast<std::size_t>(cell)];
        try {
            auto policy = policy_for_cell(cfg.algos[ai], cfg.seeds[si], train_mdp, cfg, grid);
            for (std::size_t p = 0; p < cfg.eval_prefs.size(); ++p) {
                Rng pref_rng = Rng(cfg.seeds[si]).split(7000 + p);
                outcome.per_pref.push_back(
                    ccs_score(policy, grid, eval_mdp, cfg.eval_prefs[p], cfg.trials, cfg.episode_len, pref_rng));
            }
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
    }

    CsvWriter scores(cfg.out_dir + "/scores.csv",
                     {"algo", "seed", "pref_id", "score", "iqm", "iqr", "stderr"});
    std::ofstream errors_out;
    for (std::size_t ai = 0; ai < cfg.algos.size(); ++ai)
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            const auto& outcome = outcomes[ai * cfg.seeds.size() + si];
            if (!outcome.ok) {
                if (!errors_out.is_open()) errors_out.open(cfg.out_dir + "/errors.csv", std::ios::binary);
                errors_out << cfg.algos[ai] << ',' << cfg.seeds[si] << ',' << outcome.error << '\n';
                continue;
            }
            for (std::size_t p = 0; p < outcome.per_pref.size(); ++p) {
                const auto& st = outcome.per_pref[p];
                scores.row({cfg.algos[ai], std::to_string(cfg.seeds[si]), std::to_string(p)},
                           {st.mean, st.iqm, st.iqr, st.stderr_});
            }
        }

    // Summary pooled over seeds x trials, one row per preference.
    std::vector<std::string> columns = {"pref_id"};
    for (const auto& algo : cfg.algos) {
        columns.push_back(algo + "_iqm");
        columns.push_back(algo + "_iqr");
    }
    CsvWriter summary(cfg.out_dir + "/summary.csv", columns);
    for (std::size_t p = 0; p < cfg.eval_prefs.size(); ++p) {
        std::vector<double> nums;
        for (std::size_t ai = 0; ai < cfg.algos.size(); ++ai) {
            std::vector<double> pooled;
            for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
                const auto& outcome = outcomes[ai * cfg.seeds.size() + si];
                if (!outcome.ok) continue;
                const auto& st = outcome.per_pref[p];
                pooled.insert(pooled.end(), st.samples.begin(), st.samples.end());
            }
            auto st = summarize(std::move(pooled));
            nums.push_back(st.iqm);
            nums.push_back(st.iqr);
        }
        summary.row({std::to_string(p)}, nums);
    }
}

void save_qtable_csv(const QTable& q, const std::string& path) {
    CsvWriter csv(path, {"cell", "domain", "state", "action", "q"});
    for (int c = 0; c < q.n_cells; ++c)
        for (int d = 0; d < q.n_domains; ++d)
            for (int s = 0; s < q.n_states; ++s)
                for (int a = 0; a < q.n_actions; ++a)
                    csv.row({std::to_string(c), std::to_string(d), std::to_string(s), std::to_string(a)},
                            {q.at(c, d, s, a)});
}

void save_policy_csv(const UniversalPolicy& policy, const std::string& path) {
    CsvWriter csv(path, {"cell", "state", "action", "prob"});
    for (int c = 0; c < policy.n_cells; ++c)
        for (int s = 0; s < policy.n_states; ++s)
            for (int a = 0; a < policy.n_actions; ++a)
                csv.row({std::to_string(c), std::to_string(s), std::to_string(a)}, {policy.at(c, s, a)});
}

UniversalPolicy load_policy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_policy_csv: cannot open " + path);
    std::string line;
    std::getline(in, line); // header
    struct Row {
        int c, s, a;
        double p;
    };
    std::vector<Row> rows;
    int max_c = -1, max_s = -1, max_a = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        Row r{};
        char comma;
        ss >> r.c >> comma >> r.s >> comma >> r.a >> comma >> r.p;
        rows.push_back(r);
        max_c = std::max(max_c, r.c);
        max_s = std::max(max_s, r.s);
        max_a = std::max(max_a, r.a);
    }
    UniversalPolicy up = UniversalPolicy::uniform(max_c + 1, max_s + 1, max_a + 1);
    for (const auto& r : rows) up.at(r.c, r.s, r.a) = r.p;
    return up;
}

} // namespace mdrl

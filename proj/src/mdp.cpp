#include "mdrl/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mdrl/io.hpp"

namespace mdrl {

namespace {
constexpr double kSumTol = 1e-9;

bool is_prob_vector(std::span<const double> v, double* sum_out = nullptr) {
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) return false;
        sum += x;
    }
    if (sum_out) *sum_out = sum;
    return std::abs(sum - 1.0) <= kSumTol;
}
} // namespace

double MultiDomainMDP::max_abs_reward() const {
    double m = 0.0;
    for (const auto& d : domains)
        for (double r : d.reward) m = std::max(m, std::abs(r));
    return m;
}

Preference Preference::discrete(std::vector<double> w) {
    Preference p;
    p.kind = PrefKind::discrete;
    p.weights = std::move(w);
    return p;
}

Preference Preference::delta(int domain, int n_domains) {
    if (domain < 0 || domain >= n_domains) throw std::out_of_range("Preference::delta: domain index");
    Preference p;
    p.kind = PrefKind::delta;
    p.weights.assign(static_cast<std::size_t>(n_domains), 0.0);
    p.weights[domain] = 1.0;
    return p;
}

Preference Preference::uniform(int n_domains) {
    Preference p;
    p.kind = PrefKind::discrete;
    p.weights.assign(static_cast<std::size_t>(n_domains), 1.0 / n_domains);
    return p;
}

Preference Preference::box(std::vector<double> mu, std::vector<double> sigma) {
    if (mu.size() != sigma.size()) throw std::invalid_argument("Preference::box: mu/sigma size mismatch");
    for (double s : sigma)
        if (!(s >= 0.0)) throw std::invalid_argument("Preference::box: sigma must be nonnegative");
    Preference p;
    p.kind = PrefKind::uniform_box;
    p.mu = std::move(mu);
    p.sigma = std::move(sigma);
    return p;
}

std::pair<std::vector<double>, std::vector<double>> Preference::support() const {
    if (!is_box()) throw std::logic_error("Preference::support: not a uniform-box preference");
    const double half = std::sqrt(3.0);
    std::vector<double> lo(mu.size()), hi(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        lo[i] = mu[i] - half * sigma[i];
        hi[i] = mu[i] + half * sigma[i];
    }
    return {lo, hi};
}

std::vector<double> Preference::discretize(const std::vector<std::vector<double>>& kappas) const {
    const std::size_t n = kappas.size();
    if (kind != PrefKind::uniform_box) {
        if (weights.size() != n) throw std::invalid_argument("Preference::discretize: weight length mismatch");
        return weights;
    }
    auto [lo, hi] = support();
    std::vector<double> w(n, 0.0);
    double total = 0.0;
    const double eps = 1e-12;
    for (std::size_t j = 0; j < n; ++j) {
        bool inside = true;
        for (std::size_t c = 0; c < mu.size(); ++c)
            if (kappas[j][c] < lo[c] - eps || kappas[j][c] > hi[c] + eps) inside = false;
        if (inside) {
            w[j] = 1.0;
            total += 1.0;
        }
    }
    if (total == 0.0) {
        // Support covers no domain parameter: fall back to the nearest kappa.
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            double d = 0.0;
            for (std::size_t c = 0; c < mu.size(); ++c) d += (kappas[j][c] - mu[c]) * (kappas[j][c] - mu[c]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        w[best] = 1.0;
        return w;
    }
    for (double& x : w) x /= total;
    return w;
}

void Preference::validate(int n_domains) const {
    if (kind == PrefKind::uniform_box) {
        if (mu.empty() || mu.size() != sigma.size())
            throw std::invalid_argument("Preference: malformed uniform-box");
        for (double s : sigma)
            if (!(s >= 0.0)) throw std::invalid_argument("Preference: negative sigma");
        return;
    }
    double sum = 0.0;
    if (static_cast<int>(weights.size()) != n_domains)
        throw std::invalid_argument("Preference: weight length does not match domain count");
    if (!is_prob_vector(weights, &sum))
        throw std::invalid_argument("Preference: weights are not a probability vector");
    if (kind == PrefKind::delta) {
        int ones = 0;
        for (double w : weights)
            if (w == 1.0) ++ones;
        if (ones != 1) throw std::invalid_argument("Preference: delta must have exactly one unit entry");
    }
}

PreferenceGrid PreferenceGrid::simplex(int n_domains, int resolution) {
    if (n_domains < 1) throw std::invalid_argument("PreferenceGrid: need at least one domain");
    if (resolution < 1) throw std::invalid_argument("PreferenceGrid: resolution must be >= 1");
    PreferenceGrid grid;
    grid.n_domains = n_domains;
    grid.resolution = resolution;
    std::vector<int> counts(static_cast<std::size_t>(n_domains), 0);
    // Ascending lexicographic enumeration of compositions of `resolution`.
    auto emit = [&]() {
        std::vector<double> w(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) w[i] = static_cast<double>(counts[i]) / resolution;
        grid.cells.push_back(Preference::discrete(std::move(w)));
    };
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n_domains - 1) {
            counts[pos] = remaining;
            emit();
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[pos] = k;
            self(self, pos + 1, remaining - k);
        }
    };
    rec(rec, 0, resolution);
    return grid;
}

int PreferenceGrid::one_hot_cell(int domain) const {
    for (int c = 0; c < n_cells(); ++c)
        if (cells[c].weights[domain] == 1.0) return c;
    throw std::logic_error("PreferenceGrid: missing one-hot cell");
}

int PreferenceGrid::nearest_cell(const std::vector<double>& w) const {
    if (static_cast<int>(w.size()) != n_domains)
        throw std::invalid_argument("PreferenceGrid::nearest_cell: length mismatch");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_cells(); ++c) {
        double d = 0.0;
        for (int i = 0; i < n_domains; ++i) {
            double diff = cells[c].weights[i] - w[i];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::vector<std::string> validate_mdp(const MultiDomainMDP& mdp) {
    std::vector<std::string> out;
    auto fail = [&](const std::string& msg) { out.push_back(msg); };

    if (mdp.n_states < 1) fail("n_states must be positive");
    if (mdp.n_actions < 1) fail("n_actions must be positive");
    if (!(mdp.gamma > 0.0 && mdp.gamma < 1.0)) fail("gamma out of range (need 0 < gamma < 1)");
    if (mdp.domains.empty()) fail("no domains");
    if (!out.empty() && (mdp.n_states < 1 || mdp.n_actions < 1 || mdp.domains.empty())) return out;

    const std::size_t S = static_cast<std::size_t>(mdp.n_states);
    const std::size_t A = static_cast<std::size_t>(mdp.n_actions);

    if (mdp.initial_dist.size() != S)
        fail("initial_dist has wrong length");
    else if (!is_prob_vector(mdp.initial_dist))
        fail("initial_dist is not a probability vector");

    const std::size_t kdim = mdp.domains[0].kappa.size();
    for (int d = 0; d < mdp.n_domains(); ++d) {
        const auto& dom = mdp.domains[static_cast<std::size_t>(d)];
        std::string tag = "domain " + std::to_string(d);
        if (dom.kappa.size() != kdim) fail(tag + ": kappa dimension mismatch");
        for (double k : dom.kappa)
            if (!std::isfinite(k)) fail(tag + ": kappa not finite");
        if (dom.transition.size() != S * A * S) {
            fail(tag + ": transition tensor has wrong shape");
            continue;
        }
        if (dom.reward.size() != S * A) fail(tag + ": reward tensor has wrong shape");
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a) {
                double sum = 0.0;
                if (!is_prob_vector(mdp.row(d, s, a), &sum))
                    fail(tag + ": transition row (s=" + std::to_string(s) + ",a=" + std::to_string(a) +
                         ") sums to " + fmt_fixed8(sum) + " or has negative entries");
            }
        for (double r : dom.reward)
            if (!std::isfinite(r)) fail(tag + ": reward not finite");
    }
    return out;
}

std::pair<int, double> sample_transition(const MultiDomainMDP& mdp, int domain, int s, int a, Rng& rng) {
    if (domain < 0 || domain >= mdp.n_domains()) throw std::out_of_range("sample_transition: domain index");
    if (s < 0 || s >= mdp.n_states) throw std::out_of_range("sample_transition: state index");
    if (a < 0 || a >= mdp.n_actions) throw std::out_of_range("sample_transition: action index");
    auto row = mdp.row(domain, s, a);
    double u = rng.next_double();
    double acc = 0.0;
    int next = mdp.n_states - 1;
    for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        acc += row[static_cast<std::size_t>(s2)];
        if (u < acc) {
            next = s2;
            break;
        }
    }
    return {next, mdp.r(domain, s, a)};
}

std::string mdp_to_string(const MultiDomainMDP& mdp) {
    std::ostringstream out;
    out << "pmomdp 1\n";
    out << "states " << mdp.n_states << "\n";
    out << "actions " << mdp.n_actions << "\n";
    out << "domains " << mdp.n_domains() << "\n";
    out << "kappa_dim " << mdp.kappa_dim() << "\n";
    out << "gamma " << fmt_exact(mdp.gamma) << "\n";
    out << "initial";
    for (double p : mdp.initial_dist) out << ' ' << fmt_exact(p);
    out << "\n";
    for (int d = 0; d < mdp.n_domains(); ++d) {
        const auto& dom = mdp.domains[static_cast<std::size_t>(d)];
        out << "domain " << d << "\n";
        out << "kappa";
        for (double k : dom.kappa) out << ' ' << fmt_exact(k);
        out << "\n";
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < mdp.n_actions; ++a) {
                out << "P " << s << ' ' << a;
                for (double p : mdp.row(d, s, a)) out << ' ' << fmt_exact(p);
                out << "\n";
            }
        for (int s = 0; s < mdp.n_states; ++s) {
            out << "R " << s;
            for (int a = 0; a < mdp.n_actions; ++a) out << ' ' << fmt_exact(mdp.r(d, s, a));
            out << "\n";
        }
    }
    out << "end\n";
    return out.str();
}

MultiDomainMDP mdp_from_string(const std::string& text) {
    std::istringstream in(text);
    std::string key;
    MultiDomainMDP mdp;
    int n_domains = 0, kappa_dim = 0;
    in >> key;
    if (key != "pmomdp") throw std::runtime_error("mdp_from_string: not a pmomdp file");
    int version = 0;
    in >> version;
    if (version != 1) throw std::runtime_error("mdp_from_string: unsupported version");
    auto expect = [&](const char* want) {
        in >> key;
        if (key != want) throw std::runtime_error(std::string("mdp_from_string: expected '") + want + "' got '" + key + "'");
    };
    expect("states");
    in >> mdp.n_states;
    expect("actions");
    in >> mdp.n_actions;
    expect("domains");
    in >> n_domains;
    expect("kappa_dim");
    in >> kappa_dim;
    expect("gamma");
    in >> mdp.gamma;
    expect("initial");
    mdp.initial_dist.resize(static_cast<std::size_t>(mdp.n_states));
    for (auto& p : mdp.initial_dist) in >> p;
    mdp.domains.resize(static_cast<std::size_t>(n_domains));
    const std::size_t S = static_cast<std::size_t>(mdp.n_states);
    const std::size_t A = static_cast<std::size_t>(mdp.n_actions);
    for (int d = 0; d < n_domains; ++d) {
        expect("domain");
        int idx = -1;
        in >> idx;
        if (idx != d) throw std::runtime_error("mdp_from_string: domains out of order");
        auto& dom = mdp.domains[static_cast<std::size_t>(d)];
        expect("kappa");
        dom.kappa.resize(static_cast<std::size_t>(kappa_dim));
        for (auto& k : dom.kappa) in >> k;
        dom.transition.assign(S * A * S, 0.0);
        dom.reward.assign(S * A, 0.0);
        for (std::size_t line = 0; line < S * A; ++line) {
            expect("P");
            int s = 0, a = 0;
            in >> s >> a;
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                in >> dom.transition[(static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)) * S +
                                     static_cast<std::size_t>(s2)];
        }
        for (std::size_t line = 0; line < S; ++line) {
            expect("R");
            int s = 0;
            in >> s;
            for (int a = 0; a < mdp.n_actions; ++a)
                in >> dom.reward[static_cast<std::size_t>(s) * A + static_cast<std::size_t>(a)];
        }
    }
    expect("end");
    if (!in) throw std::runtime_error("mdp_from_string: truncated input");
    return mdp;
}

void save_mdp(const MultiDomainMDP& mdp, const std::string& path) { write_file(path, mdp_to_string(mdp)); }

MultiDomainMDP load_mdp(const std::string& path) { return mdp_from_string(read_file(path)); }

} // namespace mdrl

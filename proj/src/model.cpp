#include "rvi/model.hpp"

#include "rvi/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rvi {

PomdpModel::PomdpModel(int num_states, int num_actions, int num_observations, double discount)
    : num_states_(num_states), num_actions_(num_actions), num_observations_(num_observations),
      discount_(discount) {
    if (num_states <= 0 || num_actions <= 0 || num_observations <= 0)
        throw UsageError("PomdpModel: state, action and observation counts must be positive");
    const auto S = static_cast<std::size_t>(num_states);
    const auto A = static_cast<std::size_t>(num_actions);
    const auto Z = static_cast<std::size_t>(num_observations);
    transition_.assign(A * S * S, 0.0);
    observation_.assign(A * S * Z, 0.0);
    reward_.assign(S * A, 0.0);
}

void PomdpModel::check_indices(int s, int a, int z) const {
    if (s < 0 || s >= num_states_) throw UsageError("state index out of range: " + std::to_string(s));
    if (a < 0 || a >= num_actions_) throw UsageError("action index out of range: " + std::to_string(a));
    if (z < 0 || z >= num_observations_)
        throw UsageError("observation index out of range: " + std::to_string(z));
}

void PomdpModel::set_transition(int s, int a, int s_next, double p) {
    check_indices(s, a, 0);
    check_indices(s_next, a, 0);
    transition_[(static_cast<std::size_t>(a) * num_states_ + s) * num_states_ + s_next] = p;
}

void PomdpModel::set_observation(int a, int s_next, int z, double p) {
    check_indices(s_next, a, z);
    observation_[(static_cast<std::size_t>(a) * num_states_ + s_next) * num_observations_ + z] = p;
}

void PomdpModel::set_reward(int s, int a, double r) {
    check_indices(s, a, 0);
    reward_[static_cast<std::size_t>(s) * num_actions_ + a] = r;
}

void PomdpModel::validate(double tolerance) const {
    std::ostringstream problems;
    int count = 0;
    auto report = [&](const std::string& what) {
        if (count < 20) problems << "\n  " << what;
        ++count;
    };
    if (num_states_ <= 0 || num_actions_ <= 0 || num_observations_ <= 0) report("empty model");
    if (!(discount_ >= 0.0 && discount_ < 1.0)) report("discount " + std::to_string(discount_) + " not in [0, 1)");
    for (int a = 0; a < num_actions_; ++a) {
        for (int s = 0; s < num_states_; ++s) {
            double sum = 0.0;
            bool in_range = true;
            for (double p : transition_row(s, a)) {
                sum += p;
                in_range = in_range && p >= 0.0 && p <= 1.0;
            }
            if (!in_range || std::abs(sum - 1.0) > tolerance)
                report("T row (action " + action_name(a) + ", state " + state_name(s) + ") sums to " +
                       std::to_string(sum));
            double osum = 0.0;
            bool o_in_range = true;
            for (double p : observation_row(a, s)) {
                osum += p;
                o_in_range = o_in_range && p >= 0.0 && p <= 1.0;
            }
            if (!o_in_range || std::abs(osum - 1.0) > tolerance)
                report("O row (action " + action_name(a) + ", state " + state_name(s) + ") sums to " +
                       std::to_string(osum));
        }
    }
    for (double r : reward_)
        if (!std::isfinite(r)) report("non-finite reward");
    if (count > 0) {
        std::string msg = "invalid model: " + std::to_string(count) + " problem(s)" + problems.str();
        if (count > 20) msg += "\n  ...";
        throw ModelError(msg);
    }
}

double PomdpModel::min_reward() const { return *std::min_element(reward_.begin(), reward_.end()); }
double PomdpModel::max_reward() const { return *std::max_element(reward_.begin(), reward_.end()); }

bool PomdpModel::observations_action_independent() const {
    const std::size_t block = static_cast<std::size_t>(num_states_) * num_observations_;
    for (int a = 1; a < num_actions_; ++a)
        if (!std::equal(observation_.begin(), observation_.begin() + block,
                        observation_.begin() + a * block))
            return false;
    return true;
}

namespace {
std::string name_or_index(const std::vector<std::string>& names, int i) {
    if (i >= 0 && static_cast<std::size_t>(i) < names.size()) return names[static_cast<std::size_t>(i)];
    return std::to_string(i);
}
} // namespace

std::string PomdpModel::state_name(int s) const { return name_or_index(state_names, s); }
std::string PomdpModel::action_name(int a) const { return name_or_index(action_names, a); }
std::string PomdpModel::observation_name(int z) const { return name_or_index(observation_names, z); }

Belief Belief::unit(int num_states, int s) {
    Vec p(static_cast<std::size_t>(num_states), 0.0);
    p.at(static_cast<std::size_t>(s)) = 1.0;
    return Belief(std::move(p));
}

Belief Belief::uniform(int num_states) {
    return Belief(Vec(static_cast<std::size_t>(num_states), 1.0 / num_states));
}

bool Belief::is_valid(double tolerance) const {
    double sum = 0.0;
    for (double p : probs_) {
        if (p < -tolerance) return false;
        sum += p;
    }
    return !probs_.empty() && std::abs(sum - 1.0) <= tolerance;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

History History::extended(ActionObservation pair) const {
    History h = *this;
    h.pairs.push_back(pair);
    return h;
}

bool History::is_one_step_prefix_of(const History& other) const {
    return other.pairs.size() == pairs.size() + 1 && std::equal(pairs.begin(), pairs.end(), other.pairs.begin());
}

std::string to_string(const History& h) {
    std::string out;
    for (std::size_t i = 0; i < h.pairs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(h.pairs[i].action) + ':' + std::to_string(h.pairs[i].observation);
    }
    return out;
}

SimplexBasis full_space_basis(int num_states) {
    SimplexBasis basis;
    for (int s = 0; s < num_states; ++s) basis.points.push_back(Belief::unit(num_states, s));
    return basis;
}

namespace {
void check_belief(const PomdpModel& model, const Belief& b) {
    if (b.size() != static_cast<std::size_t>(model.num_states()))
        throw UsageError("belief has " + std::to_string(b.size()) + " entries, model has " +
                         std::to_string(model.num_states()) + " states");
}
void check_action(const PomdpModel& model, int a) {
    if (a < 0 || a >= model.num_actions()) throw UsageError("action index out of range: " + std::to_string(a));
}
void check_pair(const PomdpModel& model, int a, int z) {
    check_action(model, a);
    if (z < 0 || z >= model.num_observations())
        throw UsageError("observation index out of range: " + std::to_string(z));
}

// Unnormalized P_az b.
Vec propagate(const PomdpModel& model, const Belief& b, int a, int z) {
    const int S = model.num_states();
    Vec next(static_cast<std::size_t>(S), 0.0);
    for (int s = 0; s < S; ++s) {
        const double bs = b[static_cast<std::size_t>(s)];
        if (bs == 0.0) continue;
        auto row = model.transition_row(s, a);
        for (int sn = 0; sn < S; ++sn) next[static_cast<std::size_t>(sn)] += bs * row[static_cast<std::size_t>(sn)];
    }
    for (int sn = 0; sn < S; ++sn) next[static_cast<std::size_t>(sn)] *= model.observation(a, sn, z);
    return next;
}
} // namespace

double observation_prob(const PomdpModel& model, const Belief& b, int a, int z) {
    check_belief(model, b);
    check_pair(model, a, z);
    Vec next = propagate(model, b, a, z);
    return std::accumulate(next.begin(), next.end(), 0.0);
}

double belief_reward(const PomdpModel& model, const Belief& b, int a) {
    check_belief(model, b);
    check_action(model, a);
    double r = 0.0;
    for (int s = 0; s < model.num_states(); ++s) r += b[static_cast<std::size_t>(s)] * model.reward(s, a);
    return r;
}

std::optional<Belief> belief_update(const PomdpModel& model, const Belief& b, int a, int z) {
    check_belief(model, b);
    check_pair(model, a, z);
    Vec next = propagate(model, b, a, z);
    const double norm = std::accumulate(next.begin(), next.end(), 0.0);
    if (norm <= 1e-12) return std::nullopt;
    for (double& p : next) p /= norm;
    return Belief(std::move(next));
}

TransformationalMatrix transformational_matrix(const PomdpModel& model, int a, int z) {
    check_pair(model, a, z);
    const auto S = static_cast<std::size_t>(model.num_states());
    TransformationalMatrix m{{a, z}, Matrix(S, S)};
    for (std::size_t sn = 0; sn < S; ++sn)
        for (std::size_t s = 0; s < S; ++s)
            m.entries(sn, s) = model.observation(a, static_cast<int>(sn), z) *
                               model.transition(static_cast<int>(s), a, static_cast<int>(sn));
    return m;
}

DegeneracyResult is_degenerate(const TransformationalMatrix& m, double rel_tol) {
    Matrix work = m.entries;
    const std::size_t rows = work.rows();
    const std::size_t cols = work.cols();
    if (rows != cols) throw UsageError("is_degenerate: matrix is not square");
    double scale = 0.0;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) scale = std::max(scale, std::abs(work(r, c)));
    const double threshold = rel_tol * scale;
    int rank = 0;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < cols && pivot_row < rows && scale > 0.0; ++c) {
        std::size_t best = pivot_row;
        for (std::size_t r = pivot_row + 1; r < rows; ++r)
            if (std::abs(work(r, c)) > std::abs(work(best, c))) best = r;
        if (std::abs(work(best, c)) <= threshold) continue;
        for (std::size_t k = 0; k < cols; ++k) std::swap(work(best, k), work(pivot_row, k));
        for (std::size_t r = pivot_row + 1; r < rows; ++r) {
            const double f = work(r, c) / work(pivot_row, c);
            if (f == 0.0) continue;
            for (std::size_t k = c; k < cols; ++k) work(r, k) -= f * work(pivot_row, k);
        }
        ++pivot_row;
        ++rank;
    }
    return {rank < static_cast<int>(rows), rank};
}

PropernessReport analyze_properness(const PomdpModel& model, double rel_tol) {
    PropernessReport report;
    report.proper = true;
    for (int a = 0; a < model.num_actions(); ++a) {
        for (int z = 0; z < model.num_observations(); ++z) {
            auto d = is_degenerate(transformational_matrix(model, a, z), rel_tol);
            report.pairs.push_back({{a, z}, d.degenerate, d.rank});
            report.proper = report.proper && d.degenerate;
        }
    }
    return report;
}

SimplexBasis tau_simplex_basis(const PomdpModel& model, int a, int z) {
    check_pair(model, a, z);
    SimplexBasis basis;
    basis.tag = ActionObservation{a, z};
    for (int s = 0; s < model.num_states(); ++s)
        if (auto next = belief_update(model, Belief::unit(model.num_states(), s), a, z))
            basis.points.push_back(std::move(*next));
    return basis;
}

SimplexBasis history_simplex_basis(const PomdpModel& model, const History& h) {
    if (h.pairs.empty()) throw UsageError("history_simplex_basis: empty history");
    SimplexBasis current = full_space_basis(model.num_states());
    for (const auto& [a, z] : h.pairs) {
        SimplexBasis next;
        for (const auto& p : current.points)
            if (auto b = belief_update(model, p, a, z)) next.points.push_back(std::move(*b));
        current = std::move(next);
    }
    current.tag = h;
    return current;
}

ObservationSupport observation_support(const PomdpModel& model, int a, int z) {
    check_pair(model, a, z);
    ObservationSupport support{{a, z}, {}};
    for (int s = 0; s < model.num_states(); ++s)
        if (model.observation(a, s, z) > 0.0) support.states.push_back(s);
    return support;
}

InformativenessReport informativeness_report(const PomdpModel& model) {
    InformativenessReport report;
    report.num_states = model.num_states();
    for (int a = 0; a < model.num_actions(); ++a) {
        for (int z = 0; z < model.num_observations(); ++z) {
            int size = static_cast<int>(observation_support(model, a, z).states.size());
            report.pairs.push_back({{a, z}, size});
            report.max_support_size = std::max(report.max_support_size, size);
        }
    }
    return report;
}

SimplexBasis phi_simplex_basis(const PomdpModel& model, int a, int z) {
    auto support = observation_support(model, a, z);
    SimplexBasis basis;
    for (int s : support.states) basis.points.push_back(Belief::unit(model.num_states(), s));
    basis.tag = std::move(support);
    return basis;
}

std::optional<Vec> hull_coefficients(const Belief& point, std::span<const Belief> points, double tolerance) {
    if (points.empty()) return std::nullopt;
    const std::size_t n = point.size();
    const std::size_t k = points.size();
    // Minimize the max-norm deviation t of sum_i w_i p_i from the point, with
    // w_0 = 1 - sum_{i>0} w_i substituted out. Variables: w_1..w_{k-1}, t.
    const std::size_t vars = k;
    LinearProgram lp{Matrix(2 * n + 1, vars), Vec(2 * n + 1, 0.0), Vec(vars, 0.0)};
    for (std::size_t s = 0; s < n; ++s) {
        const double base = points[0][s];
        for (std::size_t i = 1; i < k; ++i) {
            lp.constraints(2 * s, i - 1) = points[i][s] - base;
            lp.constraints(2 * s + 1, i - 1) = base - points[i][s];
        }
        lp.constraints(2 * s, vars - 1) = -1.0;
        lp.constraints(2 * s + 1, vars - 1) = -1.0;
        lp.bounds[2 * s] = point[s] - base;
        lp.bounds[2 * s + 1] = base - point[s];
    }
    for (std::size_t i = 1; i < k; ++i) lp.constraints(2 * n, i - 1) = 1.0;
    lp.bounds[2 * n] = 1.0;
    lp.objective[vars - 1] = -1.0;
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal || -sol.value > tolerance) return std::nullopt;
    Vec w(k, 0.0);
    double rest = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
        w[i] = std::max(sol.x[i - 1], 0.0);
        rest -= w[i];
    }
    w[0] = std::max(rest, 0.0);
    return w;
}

SimplexBasis minimal_basis(const SimplexBasis& basis, double tolerance) {
    std::vector<Belief> kept = basis.points;
    // Test each point against the points still kept; removal never changes the hull.
    for (std::size_t i = 0; i < kept.size();) {
        std::vector<Belief> others;
        others.reserve(kept.size() - 1);
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (j != i) others.push_back(kept[j]);
        if (!others.empty() && hull_coefficients(kept[i], others, tolerance)) {
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return {std::move(kept), basis.tag};
}

} // namespace rvi

#include "rvi/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>

namespace rvi {

namespace {

constexpr double kStochasticTolerance = 1e-6;
// Largest dense R(a, s, s', z) table the parser will allocate.
constexpr std::size_t kMaxFullRewardEntries = 20'000'000;

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && errno != ERANGE && std::isfinite(out);
}

bool parse_int(const std::string& text, long& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtol(text.c_str(), &end, 10);
    return end == text.c_str() + text.size() && errno != ERANGE;
}

// ---------------------------------------------------------------------------
// POMDP text format

struct Token {
    std::string text;
    int line = 0;
    int column = 0;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, column = 1;
    std::size_t i = 0;
    auto advance = [&] {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
        ++i;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
        } else if (c == ':') {
            out.push_back({":", line, column});
            advance();
        } else {
            Token t{"", line, column};
            while (i < text.size() && text[i] != ':' && text[i] != '#' &&
                   !std::isspace(static_cast<unsigned char>(text[i]))) {
                t.text += text[i];
                advance();
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

const std::set<std::string>& keywords() {
    static const std::set<std::string> k{"discount", "values", "states", "actions", "observations", "start", "T", "O", "R"};
    return k;
}

class PomdpParser {
public:
    PomdpParser(std::string_view text, std::vector<std::string>* warnings)
        : tokens_(tokenize(text)), warnings_(warnings) {}

    PomdpModel parse();

private:
    enum class Kind { state, action, observation };

    bool at_end() const { return pos_ >= tokens_.size(); }
    bool is_colon(std::size_t i) const { return i < tokens_.size() && tokens_[i].text == ":"; }
    bool at_directive() const {
        if (at_end()) return false;
        const auto& t = tokens_[pos_].text;
        if (t == "start" && pos_ + 2 < tokens_.size() &&
            (tokens_[pos_ + 1].text == "include" || tokens_[pos_ + 1].text == "exclude"))
            return is_colon(pos_ + 2);
        return keywords().count(t) && is_colon(pos_ + 1);
    }

    [[noreturn]] void fail(const std::string& what) const {
        if (at_end()) {
            const int line = tokens_.empty() ? 1 : tokens_.back().line;
            throw ParseError(what + " at end of input", line, 1);
        }
        throw ParseError(what + ", got '" + tokens_[pos_].text + "'", tokens_[pos_].line, tokens_[pos_].column);
    }

    const Token& next() {
        if (at_end()) fail("unexpected end of input");
        return tokens_[pos_++];
    }

    void expect_colon() {
        if (!is_colon(pos_)) fail("expected ':'");
        ++pos_;
    }

    double number() {
        if (at_end()) fail("expected a number");
        double v = 0.0;
        if (!parse_double(tokens_[pos_].text, v)) fail("expected a number");
        ++pos_;
        return v;
    }

    bool accept(const char* word) {
        if (!at_end() && tokens_[pos_].text == word) {
            ++pos_;
            return true;
        }
        return false;
    }

    void parse_preamble();
    void parse_list(std::vector<std::string>& names, int& count, const char* what);
    void skip_start();
    std::vector<int> resolve(Kind kind);
    void parse_transition();
    void parse_observation();
    void parse_reward();
    void set_reward(int a, int s, const std::vector<int>& next_states, const std::vector<int>& observations,
                    double value, bool all_next, bool all_obs);
    void ensure_full_rewards();
    int count(Kind kind) const;
    const std::vector<std::string>& names(Kind kind) const;

    std::vector<Token> tokens_;
    std::vector<std::string>* warnings_;
    std::size_t pos_ = 0;

    std::optional<double> discount_;
    bool cost_ = false;
    int num_states_ = -1, num_actions_ = -1, num_observations_ = -1;
    std::vector<std::string> state_names_, action_names_, observation_names_;

    std::vector<double> transition_;  // [a][s][s']
    std::vector<double> observation_; // [a][s'][z]
    std::vector<double> reward_;      // [a][s]
    std::vector<double> full_reward_; // [a][s][s'][z], allocated on demand
};

int PomdpParser::count(Kind kind) const {
    switch (kind) {
    case Kind::state: return num_states_;
    case Kind::action: return num_actions_;
    case Kind::observation: return num_observations_;
    }
    return 0;
}

const std::vector<std::string>& PomdpParser::names(Kind kind) const {
    switch (kind) {
    case Kind::state: return state_names_;
    case Kind::action: return action_names_;
    case Kind::observation: return observation_names_;
    }
    return state_names_;
}

void PomdpParser::parse_list(std::vector<std::string>& names, int& count, const char* what) {
    names.clear();
    if (at_end() || at_directive()) fail(std::string("expected a count or names for ") + what);
    long n = 0;
    if (parse_int(tokens_[pos_].text, n)) {
        ++pos_;
        if (at_end() || at_directive()) {
            if (n <= 0) {
                --pos_;
                fail(std::string("the number of ") + what + " must be positive");
            }
            count = static_cast<int>(n);
            return;
        }
        --pos_;
    }
    std::set<std::string> seen;
    while (!at_end() && !at_directive()) {
        const Token& t = next();
        if (t.text == "*" || t.text == ":") {
            --pos_;
            fail(std::string("invalid name in ") + what);
        }
        if (!seen.insert(t.text).second) {
            --pos_;
            fail(std::string("duplicate name in ") + what);
        }
        names.push_back(t.text);
    }
    count = static_cast<int>(names.size());
}

void PomdpParser::skip_start() {
    // The initial belief is not part of the model the solvers use.
    while (!at_end() && !at_directive()) ++pos_;
}

void PomdpParser::parse_preamble() {
    while (at_directive()) {
        const std::string key = tokens_[pos_].text;
        if (key == "T" || key == "O" || key == "R") break;
        ++pos_;
        if (key == "start") {
            if (tokens_[pos_].text == "include" || tokens_[pos_].text == "exclude") ++pos_;
            expect_colon();
            skip_start();
            continue;
        }
        expect_colon();
        if (key == "discount") {
            discount_ = number();
        } else if (key == "values") {
            if (accept("cost"))
                cost_ = true;
            else if (!accept("reward"))
                fail("expected 'reward' or 'cost'");
        } else if (key == "states") {
            parse_list(state_names_, num_states_, "states");
        } else if (key == "actions") {
            parse_list(action_names_, num_actions_, "actions");
        } else if (key == "observations") {
            parse_list(observation_names_, num_observations_, "observations");
        }
    }
    if (!discount_) fail("missing 'discount:'");
    if (num_states_ < 0) fail("missing 'states:'");
    if (num_actions_ < 0) fail("missing 'actions:'");
    if (num_observations_ < 0) fail("missing 'observations:'");
}

std::vector<int> PomdpParser::resolve(Kind kind) {
    const Token& t = next();
    const int n = count(kind);
    std::vector<int> out;
    if (t.text == "*") {
        for (int i = 0; i < n; ++i) out.push_back(i);
        return out;
    }
    const auto& list = names(kind);
    if (auto it = std::find(list.begin(), list.end(), t.text); it != list.end()) {
        out.push_back(static_cast<int>(it - list.begin()));
        return out;
    }
    long idx = 0;
    if (parse_int(t.text, idx) && idx >= 0 && idx < n) {
        out.push_back(static_cast<int>(idx));
        return out;
    }
    static const char* kind_names[] = {"state", "action", "observation"};
    throw ParseError(std::string("unknown ") + kind_names[static_cast<int>(kind)] + " '" + t.text + "'", t.line,
                     t.column);
}

void PomdpParser::parse_transition() {
    const std::size_t S = static_cast<std::size_t>(num_states_);
    auto at = [&](int a, int s, int sn) -> double& {
        return transition_[(static_cast<std::size_t>(a) * S + static_cast<std::size_t>(s)) * S + static_cast<std::size_t>(sn)];
    };
    const auto actions = resolve(Kind::action);
    if (!is_colon(pos_)) {
        if (accept("identity")) {
            for (int a : actions)
                for (int s = 0; s < num_states_; ++s)
                    for (int sn = 0; sn < num_states_; ++sn) at(a, s, sn) = s == sn ? 1.0 : 0.0;
        } else if (accept("uniform")) {
            for (int a : actions)
                for (int s = 0; s < num_states_; ++s)
                    for (int sn = 0; sn < num_states_; ++sn) at(a, s, sn) = 1.0 / num_states_;
        } else {
            std::vector<double> m(S * S);
            for (double& x : m) x = number();
            for (int a : actions)
                for (std::size_t i = 0; i < m.size(); ++i)
                    at(a, static_cast<int>(i / S), static_cast<int>(i % S)) = m[i];
        }
        return;
    }
    expect_colon();
    const auto from = resolve(Kind::state);
    if (!is_colon(pos_)) {
        std::vector<double> row(S, 1.0 / num_states_);
        if (!accept("uniform"))
            for (double& x : row) x = number();
        for (int a : actions)
            for (int s : from)
                for (std::size_t sn = 0; sn < S; ++sn) at(a, s, static_cast<int>(sn)) = row[sn];
        return;
    }
    expect_colon();
    const auto to = resolve(Kind::state);
    const double p = number();
    for (int a : actions)
        for (int s : from)
            for (int sn : to) at(a, s, sn) = p;
}

void PomdpParser::parse_observation() {
    const std::size_t S = static_cast<std::size_t>(num_states_), Z = static_cast<std::size_t>(num_observations_);
    auto at = [&](int a, int sn, int z) -> double& {
        return observation_[(static_cast<std::size_t>(a) * S + static_cast<std::size_t>(sn)) * Z + static_cast<std::size_t>(z)];
    };
    const auto actions = resolve(Kind::action);
    if (!is_colon(pos_)) {
        std::vector<double> m(S * Z, 1.0 / num_observations_);
        if (!accept("uniform"))
            for (double& x : m) x = number();
        for (int a : actions)
            for (std::size_t i = 0; i < m.size(); ++i) at(a, static_cast<int>(i / Z), static_cast<int>(i % Z)) = m[i];
        return;
    }
    expect_colon();
    const auto to = resolve(Kind::state);
    if (!is_colon(pos_)) {
        std::vector<double> row(Z, 1.0 / num_observations_);
        if (!accept("uniform"))
            for (double& x : row) x = number();
        for (int a : actions)
            for (int sn : to)
                for (std::size_t z = 0; z < Z; ++z) at(a, sn, static_cast<int>(z)) = row[z];
        return;
    }
    expect_colon();
    const auto obs = resolve(Kind::observation);
    const double p = number();
    for (int a : actions)
        for (int sn : to)
            for (int z : obs) at(a, sn, z) = p;
}

void PomdpParser::ensure_full_rewards() {
    if (!full_reward_.empty()) return;
    const std::size_t S = static_cast<std::size_t>(num_states_), Z = static_cast<std::size_t>(num_observations_);
    const std::size_t size = static_cast<std::size_t>(num_actions_) * S * S * Z;
    if (size > kMaxFullRewardEntries) fail("R entries depending on next state or observation need too large a table");
    full_reward_.assign(size, 0.0);
    for (std::size_t a = 0; a < static_cast<std::size_t>(num_actions_); ++a)
        for (std::size_t s = 0; s < S; ++s)
            std::fill_n(full_reward_.begin() + static_cast<std::ptrdiff_t>(((a * S + s) * S) * Z), S * Z,
                        reward_[a * S + s]);
}

void PomdpParser::set_reward(int a, int s, const std::vector<int>& next_states, const std::vector<int>& observations,
                             double value, bool all_next, bool all_obs) {
    const std::size_t S = static_cast<std::size_t>(num_states_), Z = static_cast<std::size_t>(num_observations_);
    if (all_next && all_obs && full_reward_.empty()) {
        reward_[static_cast<std::size_t>(a) * S + static_cast<std::size_t>(s)] = value;
        return;
    }
    ensure_full_rewards();
    for (int sn : next_states)
        for (int z : observations)
            full_reward_[((static_cast<std::size_t>(a) * S + static_cast<std::size_t>(s)) * S + static_cast<std::size_t>(sn)) * Z +
                         static_cast<std::size_t>(z)] = value;
}

void PomdpParser::parse_reward() {
    const std::size_t S = static_cast<std::size_t>(num_states_), Z = static_cast<std::size_t>(num_observations_);
    std::vector<int> all_states(S), all_obs(Z);
    for (std::size_t i = 0; i < S; ++i) all_states[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < Z; ++i) all_obs[i] = static_cast<int>(i);

    const auto actions = resolve(Kind::action);
    expect_colon();
    const auto from = resolve(Kind::state);
    if (!is_colon(pos_)) {
        // Matrix over (s', z).
        std::vector<double> m(S * Z);
        for (double& x : m) x = number();
        for (int a : actions)
            for (int s : from)
                for (std::size_t i = 0; i < m.size(); ++i)
                    set_reward(a, s, {static_cast<int>(i / Z)}, {static_cast<int>(i % Z)}, m[i], false, false);
        return;
    }
    expect_colon();
    const bool next_wild = !at_end() && tokens_[pos_].text == "*";
    const auto to = resolve(Kind::state);
    if (!is_colon(pos_)) {
        std::vector<double> row(Z);
        for (double& x : row) x = number();
        for (int a : actions)
            for (int s : from)
                for (std::size_t z = 0; z < Z; ++z) set_reward(a, s, to, {static_cast<int>(z)}, row[z], false, false);
        return;
    }
    expect_colon();
    const bool obs_wild = !at_end() && tokens_[pos_].text == "*";
    const auto obs = resolve(Kind::observation);
    const double value = number();
    for (int a : actions)
        for (int s : from) set_reward(a, s, to, obs, value, next_wild, obs_wild);
}

PomdpModel PomdpParser::parse() {
    parse_preamble();
    const std::size_t S = static_cast<std::size_t>(num_states_), A = static_cast<std::size_t>(num_actions_),
                      Z = static_cast<std::size_t>(num_observations_);
    transition_.assign(A * S * S, 0.0);
    observation_.assign(A * S * Z, 0.0);
    reward_.assign(A * S, 0.0);

    while (!at_end()) {
        if (!at_directive()) fail("expected 'T:', 'O:' or 'R:'");
        const std::string key = next().text;
        if (key != "T" && key != "O" && key != "R") {
            --pos_;
            fail("preamble directive after the first entry");
        }
        expect_colon();
        if (key == "T")
            parse_transition();
        else if (key == "O")
            parse_observation();
        else
            parse_reward();
    }

    std::vector<std::string> bad;
    auto check_row = [&](const std::string& label, const double* row, std::size_t n) {
        double sum = 0.0;
        bool negative = false;
        for (std::size_t i = 0; i < n; ++i) {
            sum += row[i];
            negative = negative || row[i] < -kStochasticTolerance;
        }
        if (negative || std::abs(sum - 1.0) > kStochasticTolerance) bad.push_back(label + " sums to " + fmt17(sum));
    };
    PomdpModel model(num_states_, num_actions_, num_observations_, *discount_);
    model.state_names = state_names_;
    model.action_names = action_names_;
    model.observation_names = observation_names_;
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t s = 0; s < S; ++s)
            check_row("T(" + model.action_name(static_cast<int>(a)) + ", " + model.state_name(static_cast<int>(s)) + ")",
                      &transition_[(a * S + s) * S], S);
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t sn = 0; sn < S; ++sn)
            check_row("O(" + model.action_name(static_cast<int>(a)) + ", " + model.state_name(static_cast<int>(sn)) + ")",
                      &observation_[(a * S + sn) * Z], Z);
    if (!bad.empty()) {
        std::string msg = "non-stochastic rows:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw ModelError(msg);
    }

    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t s = 0; s < S; ++s) {
            for (std::size_t sn = 0; sn < S; ++sn)
                model.set_transition(static_cast<int>(s), static_cast<int>(a), static_cast<int>(sn),
                                     transition_[(a * S + s) * S + sn]);
            for (std::size_t z = 0; z < Z; ++z)
                model.set_observation(static_cast<int>(a), static_cast<int>(s), static_cast<int>(z),
                                      observation_[(a * S + s) * Z + z]);
        }

    const double sign = cost_ ? -1.0 : 1.0;
    if (full_reward_.empty()) {
        for (std::size_t a = 0; a < A; ++a)
            for (std::size_t s = 0; s < S; ++s)
                model.set_reward(static_cast<int>(s), static_cast<int>(a), sign * reward_[a * S + s]);
    } else {
        if (warnings_)
            warnings_->push_back("R entries depend on the next state or observation; averaged into r(s, a)");
        for (std::size_t a = 0; a < A; ++a)
            for (std::size_t s = 0; s < S; ++s) {
                double r = 0.0;
                for (std::size_t sn = 0; sn < S; ++sn) {
                    const double t = transition_[(a * S + s) * S + sn];
                    if (t == 0.0) continue;
                    for (std::size_t z = 0; z < Z; ++z)
                        r += t * observation_[(a * S + sn) * Z + z] * full_reward_[((a * S + s) * S + sn) * Z + z];
                }
                model.set_reward(static_cast<int>(s), static_cast<int>(a), sign * r);
            }
    }
    model.validate(kStochasticTolerance);
    return model;
}

bool usable_names(const std::vector<std::string>& names) {
    if (names.empty()) return false;
    std::set<std::string> seen;
    for (const auto& n : names) {
        long dummy = 0;
        if (n.empty() || n == "*" || keywords().count(n) || parse_int(n, dummy) || !seen.insert(n).second) return false;
        for (char c : n)
            if (c == ':' || c == '#' || std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Vector-set files

struct Line {
    std::string text;
    int number = 0;
};

std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> out;
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) out.push_back({std::move(line), number});
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> fields(const Line& line) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(line.text);
    std::string word;
    while (in >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("expected key=value, got '" + word + "'", line.number,
                             static_cast<int>(line.text.find(word)) + 1);
        out.emplace_back(word.substr(0, eq), word.substr(eq + 1));
    }
    return out;
}

[[noreturn]] void line_error(const Line& line, const std::string& what) { throw ParseError(what, line.number, 1); }

int int_field(const Line& line, const std::string& key, const std::string& value) {
    long v = 0;
    if (!parse_int(value, v)) line_error(line, "bad integer for " + key + ": '" + value + "'");
    return static_cast<int>(v);
}

ActionObservation pair_field(const Line& line, const std::string& text, bool allow_star) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) line_error(line, "expected <action>:<observation>, got '" + text + "'");
    const std::string a = text.substr(0, colon), z = text.substr(colon + 1);
    ActionObservation p;
    p.action = allow_star && a == "*" ? -1 : int_field(line, "action", a);
    p.observation = int_field(line, "observation", z);
    return p;
}

std::vector<int> int_list(const Line& line, const std::string& key, const std::string& text) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        out.push_back(int_field(line, key, text.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

std::string join_ints(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

void append_vector(std::string& out, const AlphaVector& v, const std::optional<ObservationSupport>& support,
                   const std::string& prefix) {
    if (!out.empty() && out.back() != '\n') out += '\n';
    out += '\n';
    out += prefix + "action=" + std::to_string(v.action);
    if (support) out += " support=" + join_ints(support->states);
    if (v.history && !v.history->pairs.empty()) out += " history=" + to_string(*v.history);
    out += '\n';
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        if (i) out += ' ';
        out += fmt17(v.values[i]);
    }
    out += '\n';
}

struct ParsedVector {
    AlphaVector vector;
    std::optional<std::vector<int>> support;
    std::optional<ActionObservation> entry;
    int line = 0;
};

struct ParsedFile {
    int dim = 0;
    Region region = Region::space;
    std::optional<std::string> basis;
    bool low_dimension = false;
    std::vector<ParsedVector> vectors;
};

ParsedFile parse_file(std::string_view text) {
    const auto lines = content_lines(text);
    if (lines.empty()) throw ParseError("empty vector-set file", 1, 1);
    ParsedFile file;
    bool have_dim = false, have_region = false;
    for (const auto& [key, value] : fields(lines[0])) {
        if (key == "dim") {
            file.dim = int_field(lines[0], key, value);
            have_dim = true;
        } else if (key == "region") {
            auto r = region_from_string(value);
            if (!r) line_error(lines[0], "unknown region '" + value + "'");
            file.region = *r;
            have_region = true;
        } else if (key == "basis") {
            if (value != "tau" && value != "phi") line_error(lines[0], "basis must be tau or phi");
            file.basis = value;
        } else if (key == "low_dimension") {
            file.low_dimension = int_field(lines[0], key, value) != 0;
        } else {
            line_error(lines[0], "unknown header field '" + key + "'");
        }
    }
    if (!have_dim || !have_region) line_error(lines[0], "header needs dim= and region=");
    if (file.dim <= 0) line_error(lines[0], "dim must be positive");

    for (std::size_t i = 1; i < lines.size(); i += 2) {
        const Line& head = lines[i];
        ParsedVector pv;
        pv.line = head.number;
        bool have_action = false;
        for (const auto& [key, value] : fields(head)) {
            if (key == "action") {
                pv.vector.action = int_field(head, key, value);
                have_action = true;
            } else if (key == "support") {
                pv.support = int_list(head, key, value);
            } else if (key == "history") {
                History h;
                std::size_t start = 0;
                while (start <= value.size()) {
                    std::size_t end = value.find(',', start);
                    if (end == std::string::npos) end = value.size();
                    h.pairs.push_back(pair_field(head, value.substr(start, end - start), false));
                    start = end + 1;
                }
                pv.vector.history = std::move(h);
            } else if (key == "entry") {
                pv.entry = pair_field(head, value, true);
            } else {
                line_error(head, "unknown vector field '" + key + "'");
            }
        }
        if (!have_action) line_error(head, "vector line needs action=");
        if (i + 1 >= lines.size()) line_error(head, "missing value line");
        const Line& values = lines[i + 1];
        std::istringstream in(values.text);
        std::string word;
        while (in >> word) {
            double x = 0.0;
            if (!parse_double(word, x))
                throw ParseError("bad value '" + word + "'", values.number, static_cast<int>(values.text.find(word)) + 1);
            pv.vector.values.push_back(x);
        }
        const std::size_t expected = pv.support ? pv.support->size() : static_cast<std::size_t>(file.dim);
        if (pv.vector.values.size() != expected)
            line_error(values, "expected " + std::to_string(expected) + " values, got " +
                                   std::to_string(pv.vector.values.size()));
        if (pv.support)
            for (int s : *pv.support)
                if (s < 0 || s >= file.dim) line_error(head, "support state out of range");
        file.vectors.push_back(std::move(pv));
    }
    return file;
}

VectorSet to_vector_set(ParsedFile& file) {
    VectorSet set;
    set.region = file.region;
    for (auto& pv : file.vectors) {
        if (pv.entry) throw ParseError("entry= in a plain vector-set file", pv.line, 1);
        if (pv.support) {
            if (!set.support) {
                if (&pv != &file.vectors.front()) throw ParseError("support tag on only some vectors", pv.line, 1);
                set.support = ObservationSupport{{-1, -1}, *pv.support};
            } else if (set.support->states != *pv.support) {
                throw ParseError("vectors in one set must share a support", pv.line, 1);
            }
        } else if (set.support) {
            throw ParseError("support tag on only some vectors", pv.line, 1);
        }
        set.vectors.push_back(std::move(pv.vector));
    }
    return set;
}

} // namespace

PomdpModel parse_pomdp(std::string_view text, std::vector<std::string>* warnings) {
    return PomdpParser(text, warnings).parse();
}

std::string serialize_pomdp(const PomdpModel& model) {
    const bool state_names = usable_names(model.state_names);
    const bool action_names = usable_names(model.action_names);
    const bool obs_names = usable_names(model.observation_names);
    auto list = [](bool named, const std::vector<std::string>& names, int count) {
        if (!named) return std::to_string(count);
        std::string out;
        for (std::size_t i = 0; i < names.size(); ++i) out += (i ? " " : "") + names[i];
        return out;
    };
    auto state = [&](int s) { return state_names ? model.state_names[static_cast<std::size_t>(s)] : std::to_string(s); };
    auto action = [&](int a) { return action_names ? model.action_names[static_cast<std::size_t>(a)] : std::to_string(a); };
    auto obs = [&](int z) { return obs_names ? model.observation_names[static_cast<std::size_t>(z)] : std::to_string(z); };

    std::string out;
    out += "discount: " + fmt17(model.discount()) + "\n";
    out += "values: reward\n";
    out += "states: " + list(state_names, model.state_names, model.num_states()) + "\n";
    out += "actions: " + list(action_names, model.action_names, model.num_actions()) + "\n";
    out += "observations: " + list(obs_names, model.observation_names, model.num_observations()) + "\n\n";
    for (int a = 0; a < model.num_actions(); ++a)
        for (int s = 0; s < model.num_states(); ++s)
            for (int sn = 0; sn < model.num_states(); ++sn)
                if (double p = model.transition(s, a, sn); p != 0.0)
                    out += "T: " + action(a) + " : " + state(s) + " : " + state(sn) + " " + fmt17(p) + "\n";
    out += '\n';
    for (int a = 0; a < model.num_actions(); ++a)
        for (int sn = 0; sn < model.num_states(); ++sn)
            for (int z = 0; z < model.num_observations(); ++z)
                if (double p = model.observation(a, sn, z); p != 0.0)
                    out += "O: " + action(a) + " : " + state(sn) + " : " + obs(z) + " " + fmt17(p) + "\n";
    out += '\n';
    for (int a = 0; a < model.num_actions(); ++a)
        for (int s = 0; s < model.num_states(); ++s)
            if (double r = model.reward(s, a); r != 0.0)
                out += "R: " + action(a) + " : " + state(s) + " : * : * " + fmt17(r) + "\n";
    return out;
}

std::string read_text(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, std::string_view text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
    if (!out) throw UsageError("write to '" + path + "' failed");
}

std::string format_vector_set(const VectorSet& set, int num_states) {
    std::string out = "dim=" + std::to_string(num_states) + " region=" + to_string(set.region) + "\n";
    for (const auto& v : set.vectors) append_vector(out, v, set.support, "");
    return out;
}

std::string format_family(const SimplexFamily& family, int num_states) {
    bool phi = false;
    for (const auto& e : family.entries) phi = phi || std::holds_alternative<ObservationSupport>(e.basis.tag);
    std::string out = "dim=" + std::to_string(num_states) +
                      " region=" + to_string(family.keyed_by_observation ? Region::family_observation : Region::family_pair) +
                      " basis=" + (phi ? "phi" : "tau");
    if (family.low_dimension) out += " low_dimension=1";
    out += '\n';
    for (const auto& e : family.entries) {
        const std::string key = (e.key.action < 0 ? std::string("*") : std::to_string(e.key.action)) + ':' +
                                std::to_string(e.key.observation);
        for (const auto& v : e.vectors.vectors) append_vector(out, v, e.vectors.support, "entry=" + key + " ");
    }
    return out;
}

VectorSet parse_vector_set(std::string_view text) {
    ParsedFile file = parse_file(text);
    if (file.basis) throw ParseError("family file where a plain vector set was expected", 1, 1);
    return to_vector_set(file);
}

ValueFunction parse_value_function(std::string_view text, const PomdpModel& model) {
    ParsedFile file = parse_file(text);
    if (file.dim != model.num_states())
        throw ParseError("dim=" + std::to_string(file.dim) + " does not match the model's " +
                             std::to_string(model.num_states()) + " states",
                         1, 1);
    for (const auto& pv : file.vectors)
        if (pv.vector.action < -1 || pv.vector.action >= model.num_actions())
            throw ParseError("action out of range", pv.line, 1);
    if (!file.basis) return to_vector_set(file);

    SimplexFamily family = *file.basis == "tau" ? make_tau_family(model, VectorSet{})
                                                : make_phi_family(model, file.low_dimension);
    for (auto& e : family.entries) e.vectors.vectors.clear();
    if (*file.basis == "phi" && family.keyed_by_observation != (file.region == Region::family_observation))
        throw ParseError("family keying does not match the model's observation structure", 1, 1);
    for (auto& pv : file.vectors) {
        if (!pv.entry) throw ParseError("family vector without entry=", pv.line, 1);
        auto it = std::find_if(family.entries.begin(), family.entries.end(),
                               [&](const FamilyEntry& e) { return e.key == *pv.entry; });
        if (it == family.entries.end()) throw ParseError("entry is not a realizable simplex of the model", pv.line, 1);
        const bool wants_support = it->vectors.support.has_value();
        if (wants_support != pv.support.has_value() || (wants_support && it->vectors.support->states != *pv.support))
            throw ParseError("support does not match the entry's simplex", pv.line, 1);
        it->vectors.vectors.push_back(std::move(pv.vector));
    }
    return family;
}

std::string stats_csv_header() { return "iteration,region,enumerated,kept,lp_count,residual,seconds"; }

std::string format_stats_csv(std::span<const IterationStats> stats) {
    std::string out = stats_csv_header() + "\n";
    char buf[256];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof buf, "%d,%s,%ld,%ld,%ld,%.17g,%.6f\n", s.iteration, to_string(s.region).c_str(),
                      s.enumerated, s.kept, s.lp_count, s.residual, s.seconds);
        out += buf;
    }
    return out;
}

ActionClassification parse_classes(std::string_view text, const PomdpModel& model) {
    std::vector<int> state(static_cast<std::size_t>(model.num_actions()), -1);
    int number = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string name, kind, extra;
        if (!(words >> name)) continue;
        if (!(words >> kind) || (words >> extra)) throw ParseError("expected '<action> rich|poor'", number, 1);
        if (kind != "rich" && kind != "poor") throw ParseError("class must be rich or poor, got '" + kind + "'", number, 1);
        int a = -1;
        for (int i = 0; i < model.num_actions(); ++i)
            if (model.action_name(i) == name) a = i;
        long idx = 0;
        if (a < 0 && parse_int(name, idx) && idx >= 0 && idx < model.num_actions()) a = static_cast<int>(idx);
        if (a < 0) throw ParseError("unknown action '" + name + "'", number, 1);
        if (state[static_cast<std::size_t>(a)] >= 0) throw ParseError("action '" + name + "' listed twice", number, 1);
        state[static_cast<std::size_t>(a)] = kind == "rich" ? 1 : 0;
    }
    std::vector<int> rich;
    for (int a = 0; a < model.num_actions(); ++a) {
        if (state[static_cast<std::size_t>(a)] < 0)
            throw ParseError("action '" + model.action_name(a) + "' is not classified", number, 1);
        if (state[static_cast<std::size_t>(a)] == 1) rich.push_back(a);
    }
    return make_classification(model, std::move(rich));
}

std::string format_classes(const ActionClassification& classes, const PomdpModel& model) {
    std::string out;
    for (int a = 0; a < model.num_actions(); ++a)
        out += model.action_name(a) + (classes.is_rich(a) ? " rich\n" : " poor\n");
    return out;
}

} // namespace rvi

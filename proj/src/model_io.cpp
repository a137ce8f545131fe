#include "rhodec/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "rhodec/errors.hpp"

namespace rhodec {

namespace {

inline constexpr double kRenormalizeTolerance = 1e-6;

struct Token {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

using Field = std::vector<Token>;

struct Line {
  std::size_t number = 0;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) {
      raw = raw.substr(0, hash);
    }
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      const char c = raw[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
      } else if (c == ':') {
        line.tokens.push_back({":", number, i + 1});
        ++i;
      } else {
        std::size_t j = i;
        while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' &&
               raw[j] != '\r' && raw[j] != ':') {
          ++j;
        }
        line.tokens.push_back({std::string(raw.substr(i, j - i)), number, i + 1});
        i = j;
      }
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

[[noreturn]] void fail(const Token& at, const std::string& message) {
  throw SyntaxError(message, at.line, at.column);
}

double parse_number(const Token& tok) {
  double value = 0.0;
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (!tok.text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    fail(tok, "expected a number, found '" + tok.text + "'");
  }
  return value;
}

double parse_probability(const Token& tok) {
  const double p = parse_number(tok);
  if (p < 0.0 || p > 1.0) fail(tok, "probability out of [0, 1]: " + tok.text);
  return p;
}

std::optional<std::size_t> as_count(const std::string& text) {
  if (text.empty() ||
      !std::all_of(text.begin(), text.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    return std::nullopt;
  }
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc()) return std::nullopt;
  return value;
}

class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(const std::vector<Token>& tokens, const std::string& prefix,
           const std::string& what) {
    if (tokens.size() == 1) {
      if (auto n = as_count(tokens[0].text)) {
        if (*n == 0) fail(tokens[0], what + " count must be positive");
        for (std::size_t k = 0; k < *n; ++k) add(prefix + std::to_string(k));
        return;
      }
    }
    if (tokens.empty()) throw DimensionError(what + ": no labels declared");
    for (const Token& t : tokens) {
      if (t.text == "*") fail(t, "'*' is not a valid label");
      if (index_.count(t.text) != 0) fail(t, "duplicate label '" + t.text + "'");
      add(t.text);
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  // Returns every index the token denotes: all for '*', one otherwise.
  std::vector<std::size_t> resolve(const Token& tok,
                                   const std::string& what) const {
    if (tok.text == "*") {
      std::vector<std::size_t> all(size());
      for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
      return all;
    }
    if (auto it = index_.find(tok.text); it != index_.end()) {
      return {it->second};
    }
    if (auto n = as_count(tok.text)) {
      if (*n >= size()) {
        throw DimensionError(what + ": index " + tok.text + " out of range (line " +
                             std::to_string(tok.line) + ")");
      }
      return {*n};
    }
    fail(tok, "unknown " + what + " '" + tok.text + "'");
  }

 private:
  void add(std::string name) {
    index_.emplace(name, names_.size());
    names_.push_back(std::move(name));
  }
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(tokenize(text)) {}

  RhoDecPomdp run() {
    while (cursor_ < lines_.size()) directive();
    return finish();
  }

 private:
  const Line& next_line(const Token& after, const std::string& what) {
    if (cursor_ >= lines_.size()) {
      throw DimensionError(what + ": input ends early (after line " +
                           std::to_string(after.line) + ")");
    }
    return lines_[cursor_++];
  }

  // Splits a token list at colons.
  static std::vector<Field> fields(const std::vector<Token>& tokens,
                                   std::size_t from) {
    std::vector<Field> out(1);
    for (std::size_t i = from; i < tokens.size(); ++i) {
      if (tokens[i].text == ":") {
        out.emplace_back();
      } else {
        out.back().push_back(tokens[i]);
      }
    }
    return out;
  }

  static const Token& single(const Field& f, const Token& anchor,
                             const std::string& what) {
    if (f.size() != 1) {
      fail(f.empty() ? anchor : f[std::min<std::size_t>(1, f.size() - 1)],
           "expected exactly one " + what);
    }
    return f[0];
  }

  void directive() {
    const Line& line = lines_[cursor_++];
    const Token& key = line.tokens[0];
    if (line.tokens.size() < 2 || line.tokens[1].text != ":") {
      fail(key, "expected '<directive>:'");
    }
    const std::vector<Token> rest(line.tokens.begin() + 2, line.tokens.end());
    const std::string& k = key.text;
    if (k == "agents") {
      agents_directive(key, rest);
    } else if (k == "discount") {
      const Token& v = single(rest, key, "discount value");
      if (parse_number(v) != 1.0) fail(v, "discount must be 1");
    } else if (k == "values") {
      const Token& v = single(rest, key, "value kind");
      if (v.text != "reward") fail(v, "only 'values: reward' is supported");
    } else if (k == "states") {
      header_once(key, states_declared_);
      if (colon_in(rest)) fail(key, "unexpected ':' in states");
      states_ = LabelSet(rest, "s", "states");
    } else if (k == "start") {
      header_once(key, start_declared_);
      start_directive(key, rest);
    } else if (k == "actions" || k == "observations") {
      per_agent_directive(key, rest);
    } else if (k == "alpha") {
      header_once(key, alpha_declared_);
      const Token& v = single(rest, key, "alpha value");
      alpha_ = parse_number(v);
      if (alpha_ < 0.0) fail(v, "alpha must be nonnegative");
    } else if (k == "uncertainty") {
      header_once(key, uncertainty_declared_);
      const Token& v = single(rest, key, "uncertainty kind");
      try {
        uncertainty_ = uncertainty_from_string(v.text);
      } catch (const Error&) {
        fail(v, "unknown uncertainty kind '" + v.text + "'");
      }
    } else if (k == "T") {
      transition_directive(key, line);
    } else if (k == "O") {
      observation_directive(key, line);
    } else if (k == "R") {
      reward_directive(key, line);
    } else {
      fail(key, "unknown directive '" + k + "'");
    }
  }

  static bool colon_in(const std::vector<Token>& tokens) {
    return std::any_of(tokens.begin(), tokens.end(),
                       [](const Token& t) { return t.text == ":"; });
  }

  void header_once(const Token& key, bool& flag) {
    if (tables_started_) fail(key, key.text + " must precede T/O/R entries");
    if (flag) fail(key, "duplicate '" + key.text + "' directive");
    flag = true;
  }

  void agents_directive(const Token& key, const std::vector<Token>& rest) {
    header_once(key, agents_declared_);
    if (rest.empty()) fail(key, "agents: missing count");
    if (colon_in(rest)) fail(key, "unexpected ':' in agents");
    if (rest.size() == 1) {
      if (auto n = as_count(rest[0].text)) {
        if (*n == 0) fail(rest[0], "agent count must be positive");
        num_agents_ = *n;
        return;
      }
    }
    num_agents_ = rest.size();
  }

  void per_agent_directive(const Token& key, const std::vector<Token>& rest) {
    const bool is_actions = key.text == "actions";
    header_once(key, is_actions ? actions_declared_ : observations_declared_);
    if (!agents_declared_) fail(key, key.text + " must follow 'agents:'");
    if (!rest.empty()) fail(rest[0], "per-agent lists go on the following lines");
    auto& sets = is_actions ? actions_ : observations_;
    for (std::size_t i = 0; i < num_agents_; ++i) {
      const Line& l = next_line(key, key.text);
      if (colon_in(l.tokens)) {
        throw DimensionError(key.text + ": expected " +
                             std::to_string(num_agents_) +
                             " per-agent lines, found a directive at line " +
                             std::to_string(l.number));
      }
      sets.emplace_back(l.tokens, is_actions ? "a" : "o", key.text);
    }
  }

  void start_directive(const Token& key, const std::vector<Token>& rest) {
    if (colon_in(rest)) fail(key, "unexpected ':' in start");
    std::vector<Token> values = rest;
    if (values.empty()) {
      const Line& l = next_line(key, "start");
      if (colon_in(l.tokens)) {
        throw DimensionError("start: missing distribution (line " +
                             std::to_string(l.number) + ")");
      }
      values = l.tokens;
    }
    if (values.size() == 1 && values[0].text == "uniform") {
      start_uniform_ = true;
      return;
    }
    start_tokens_ = values;
    start_anchor_ = key;
  }

  void ensure_tables(const Token& key) {
    if (tables_started_) return;
    if (!agents_declared_ || !states_declared_ || !actions_declared_ ||
        !observations_declared_) {
      fail(key, "agents, states, actions and observations must be declared "
                "before " + key.text + " entries");
    }
    def_.states = states_.names();
    for (const auto& a : actions_) def_.actions.push_back(a.names());
    for (const auto& o : observations_) def_.observations.push_back(o.names());
    def_.allocate();
    action_space_ = JointSpace(sizes(actions_));
    observation_space_ = JointSpace(sizes(observations_));
    tables_started_ = true;
  }

  static std::vector<std::size_t> sizes(const std::vector<LabelSet>& sets) {
    std::vector<std::size_t> out;
    for (const auto& s : sets) out.push_back(s.size());
    return out;
  }

  // Joint element given either per-agent tokens, one joint index, or '*'.
  std::vector<std::size_t> joint(const Field& f, const Token& anchor,
                                 const std::vector<LabelSet>& sets,
                                 const JointSpace& space,
                                 const std::string& what) const {
    if (f.empty()) fail(anchor, "missing " + what);
    const std::size_t n = sets.size();
    if (f.size() == 1 && n > 1) {
      if (f[0].text == "*") {
        std::vector<std::size_t> all(space.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        return all;
      }
      if (auto idx = as_count(f[0].text)) {
        if (*idx >= space.size()) {
          throw DimensionError(what + ": joint index " + f[0].text +
                               " out of range (line " +
                               std::to_string(f[0].line) + ")");
        }
        return {*idx};
      }
      fail(f[0], "expected " + std::to_string(n) + " " + what +
                     " components, found one");
    }
    if (f.size() != n) {
      fail(f.size() > n ? f[n] : f.back(),
           "expected " + std::to_string(n) + " " + what + " components");
    }
    std::vector<std::vector<std::size_t>> parts;
    for (std::size_t i = 0; i < n; ++i) parts.push_back(sets[i].resolve(f[i], what));
    std::vector<std::size_t> out;
    std::vector<std::size_t> pick(n, 0);
    std::vector<std::size_t> comp(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) comp[i] = parts[i][pick[i]];
      out.push_back(space.flatten(comp));
      std::size_t i = n;
      while (i-- > 0) {
        if (++pick[i] < parts[i].size()) break;
        pick[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    return out;
  }

  std::vector<std::size_t> states(const Field& f, const Token& anchor) const {
    return states_.resolve(single(f, anchor, "state"), "state");
  }

  std::vector<double> row(const std::vector<Token>& tokens, std::size_t width,
                          const std::string& what) const {
    if (tokens.size() != width) {
      throw DimensionError(what + ": expected " + std::to_string(width) +
                           " entries, found " + std::to_string(tokens.size()) +
                           " (line " + std::to_string(tokens.empty() ? 0 : tokens[0].line) +
                           ")");
    }
    std::vector<double> out;
    for (const Token& t : tokens) out.push_back(parse_probability(t));
    return out;
  }

  std::vector<double> row_after(const Field& f, const Token& key,
                                std::size_t width, const std::string& what) {
    if (!f.empty()) return row(f, width, what);
    const Line& l = next_line(key, what);
    if (colon_in(l.tokens)) {
      throw DimensionError(what + ": missing row (line " +
                           std::to_string(l.number) + ")");
    }
    return row(l.tokens, width, what);
  }

  // Reads an S-line matrix or a keyword standing for one.
  std::vector<std::vector<double>> matrix(const Field& inline_field,
                                          const Token& key, std::size_t width,
                                          bool allow_identity) {
    const std::size_t S = states_.size();
    std::vector<Token> first = inline_field;
    if (first.empty()) {
      const Line& l = next_line(key, key.text);
      if (colon_in(l.tokens)) {
        throw DimensionError(key.text + ": missing matrix (line " +
                             std::to_string(l.number) + ")");
      }
      first = l.tokens;
    }
    std::vector<std::vector<double>> out;
    if (first.size() == 1 && (first[0].text == "uniform" ||
                              (allow_identity && first[0].text == "identity"))) {
      const bool uniform = first[0].text == "uniform";
      for (std::size_t s = 0; s < S; ++s) {
        std::vector<double> r(width, uniform ? 1.0 / static_cast<double>(width)
                                             : 0.0);
        if (!uniform) r[s] = 1.0;
        out.push_back(std::move(r));
      }
      return out;
    }
    if (!inline_field.empty()) {
      fail(inline_field[0], "expected 'uniform'" +
                                std::string(allow_identity ? " or 'identity'" : "") +
                                " or a matrix on the following lines");
    }
    out.push_back(row(first, width, key.text + " matrix"));
    for (std::size_t s = 1; s < S; ++s) {
      const Line& l = next_line(key, key.text + " matrix");
      if (colon_in(l.tokens)) {
        throw DimensionError(key.text + " matrix: expected " +
                             std::to_string(S) + " rows (line " +
                             std::to_string(l.number) + ")");
      }
      out.push_back(row(l.tokens, width, key.text + " matrix"));
    }
    return out;
  }

  void transition_directive(const Token& key, const Line& line) {
    ensure_tables(key);
    const auto f = fields(line.tokens, 2);
    const std::size_t S = states_.size();
    const auto acts = joint(f[0], key, actions_, action_space_, "action");
    switch (f.size()) {
      case 4: {
        const auto from = states(f[1], key);
        const auto to = states(f[2], key);
        const double p = parse_probability(single(f[3], key, "probability"));
        for (auto a : acts)
          for (auto s : from)
            for (auto n : to) def_.T(a, s, n) = p;
        break;
      }
      case 3: {
        const auto from = states(f[1], key);
        const auto r = row_after(f[2], key, S, "T row");
        for (auto a : acts)
          for (auto s : from)
            for (std::size_t n = 0; n < S; ++n) def_.T(a, s, n) = r[n];
        break;
      }
      case 2: {
        const auto m = matrix(f[1], key, S, true);
        for (auto a : acts)
          for (std::size_t s = 0; s < S; ++s)
            for (std::size_t n = 0; n < S; ++n) def_.T(a, s, n) = m[s][n];
        break;
      }
      default:
        fail(key, "malformed T entry");
    }
  }

  void observation_directive(const Token& key, const Line& line) {
    ensure_tables(key);
    const auto f = fields(line.tokens, 2);
    const std::size_t S = states_.size();
    const std::size_t Z = observation_space_.size();
    const auto acts = joint(f[0], key, actions_, action_space_, "action");
    switch (f.size()) {
      case 4: {
        const auto to = states(f[1], key);
        const auto zs =
            joint(f[2], key, observations_, observation_space_, "observation");
        const double p = parse_probability(single(f[3], key, "probability"));
        for (auto a : acts)
          for (auto n : to)
            for (auto z : zs) def_.O(a, n, z) = p;
        break;
      }
      case 3: {
        const auto to = states(f[1], key);
        const auto r = row_after(f[2], key, Z, "O row");
        for (auto a : acts)
          for (auto n : to)
            for (std::size_t z = 0; z < Z; ++z) def_.O(a, n, z) = r[z];
        break;
      }
      case 2: {
        const auto m = matrix(f[1], key, Z, false);
        for (auto a : acts)
          for (std::size_t n = 0; n < S; ++n)
            for (std::size_t z = 0; z < Z; ++z) def_.O(a, n, z) = m[n][z];
        break;
      }
      default:
        fail(key, "malformed O entry");
    }
  }

  void reward_directive(const Token& key, const Line& line) {
    ensure_tables(key);
    const auto f = fields(line.tokens, 2);
    if (f.size() == 5) {
      for (std::size_t k : {2u, 3u}) {
        if (f[k].size() != 1 || f[k][0].text != "*") {
          fail(f[k].empty() ? key : f[k][0],
               "rewards depend on action and state only; next-state and "
               "observation must be '*'");
        }
      }
    } else if (f.size() != 3) {
      fail(key, "expected 'R: <action> : <state> : <value>'");
    }
    const auto acts = joint(f[0], key, actions_, action_space_, "action");
    const auto ss = states(f[1], key);
    const double v = parse_number(single(f.back(), key, "reward value"));
    for (auto a : acts)
      for (auto s : ss) def_.R(s, a) = v;
  }

  static void settle_row(std::span<double> r, const std::string& label) {
    double sum = 0.0;
    for (double p : r) sum += p;
    const double residual = std::abs(1.0 - sum);
    if (residual <= kStochasticTolerance) return;
    if (residual < kRenormalizeTolerance && sum > 0.0) {
      for (double& p : r) p /= sum;
      return;
    }
    throw StochasticityError(label, residual);
  }

  RhoDecPomdp finish() {
    const Token end{"", lines_.empty() ? 1 : lines_.back().number, 1};
    if (!tables_started_) {
      fail(end, "model has no T/O entries");
    }
    if (!start_declared_) start_uniform_ = true;
    const std::size_t S = states_.size();
    if (start_uniform_) {
      def_.initial_belief.assign(S, 1.0 / static_cast<double>(S));
    } else {
      def_.initial_belief = row(start_tokens_, S, "start");
    }
    settle_row(def_.initial_belief, "start");
    def_.alpha = alpha_declared_ ? alpha_ : 0.0;
    def_.uncertainty = uncertainty_declared_
                           ? uncertainty_
                           : (alpha_declared_ && alpha_ > 0.0
                                  ? Uncertainty::kShannonEntropy
                                  : Uncertainty::kNone);

    const std::size_t A = action_space_.size();
    const std::size_t Z = observation_space_.size();
    for (std::size_t a = 0; a < A; ++a) {
      std::string al;
      for (std::size_t i = 0; i < actions_.size(); ++i) {
        if (i) al += ' ';
        al += actions_[i].names()[action_space_.component(a, i)];
      }
      for (std::size_t s = 0; s < S; ++s) {
        settle_row({def_.transition.data() + (a * S + s) * S, S},
                   "T(s=" + def_.states[s] + ", a=" + al + ")");
        settle_row({def_.observation.data() + (a * S + s) * Z, Z},
                   "O(s'=" + def_.states[s] + ", a=" + al + ")");
      }
    }
    RhoDecPomdp model(std::move(def_));
    if (auto v = validate_model(model); !v.empty()) {
      throw StochasticityError(v.front().location, v.front().residual);
    }
    return model;
  }

  std::vector<Line> lines_;
  std::size_t cursor_ = 0;

  bool agents_declared_ = false;
  bool states_declared_ = false;
  bool start_declared_ = false;
  bool actions_declared_ = false;
  bool observations_declared_ = false;
  bool alpha_declared_ = false;
  bool uncertainty_declared_ = false;
  bool tables_started_ = false;

  std::size_t num_agents_ = 0;
  LabelSet states_;
  std::vector<LabelSet> actions_;
  std::vector<LabelSet> observations_;
  JointSpace action_space_;
  JointSpace observation_space_;
  bool start_uniform_ = false;
  std::vector<Token> start_tokens_;
  Token start_anchor_;
  double alpha_ = 0.0;
  Uncertainty uncertainty_ = Uncertainty::kNone;
  ModelDefinition def_;
};

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_label(const std::string& label) {
  const bool bad =
      label.empty() || label == "*" ||
      label.find_first_of(" \t\r\n:#") != std::string::npos;
  if (bad) throw InvalidArgument("label '" + label + "' cannot be written");
}

std::string joint_names(const RhoDecPomdp& model, std::size_t flat,
                        const JointSpace& space, bool actions) {
  std::string out;
  for (std::size_t i = 0; i < space.num_agents(); ++i) {
    if (i) out += ' ';
    const auto& labels =
        actions ? model.action_labels(i) : model.observation_labels(i);
    out += labels[space.component(flat, i)];
  }
  return out;
}

}  // namespace

RhoDecPomdp parse_model(std::string_view text) { return Parser(text).run(); }

std::string write_model(const RhoDecPomdp& model) {
  const std::size_t n = model.num_agents();
  const std::size_t S = model.num_states();
  const std::size_t A = model.num_joint_actions();
  for (const auto& s : model.state_labels()) check_label(s);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& a : model.action_labels(i)) check_label(a);
    for (const auto& z : model.observation_labels(i)) check_label(z);
  }

  std::ostringstream out;
  out << "agents: " << n << "\n";
  out << "discount: 1\n";
  out << "values: reward\n";
  out << "states:";
  for (const auto& s : model.state_labels()) out << ' ' << s;
  out << "\n";

  const auto b0 = model.initial_belief_probs();
  const double u = 1.0 / static_cast<double>(S);
  if (std::all_of(b0.begin(), b0.end(), [u](double p) { return p == u; })) {
    out << "start: uniform\n";
  } else {
    out << "start:";
    for (double p : b0) out << ' ' << number(p);
    out << "\n";
  }
  out << "actions:\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& labels = model.action_labels(i);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      out << (k ? " " : "") << labels[k];
    }
    out << "\n";
  }
  out << "observations:\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& labels = model.observation_labels(i);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      out << (k ? " " : "") << labels[k];
    }
    out << "\n";
  }
  out << "alpha: " << number(model.alpha()) << "\n";
  out << "uncertainty: " << to_string(model.uncertainty()) << "\n";

  for (std::size_t a = 0; a < A; ++a) {
    const std::string an = joint_names(model, a, model.action_space(), true);
    for (std::size_t s = 0; s < S; ++s) {
      out << "T: " << an << " : " << model.state_labels()[s] << " :";
      for (double p : model.transition_row(a, s)) out << ' ' << number(p);
      out << "\n";
    }
  }
  for (std::size_t a = 0; a < A; ++a) {
    const std::string an = joint_names(model, a, model.action_space(), true);
    for (std::size_t s = 0; s < S; ++s) {
      out << "O: " << an << " : " << model.state_labels()[s] << " :";
      for (double p : model.observation_row(a, s)) out << ' ' << number(p);
      out << "\n";
    }
  }
  for (std::size_t a = 0; a < A; ++a) {
    const std::string an = joint_names(model, a, model.action_space(), true);
    for (std::size_t s = 0; s < S; ++s) {
      const double r = model.reward(s, a);
      if (r == 0.0) continue;
      out << "R: " << an << " : " << model.state_labels()[s] << " : "
          << number(r) << "\n";
    }
  }
  return out.str();
}

RhoDecPomdp load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void save_model(const RhoDecPomdp& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << write_model(model);
}

}  // namespace rhodec

#include "contain/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "contain/error.hpp"
#include "contain/graph.hpp"

namespace contain {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::Parse, line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  for (char c : s) depth += c == '[' ? 1 : c == ']' ? -1 : 0;
  return depth;
}

bool is_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

/// Cursor over an entry's value that knows which physical line it is on.
class ValueCursor {
 public:
  ValueCursor(const DocumentEntry& e, std::string context) : e_(e), context_(std::move(context)) {}

  void skip_ws() {
    while (pos_ < e_.value.size() && std::isspace(static_cast<unsigned char>(e_.value[pos_]))) ++pos_;
  }
  [[nodiscard]] bool done() {
    skip_ws();
    return pos_ >= e_.value.size();
  }
  [[nodiscard]] char peek() {
    skip_ws();
    return pos_ < e_.value.size() ? e_.value[pos_] : '\0';
  }
  void expect(char c, const char* what) {
    if (peek() != c) error(std::string("expected '") + c + "' " + what);
    ++pos_;
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  double number() {
    skip_ws();
    const char* first = e_.value.data() + pos_;
    const char* last = e_.value.data() + e_.value.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{}) error("expected a number");
    pos_ = static_cast<std::size_t>(ptr - e_.value.data());
    return v;
  }
  [[nodiscard]] std::size_t line() const {
    const auto it = std::upper_bound(e_.line_starts.begin(), e_.line_starts.end(), pos_);
    return e_.line + static_cast<std::size_t>(it - e_.line_starts.begin()) - 1;
  }
  [[noreturn]] void error(const std::string& msg) const { fail(line(), context_ + ": " + msg); }

 private:
  const DocumentEntry& e_;
  std::string context_;
  std::size_t pos_ = 0;
};

std::string context_of(const std::string& section, const DocumentEntry& e) {
  return "[" + section + "] " + e.key;
}

std::vector<double> parse_row(ValueCursor& cur) {
  std::vector<double> row;
  cur.expect('[', "to open a matrix row");
  if (cur.accept(']')) cur.error("malformed matrix row: empty row");
  while (true) {
    row.push_back(cur.number());
    if (cur.accept(']')) break;
    if (!cur.accept(',')) {
      const char c = cur.peek();
      if (c == '\0') cur.error("malformed matrix row: missing ']'");
      if (!(c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c)))) {
        cur.error(std::string("malformed matrix row: unexpected '") + c + "'");
      }
    }
  }
  return row;
}

const std::set<std::string>& known_keys(const std::string& section) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"system", {"A", "B", "C", "n", "p", "q"}},
      {"graph", {"adjacency", "labels"}},
      {"controller", {"kind", "kappa", "tau", "phi", "d0", "c1_multiplier", "c2_multiplier", "are_weight"}},
      {"sim", {"x0", "v0", "t_end", "h", "tail_fraction"}},
      {"leaders", {}},
  };
  static const std::set<std::string> none;
  const auto it = keys.find(section);
  return it == keys.end() ? none : it->second;
}

const DocumentEntry& require_entry(const ScenarioDocument& doc, const std::string& section, const std::string& key) {
  const auto* e = doc.find(section, key);
  if (!e) fail(0, "[" + section + "] missing required key '" + key + "'");
  return *e;
}

std::string word_value(const DocumentEntry& e) { return std::string(trim(e.value)); }

Vector broadcast(const DocumentEntry& e, const std::string& section, std::size_t m) {
  Vector v = parse_list_value(e, section);
  if (v.size() == 1) return Vector(m, v.front());
  if (v.size() != m) {
    fail(e.line, context_of(section, e) + ": expected 1 or " + std::to_string(m) + " values, got " +
                     std::to_string(v.size()));
  }
  return v;
}

Vector canonical_rows(const Matrix& rows, const Topology& t) {
  Vector out(rows.size());
  const std::size_t n = rows.cols();
  for (std::size_t c = 0; c < t.n_agents(); ++c) {
    const auto src = rows.row(t.to_user(c));
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(c * n));
  }
  return out;
}

}  // namespace

const DocumentEntry* ScenarioDocument::find(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return nullptr;
  for (const auto& e : it->second)
    if (e.key == key) return &e;
  return nullptr;
}

std::vector<const DocumentEntry*> ScenarioDocument::find_all(const std::string& section,
                                                             const std::string& key) const {
  std::vector<const DocumentEntry*> out;
  const auto it = sections.find(section);
  if (it == sections.end()) return out;
  for (const auto& e : it->second)
    if (e.key == key) out.push_back(&e);
  return out;
}

ScenarioDocument parse_document(std::string_view text) {
  ScenarioDocument doc;
  std::string section;
  DocumentEntry* open = nullptr;  // entry whose brackets are still unbalanced
  std::size_t line_no = 0;

  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto c = raw.find_first_of("#;"); c != std::string_view::npos) raw = raw.substr(0, c);
    const std::string_view line = trim(raw);

    if (open) {
      open->line_starts.push_back(open->value.size() + 1);
      open->value += '\n';
      open->value += line;
      const int depth = bracket_balance(open->value);
      if (depth < 0) fail(line_no, "[" + section + "] " + open->key + ": unbalanced ']'");
      if (depth == 0) open = nullptr;
      continue;
    }
    if (line.empty()) continue;

    if (line.front() == '[' && line.back() == ']' && is_identifier(trim(line.substr(1, line.size() - 2)))) {
      section = std::string(trim(line.substr(1, line.size() - 2)));
      doc.sections[section];
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value' or '[section]'");
    if (section.empty()) fail(line_no, "entry outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    if (!is_identifier(key)) fail(line_no, "invalid key '" + key + "'");

    DocumentEntry e;
    e.key = key;
    e.value = std::string(trim(line.substr(eq + 1)));
    e.line = line_no;
    e.line_starts.push_back(0);
    if (e.value.empty()) fail(line_no, "[" + section + "] " + key + ": missing value");
    auto& entries = doc.sections[section];
    entries.push_back(std::move(e));
    const int depth = bracket_balance(entries.back().value);
    if (depth < 0) fail(line_no, "[" + section + "] " + key + ": unbalanced ']'");
    if (depth > 0) open = &entries.back();
  }
  if (open) fail(open->line, "[" + section + "] " + open->key + ": unterminated matrix (missing ']')");
  return doc;
}

Matrix parse_matrix_value(const DocumentEntry& e, const std::string& section) {
  ValueCursor cur(e, context_of(section, e));
  std::vector<std::vector<double>> rows;
  if (cur.peek() != '[') {
    rows.push_back({cur.number()});
  } else {
    cur.expect('[', "to open a matrix");
    if (cur.peek() == '[') {
      while (true) {
        const std::size_t row_line = (cur.skip_ws(), cur.line());
        rows.push_back(parse_row(cur));
        if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
          fail(row_line, context_of(section, e) + ": malformed matrix row " + std::to_string(rows.size()) + " has " +
                             std::to_string(rows.back().size()) + " entries, expected " +
                             std::to_string(rows.front().size()));
        }
        if (cur.accept(']')) break;
        cur.expect(',', "between matrix rows");
      }
    } else {
      std::vector<double> row;
      while (true) {
        row.push_back(cur.number());
        if (cur.accept(']')) break;
        cur.accept(',');
        if (cur.done()) cur.error("malformed matrix row: missing ']'");
      }
      rows.push_back(std::move(row));
    }
  }
  if (!cur.done()) cur.error("trailing characters after matrix");
  return Matrix::from_rows(rows);
}

Vector parse_list_value(const DocumentEntry& e, const std::string& section) {
  ValueCursor cur(e, context_of(section, e));
  const bool bracketed = cur.accept('[');
  Vector out;
  while (!cur.done()) {
    if (bracketed && cur.accept(']')) {
      if (!cur.done()) cur.error("trailing characters after list");
      return out;
    }
    out.push_back(cur.number());
    cur.accept(',');
  }
  if (bracketed) cur.error("missing ']'");
  if (out.empty()) cur.error("empty list");
  return out;
}

double parse_number_value(const DocumentEntry& e, const std::string& section) {
  ValueCursor cur(e, context_of(section, e));
  const double v = cur.number();
  if (!cur.done()) cur.error("expected a single number");
  return v;
}

Scenario parse_scenario(std::string_view text) {
  const ScenarioDocument doc = parse_document(text);

  for (const auto& [name, entries] : doc.sections) {
    if (name == "leaders") continue;
    const auto& keys = known_keys(name);
    if (keys.empty()) fail(0, "unknown section [" + name + "]");
    std::set<std::string> seen;
    for (const auto& e : entries) {
      if (!keys.count(e.key)) fail(e.line, "[" + name + "] unknown key '" + e.key + "'");
      if (!seen.insert(e.key).second) fail(e.line, "[" + name + "] duplicate key '" + e.key + "'");
    }
  }
  for (const char* required : {"system", "graph", "controller", "leaders", "sim"}) {
    if (!doc.sections.count(required)) fail(0, std::string("missing section [") + required + "]");
  }

  Scenario scn;

  // [system]
  scn.system.a = parse_matrix_value(require_entry(doc, "system", "A"), "system");
  scn.system.b = parse_matrix_value(require_entry(doc, "system", "B"), "system");
  if (const auto* c = doc.find("system", "C")) scn.system.c = parse_matrix_value(*c, "system");
  const std::size_t n = scn.system.a.rows();
  if (!scn.system.a.is_square()) fail(require_entry(doc, "system", "A").line, "[system] A must be square");
  if (scn.system.b.rows() != n) fail(require_entry(doc, "system", "B").line, "[system] B must have as many rows as A");
  if (!scn.system.c.empty() && scn.system.c.cols() != n) {
    fail(doc.find("system", "C")->line, "[system] C must have as many columns as A");
  }
  const std::pair<const char*, std::size_t> dims[] = {
      {"n", n}, {"p", scn.system.b.cols()}, {"q", scn.system.c.rows()}};
  for (const auto& [key, actual] : dims) {
    if (const auto* e = doc.find("system", key)) {
      if (parse_number_value(*e, "system") != static_cast<double>(actual)) {
        fail(e->line, std::string("[system] declared ") + key + " does not match the matrices");
      }
    }
  }

  // [graph]
  const auto& adj_entry = require_entry(doc, "graph", "adjacency");
  const Matrix adjacency = parse_matrix_value(adj_entry, "graph");
  std::vector<std::string> labels;
  if (const auto* e = doc.find("graph", "labels")) {
    std::string s = e->value;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    for (std::string w; in >> w;) labels.push_back(w);
    if (labels.size() != adjacency.rows()) fail(e->line, "[graph] labels: expected one label per agent");
    if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
      fail(e->line, "[graph] labels must be unique");
    }
  }
  try {
    scn.topology = build_topology(adjacency, labels);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::BadAdjacency) fail(adj_entry.line, std::string("[graph] adjacency: ") + err.what());
    throw;
  }
  const auto& topo = scn.topology;
  const std::size_t m = topo.n_followers();

  // [controller]
  const auto& kind_entry = require_entry(doc, "controller", "kind");
  const auto kind = parse_controller_kind(word_value(kind_entry));
  if (!kind) fail(kind_entry.line, "[controller] kind: unknown controller '" + word_value(kind_entry) + "'");
  scn.controller.kind = *kind;
  if (const auto* e = doc.find("controller", "kappa")) scn.controller.kappa = parse_number_value(*e, "controller");
  if (const auto* e = doc.find("controller", "tau")) scn.controller.taus = broadcast(*e, "controller", m);
  if (const auto* e = doc.find("controller", "phi")) scn.controller.phis = broadcast(*e, "controller", m);
  scn.controller.d0 = Vector(m, 0.0);
  if (const auto* e = doc.find("controller", "d0")) scn.controller.d0 = broadcast(*e, "controller", m);
  if (const auto* e = doc.find("controller", "c1_multiplier")) {
    scn.design.c1_multiplier = parse_number_value(*e, "controller");
  }
  if (const auto* e = doc.find("controller", "c2_multiplier")) {
    scn.design.c2_multiplier = parse_number_value(*e, "controller");
  }
  if (const auto* e = doc.find("controller", "are_weight")) {
    const Matrix w = parse_matrix_value(*e, "controller");
    scn.design.are_weight = w.rows() == 1 && w.cols() == 1 ? w(0, 0) * Matrix::identity(n) : w;
    if (scn.design.are_weight.rows() != n || !scn.design.are_weight.is_square()) {
      fail(e->line, "[controller] are_weight must be a scalar or an n x n matrix");
    }
  }

  // [leaders]
  scn.leaders.assign(topo.n_leaders(), LeaderInputSpec{Matrix(scn.system.b.cols(), n), {}, 0.0});
  std::vector<bool> has_gamma(topo.n_leaders(), false);
  for (const auto& e : doc.sections.at("leaders")) {
    const auto dot_pos = e.key.rfind('.');
    if (dot_pos == std::string::npos) fail(e.line, "[leaders] keys take the form <label>.gain|sin|gamma");
    const std::string label = e.key.substr(0, dot_pos);
    const std::string field = e.key.substr(dot_pos + 1);
    const auto it = std::find(topo.labels().begin(), topo.labels().end(), label);
    if (it == topo.labels().end()) fail(e.line, "[leaders] unknown agent '" + label + "'");
    const auto canonical = static_cast<std::size_t>(it - topo.labels().begin());
    if (topo.role(canonical) != Role::Leader) {
      fail(e.line, "[leaders] agent '" + label + "' has neighbors and is therefore a follower");
    }
    auto& spec = scn.leaders[canonical - m];
    if (field == "gain") {
      spec.feedback_gain = parse_matrix_value(e, "leaders");
      if (spec.feedback_gain.rows() != scn.system.b.cols() || spec.feedback_gain.cols() != n) {
        fail(e.line, "[leaders] " + e.key + ": feedback gain must be p x n");
      }
    } else if (field == "sin") {
      const Vector v = parse_list_value(e, "leaders");
      if (v.size() != 4) fail(e.line, "[leaders] " + e.key + ": expected channel, amplitude, omega, phase");
      if (v[0] < 1.0 || v[0] > static_cast<double>(scn.system.b.cols()) || v[0] != static_cast<std::size_t>(v[0])) {
        fail(e.line, "[leaders] " + e.key + ": channel must be an integer in 1..p");
      }
      spec.sinusoids.push_back({static_cast<std::size_t>(v[0]) - 1, v[1], v[2], v[3]});
    } else if (field == "gamma") {
      spec.gamma = parse_number_value(e, "leaders");
      if (!(spec.gamma > 0.0)) fail(e.line, "[leaders] " + e.key + ": gamma must be positive");
      has_gamma[canonical - m] = true;
    } else {
      fail(e.line, "[leaders] unknown field '" + field + "'");
    }
  }
  for (std::size_t j = 0; j < has_gamma.size(); ++j) {
    if (!has_gamma[j]) fail(0, "[leaders] leader '" + topo.labels()[m + j] + "' needs a gamma declaration");
  }

  // [sim]
  const auto& x0_entry = require_entry(doc, "sim", "x0");
  const Matrix x0 = parse_matrix_value(x0_entry, "sim");
  if (x0.rows() != topo.n_agents() || x0.cols() != n) fail(x0_entry.line, "[sim] x0 must be N x n");
  scn.x0 = canonical_rows(x0, topo);
  if (const auto* e = doc.find("sim", "v0")) {
    const Matrix v0 = parse_matrix_value(*e, "sim");
    if (v0.rows() != topo.n_agents() || v0.cols() != n) fail(e->line, "[sim] v0 must be N x n");
    scn.v0 = canonical_rows(v0, topo);
  }
  if (const auto* e = doc.find("sim", "t_end")) scn.t_end = parse_number_value(*e, "sim");
  if (const auto* e = doc.find("sim", "h")) scn.h = parse_number_value(*e, "sim");
  if (const auto* e = doc.find("sim", "tail_fraction")) scn.tail_fraction = parse_number_value(*e, "sim");
  return scn;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string default_scenario_text() {
  return R"(# Eight-agent containment scenario.
# Agents: x' = A x + B u. Leaders 7 and 8 run u7 = -[0 2] x7 + 4 sin(2t) and
# u8 = -[1 3] x8 + 2 cos(t).
# Topology (defined for this toolkit): followers 1-6 form an undirected ring,
# leader 7 feeds followers 1 and 2, leader 8 feeds followers 4 and 5.

[system]
A = [[0, 1], [-1, 1]]
B = [[0], [1]]
C = [[1, 0], [0, 1]]

[graph]
labels = 1 2 3 4 5 6 7 8
adjacency = [[0, 1, 0, 0, 0, 1, 1, 0],
             [1, 0, 1, 0, 0, 0, 1, 0],
             [0, 1, 0, 1, 0, 0, 0, 0],
             [0, 0, 1, 0, 1, 0, 0, 1],
             [0, 0, 0, 1, 0, 1, 0, 1],
             [1, 0, 0, 0, 1, 0, 0, 0],
             [0, 0, 0, 0, 0, 0, 0, 0],
             [0, 0, 0, 0, 0, 0, 0, 0]]

[controller]
kind = adaptive
kappa = 0.1
tau = 5
phi = 0.005
d0 = 0
c1_multiplier = 1
c2_multiplier = 1
# Riccati weight Q = 4 I. Q = I gives K = -[0.41, 2.68], whose sliding surface
# K sigma = 0 decays at only 0.15 1/s; Q = 4 I gives K = -[1.24, 3.73].
are_weight = 4

[leaders]
# sin = channel, amplitude, omega [rad/s], phase [rad]
# gamma bounds |u| over the run: |u7| peaks near 5.0, |u8| at 3 (t = 0).
7.gain = [[0, -2]]
7.sin = 1, 4, 2, 0
7.gamma = 6
8.gain = [[-1, -3]]
8.sin = 1, 2, 1, 1.5707963267948966
8.gamma = 4

[sim]
# followers at (i, -i)/2, leaders at (1, 0) and (-1, 0)
x0 = [[0.5, -0.5], [1, -1], [1.5, -1.5], [2, -2], [2.5, -2.5], [3, -3],
      [1, 0], [-1, 0]]
v0 = [[0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]]
t_end = 20
h = 0.001
tail_fraction = 0.2
)";
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_matrix(const Matrix& m) {
  std::string out = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out += r == 0 ? "[" : ", [";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ", ";
      out += format_double(m(r, c));
    }
    out += "]";
  }
  return out + "]";
}

std::string format_gain_file(const GainSet& gains, double lmi_max_eig) {
  std::string out = "[gains]\n";
  out += "P = " + format_matrix(gains.p) + "\n";
  out += "K = " + format_matrix(gains.k) + "\n";
  out += "Gamma = " + format_matrix(gains.gamma) + "\n";
  out += "c1 = " + format_double(gains.c1) + "\n";
  out += "c2 = " + format_double(gains.c2) + "\n";
  out += "alpha = " + format_double(gains.alpha) + "\n";
  if (gains.l_obs) out += "L_obs = " + format_matrix(*gains.l_obs) + "\n";
  out += "lmi_max_eigenvalue = " + format_double(lmi_max_eig) + "\n";
  return out;
}

GainSet parse_gain_file(std::string_view text) {
  const ScenarioDocument doc = parse_document(text);
  GainSet g;
  g.p = parse_matrix_value(require_entry(doc, "gains", "P"), "gains");
  g.k = parse_matrix_value(require_entry(doc, "gains", "K"), "gains");
  g.gamma = parse_matrix_value(require_entry(doc, "gains", "Gamma"), "gains");
  g.c1 = parse_number_value(require_entry(doc, "gains", "c1"), "gains");
  g.c2 = parse_number_value(require_entry(doc, "gains", "c2"), "gains");
  g.alpha = parse_number_value(require_entry(doc, "gains", "alpha"), "gains");
  if (const auto* e = doc.find("gains", "L_obs")) g.l_obs = parse_matrix_value(*e, "gains");
  return g;
}

void apply_overrides(Scenario& scn, const ScenarioOverrides& o) {
  if (o.controller) scn.controller.kind = *o.controller;
  if (o.kappa) scn.controller.kappa = *o.kappa;
  if (o.h) scn.h = *o.h;
  if (o.t_end) scn.t_end = *o.t_end;
}

}  // namespace contain

#include "kpos/system_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "kpos/format.hpp"

namespace kpos {

namespace {

struct Node {
  bool is_list = false;
  double number = 0.0;
  std::vector<Node> items;
};

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

  Node parse() {
    Node n = value();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected text after value");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Node value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    if (text_[pos_] == '[') return list();
    return number();
  }

  Node list() {
    ++pos_;
    Node n;
    n.is_list = true;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return n;
    }
    while (true) {
      n.items.push_back(value());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated list");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return n;
      }
      fail(std::string("expected ',' or ']' but found '") + text_[pos_] + "'");
    }
  }

  Node number() {
    std::size_t start = pos_;
    if (text_[pos_] == '+') ++start, ++pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   text_[pos_] == '-' || text_[pos_] == '+'))
      ++pos_;
    const std::string_view token = text_.substr(start, pos_ - start);
    Node n;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), n.number);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size())
      fail("malformed number '" + std::string(token) + "'");
    if (!std::isfinite(n.number)) fail("non-finite number '" + std::string(token) + "'");
    return n;
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

struct Entry {
  Node value;
  int line = 0;
};

std::vector<double> flat(const Entry& e, const std::string& key) {
  if (!e.value.is_list) throw ParseError(e.line, "'" + key + "' must be a list");
  std::vector<double> out;
  for (const auto& item : e.value.items) {
    if (item.is_list) throw ParseError(e.line, "'" + key + "' must be a flat list of numbers");
    out.push_back(item.number);
  }
  return out;
}

std::string list_text(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_exact(v[i]);
  return s + "]";
}

}  // namespace

System parse_system(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::string key, pending;
  int key_line = 0;

  auto finish = [&]() {
    entries[key] = Entry{ValueParser(pending, key_line).parse(), key_line};
    key.clear();
    pending.clear();
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    if (!key.empty()) {
      pending += " " + line;
    } else {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
      std::string k = line.substr(0, eq);
      k.erase(0, k.find_first_not_of(" \t"));
      k.erase(k.find_last_not_of(" \t\r") + 1);
      static const char* known[] = {"poles", "residues", "fir", "num", "den", "A", "b", "c"};
      if (std::find(std::begin(known), std::end(known), k) == std::end(known))
        throw ParseError(line_no, "unknown key '" + k + "'");
      if (entries.count(k)) throw ParseError(line_no, "duplicate key '" + k + "'");
      key = k;
      key_line = line_no;
      pending = line.substr(eq + 1);
    }
    int depth = 0;
    for (char ch : pending) depth += ch == '[' ? 1 : (ch == ']' ? -1 : 0);
    if (depth < 0) throw ParseError(line_no, "unbalanced ']'");
    if (depth == 0) finish();
  }
  if (!key.empty()) throw ParseError(key_line, "unterminated list for '" + key + "'");
  if (entries.empty()) throw ParseError(0, "no system definition found");

  auto has = [&](const char* k) { return entries.count(k) > 0; };
  const bool pf = has("poles") || has("residues") || has("fir");
  const bool tf = has("num") || has("den");
  const bool ss = has("A") || has("b") || has("c");
  if (int(pf) + int(tf) + int(ss) != 1)
    throw ParseError(0, "exactly one representation expected: poles/residues, num/den or A/b/c");

  try {
    if (pf) {
      if (has("poles") != has("residues")) throw ParseError(0, "'poles' and 'residues' must appear together");
      std::vector<double> p, r, fir;
      if (has("poles")) {
        p = flat(entries["poles"], "poles");
        r = flat(entries["residues"], "residues");
        if (p.size() != r.size())
          throw ParseError(entries["residues"].line, "'poles' and 'residues' differ in length");
      }
      if (has("fir")) fir = flat(entries["fir"], "fir");
      PartialFractionSystem sys = PartialFractionSystem::from_lists(r, p, fir);
      if (sys.is_zero()) throw ParseError(0, "the system is identically zero");
      return sys;
    }
    if (tf) {
      if (!has("num") || !has("den")) throw ParseError(0, "'num' and 'den' must appear together");
      return RationalTransferFunction::from_coefficients(flat(entries["num"], "num"), flat(entries["den"], "den"));
    }
    for (const char* k : {"A", "b", "c"})
      if (!has(k)) throw ParseError(0, std::string("state-space definition lacks '") + k + "'");
    const Entry& a = entries["A"];
    if (!a.value.is_list || a.value.items.empty()) throw ParseError(a.line, "'A' must be a list of rows");
    const auto n = static_cast<Eigen::Index>(a.value.items.size());
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Node& row = a.value.items[static_cast<std::size_t>(i)];
      if (!row.is_list || static_cast<Eigen::Index>(row.items.size()) != n)
        throw ParseError(a.line, "'A' must be square");
      for (Eigen::Index j = 0; j < n; ++j) {
        if (row.items[static_cast<std::size_t>(j)].is_list) throw ParseError(a.line, "'A' entries must be numbers");
        A(i, j) = row.items[static_cast<std::size_t>(j)].number;
      }
    }
    const auto b = flat(entries["b"], "b");
    const auto c = flat(entries["c"], "c");
    return StateSpace(A, Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size())),
                      Eigen::Map<const Eigen::RowVectorXd>(c.data(), static_cast<Eigen::Index>(c.size())));
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
}

System read_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

std::string write_system(const System& sys) {
  std::string out;
  if (const auto* pfs = std::get_if<PartialFractionSystem>(&sys)) {
    const auto p = pfs->poles(), r = pfs->residues();
    out += "poles = " + list_text(p) + "\n";
    out += "residues = " + list_text(r) + "\n";
    if (!pfs->fir().empty()) out += "fir = " + list_text(pfs->fir()) + "\n";
  } else if (const auto* rtf = std::get_if<RationalTransferFunction>(&sys)) {
    out += "num = " + list_text(rtf->numerator()) + "\n";
    out += "den = " + list_text(rtf->denominator()) + "\n";
  } else {
    const auto& ss = std::get<StateSpace>(sys);
    out += "A = [\n";
    for (Eigen::Index i = 0; i < ss.A().rows(); ++i) {
      std::vector<double> row(ss.A().cols());
      for (Eigen::Index j = 0; j < ss.A().cols(); ++j) row[static_cast<std::size_t>(j)] = ss.A()(i, j);
      out += "  " + list_text(row) + (i + 1 < ss.A().rows() ? ",\n" : "\n");
    }
    out += "]\n";
    out += "b = " + list_text(std::vector<double>(ss.b().data(), ss.b().data() + ss.b().size())) + "\n";
    out += "c = " + list_text(std::vector<double>(ss.c().data(), ss.c().data() + ss.c().size())) + "\n";
  }
  return out;
}

}  // namespace kpos

#include <sstream>

#include "kpos/format.hpp"
#include "kpos/positivity.hpp"

namespace kpos {

namespace {

void indent(std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

std::string number(double v) { return format_number(v); }

std::string tuple_text(const IndexTuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.elements.size(); ++i) s += (i ? "," : "") + std::to_string(t.elements[i]);
  return s + ")";
}

void write(std::ostringstream& os, const PositivityReport& r, const std::string& name, int depth) {
  indent(os, depth);
  os << name << " {\n";
  auto line = [&](const std::string& key, const std::string& value) {
    indent(os, depth + 1);
    os << key << ": " << value << "\n";
  };
  if (!r.label.empty()) line("label", r.label);
  line("property", to_string(r.property));
  line("k", std::to_string(r.k));
  line("verdict", to_string(r.verdict));
  if (r.verdict == Verdict::HoldsToHorizon) line("horizon", std::to_string(r.horizon));
  if (r.t0) line("t0", std::to_string(*r.t0));
  if (r.certificate) {
    indent(os, depth + 1);
    os << "certificate {\n";
    indent(os, depth + 2);
    os << "kind: " << r.certificate->kind << "\n";
    indent(os, depth + 2);
    os << "detail: " << r.certificate->detail << "\n";
    if (r.certificate->tail_start) {
      indent(os, depth + 2);
      os << "tail_start: " << *r.certificate->tail_start << "\n";
    }
    indent(os, depth + 1);
    os << "}\n";
  }
  if (r.witness) {
    const Witness& w = *r.witness;
    indent(os, depth + 1);
    os << "witness {\n";
    auto wline = [&](const std::string& key, const std::string& value) {
      indent(os, depth + 2);
      os << key << ": " << value << "\n";
    };
    wline("kind", w.kind);
    wline("detail", w.detail);
    wline("value", number(w.value));
    if (w.time) wline("time", std::to_string(*w.time));
    if (w.index) wline("index", std::to_string(*w.index));
    if (w.location) {
      std::string loc = number(w.location->real());
      if (w.location->imag() != 0.0) loc += (w.location->imag() < 0 ? "-" : "+") + number(std::abs(w.location->imag())) + "i";
      wline("location", loc);
    }
    if (w.minor) {
      wline("minor_order", std::to_string(w.minor->order));
      wline("minor_rows", tuple_text(w.minor->rows));
      wline("minor_cols", tuple_text(w.minor->cols));
    }
    indent(os, depth + 1);
    os << "}\n";
  }
  for (const auto& n : r.notes) line("note", n);
  for (const auto& p : r.parts) write(os, p, "part", depth + 1);
  indent(os, depth);
  os << "}\n";
}

}  // namespace

std::string to_text(const PositivityReport& report) {
  std::ostringstream os;
  write(os, report, "report", 0);
  return os.str();
}

}  // namespace kpos

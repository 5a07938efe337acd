#include <charconv>
#include <sstream>

#include "eoilp/hypothesis_space.hpp"

namespace eoilp::hyp {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::invalid_argument("mode bias line " + std::to_string(line) + ": " + msg);
}

std::int64_t to_int(std::size_t line, const std::string& s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) fail(line, "bad integer '" + s + "'");
  return v;
}

double to_double(std::size_t line, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(line, "bad number '" + s + "'");
}

// Splits "pred(a, b,#) key=v ..." into the atom text and trailing options.
std::pair<std::string, std::vector<std::string>> atom_and_options(std::size_t line, const std::string& rest) {
  std::size_t end = rest.find(')');
  std::size_t sp = rest.find_first_of(" \t");
  if (end == std::string::npos || (sp != std::string::npos && sp < rest.find('('))) end = sp;
  else ++end;
  if (end == std::string::npos) end = rest.size();
  std::string atom = rest.substr(0, end);
  if (atom.empty()) fail(line, "missing atom");
  return {atom, split_ws(rest.substr(end))};
}

}  // namespace

ModeBias parse_mode_bias(std::string_view text) {
  ModeBias bias;
  bool phi_seen = false;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    if (auto c = raw.find('%'); c != std::string::npos) raw.erase(c);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    raw = raw.substr(first);
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t')) raw.pop_back();
    const auto sp = raw.find_first_of(" \t");
    const std::string kw = raw.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : raw.substr(raw.find_first_not_of(" \t", sp));

    if (kw == "phi") {
      if (!phi_seen) bias.phi.clear();
      phi_seen = true;
      for (const auto& w : split_ws(rest)) bias.phi.push_back(to_double(lineno, w));
    } else if (kw == "head") {
      try {
        bias.heads.push_back({logic::parse_atom(rest)});
      } catch (const logic::ParseError& e) {
        fail(lineno, e.what());
      }
    } else if (kw == "body") {
      auto [atom_text, opts] = atom_and_options(lineno, rest);
      BodyDecl d;
      std::string parsed = atom_text;
      if (auto h = parsed.rfind('#'); h != std::string::npos) {
        d.capture = true;
        parsed[h] = '_';
      }
      try {
        d.atom = logic::parse_atom(parsed);
      } catch (const logic::ParseError& e) {
        fail(lineno, e.what());
      }
      for (const auto& o : opts) {
        if (o == "negatable") d.negatable = true;
        else if (o == "nominal") d.nominal = true;
        else if (o.starts_with("numeric=")) d.numeric_var = o.substr(8);
        else if (o.starts_with("var=")) d.var_name = o.substr(4);
        else if (o.starts_with("min_cmp=")) d.min_comparisons = static_cast<int>(to_int(lineno, o.substr(8)));
        else fail(lineno, "unknown body option '" + o + "'");
      }
      if (d.capture && d.numeric_var.empty()) fail(lineno, "capture schema needs numeric=<key>");
      if (d.capture && d.negatable) fail(lineno, "capture schema cannot be negatable");
      bias.bodies.push_back(std::move(d));
    } else if (kw == "numeric") {
      auto w = split_ws(rest);
      if (w.size() != 4) fail(lineno, "expected: numeric <key> <min> <max> <multiplier>");
      bias.numeric_vars.push_back({w[0], to_int(lineno, w[1]), to_int(lineno, w[2]), to_double(lineno, w[3])});
    } else if (kw == "constraint") {
      auto w = split_ws(rest);
      if (w.empty()) fail(lineno, "empty constraint");
      if (w[0] == "forbid_all_nominal" && w.size() == 1)
        bias.constraints.push_back(BiasConstraint::forbid_all_nominal());
      else if (w[0] == "max_body_length" && w.size() == 2)
        bias.constraints.push_back(BiasConstraint::max_length(static_cast<int>(to_int(lineno, w[1]))));
      else if (w[0] == "forbid_pair" && w.size() == 3)
        bias.constraints.push_back(BiasConstraint::forbid_pair(w[1], w[2]));
      else
        fail(lineno, "unknown constraint '" + rest + "'");
    } else {
      fail(lineno, "unknown declaration '" + kw + "'");
    }
  }
  bias.validate();
  return bias;
}

std::string print_mode_bias(const ModeBias& bias) {
  std::ostringstream out;
  out << "phi";
  for (double p : bias.phi) out << ' ' << logic::format_probability(p);
  out << '\n';
  for (const auto& h : bias.heads) out << "head " << to_string(h.atom) << '\n';
  for (const auto& b : bias.bodies) {
    if (b.capture) {
      out << "body " << to_string(b.pattern("#")) << " numeric=" << b.numeric_var << " var=" << b.var_name
          << " min_cmp=" << b.min_comparisons;
    } else {
      out << "body " << to_string(b.atom);
      if (b.negatable) out << " negatable";
    }
    if (b.nominal) out << " nominal";
    out << '\n';
  }
  for (const auto& n : bias.numeric_vars)
    out << "numeric " << n.variable << ' ' << n.min << ' ' << n.max << ' ' << logic::format_probability(n.multiplier)
        << '\n';
  for (const auto& c : bias.constraints) {
    switch (c.kind) {
      case BiasConstraint::Kind::ForbidAllNominalBody: out << "constraint forbid_all_nominal\n"; break;
      case BiasConstraint::Kind::MaxBodyLength: out << "constraint max_body_length " << c.max_body_length << '\n'; break;
      case BiasConstraint::Kind::ForbidPredicatePair:
        out << "constraint forbid_pair " << c.first << ' ' << c.second << '\n';
        break;
    }
  }
  return out.str();
}

}  // namespace eoilp::hyp

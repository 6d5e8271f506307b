#include "morkit/netlist.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "morkit/errors.hpp"

namespace morkit {

int RlckNetlist::intern_node(const std::string& id) {
  if (id == "0") return kGround;
  auto it = node_index_.find(id);
  if (it != node_index_.end()) return it->second;
  int index = static_cast<int>(node_names_.size());
  node_index_.emplace(id, index);
  node_names_.push_back(id);
  node_degree_.push_back(0);
  return index;
}

void RlckNetlist::claim_name(const std::string& name) {
  if (!names_.insert(name).second)
    throw Error("duplicate element name '" + name + "'");
}

void RlckNetlist::note_element_on(int node) {
  if (node != kGround) ++node_degree_.at(node);
}

namespace {

void check_two_terminal(const std::string& name, int a, int b, double value,
                        const char* unit) {
  if (a == kGround && b == kGround)
    throw Error("element '" + name + "' connects ground to ground");
  if (a == b)
    throw Error("element '" + name + "' connects a node to itself");
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error("element '" + name + "' has nonpositive value " +
                std::to_string(value) + " " + unit);
}

}  // namespace

void RlckNetlist::add_resistor(const std::string& name, const std::string& a,
                               const std::string& b, double ohms) {
  claim_name(name);
  int na = intern_node(a), nb = intern_node(b);
  check_two_terminal(name, na, nb, ohms, "ohm");
  resistors_.push_back({name, na, nb, ohms});
  note_element_on(na);
  note_element_on(nb);
}

void RlckNetlist::add_capacitor(const std::string& name, const std::string& a,
                                const std::string& b, double farads) {
  claim_name(name);
  int na = intern_node(a), nb = intern_node(b);
  check_two_terminal(name, na, nb, farads, "farad");
  capacitors_.push_back({name, na, nb, farads});
  note_element_on(na);
  note_element_on(nb);
}

void RlckNetlist::add_inductor(const std::string& name, const std::string& a,
                               const std::string& b, double henries) {
  claim_name(name);
  int na = intern_node(a), nb = intern_node(b);
  check_two_terminal(name, na, nb, henries, "henry");
  inductor_index_.emplace(name, static_cast<int>(inductors_.size()));
  inductors_.push_back({name, na, nb, henries});
  note_element_on(na);
  note_element_on(nb);
}

void RlckNetlist::add_mutual(const std::string& name, const std::string& la,
                             const std::string& lb, double henries) {
  claim_name(name);
  auto ia = inductor_index_.find(la);
  if (ia == inductor_index_.end())
    throw Error("mutual '" + name + "' references unknown inductor '" + la + "'");
  auto ib = inductor_index_.find(lb);
  if (ib == inductor_index_.end())
    throw Error("mutual '" + name + "' references unknown inductor '" + lb + "'");
  if (ia->second == ib->second)
    throw Error("mutual '" + name + "' couples inductor '" + la +
                "' with itself");
  if (!std::isfinite(henries))
    throw Error("mutual '" + name + "' has non-finite value");
  const double bound = std::sqrt(inductors_[ia->second].henries *
                                 inductors_[ib->second].henries);
  if (!(std::abs(henries) < bound))
    throw Error("mutual '" + name + "' violates |M| < sqrt(La*Lb): |" +
                std::to_string(henries) + "| >= " + std::to_string(bound));
  auto pair = std::minmax(ia->second, ib->second);
  if (!mutual_pairs_.insert(pair).second)
    throw Error("duplicate mutual coupling between '" + la + "' and '" + lb +
                "'");
  mutuals_.push_back({name, ia->second, ib->second, henries});
}

void RlckNetlist::add_port(const std::string& name, const std::string& node) {
  claim_name(name);
  if (node == "0") throw Error("port '" + name + "' placed on ground");
  ports_.push_back({name, intern_node(node)});
}

void RlckNetlist::validate() const {
  for (const Port& port : ports_) {
    if (port.node < 0 || port.node >= node_count() ||
        node_degree_[port.node] == 0)
      throw Error("dangling port '" + port.name + "': node '" +
                  node_name(port.node) + "' is not connected to any element");
  }
}

namespace {

struct Token {
  std::string text;
  int column;  // 1-based
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start + 1)});
  }
  return tokens;
}

double parse_value(const Token& tok, int line_no) {
  double v = 0.0;
  const char* begin = tok.text.data();
  const char* end = begin + tok.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError("invalid numeric value '" + tok.text + "'", line_no,
                     tok.column);
  return v;
}

const Token& expect(const std::vector<Token>& tokens, size_t index,
                    const char* what, int line_no, const std::string& line) {
  if (index >= tokens.size())
    throw ParseError(std::string("missing ") + what, line_no,
                     static_cast<int>(line.size() + 1));
  return tokens[index];
}

void expect_end(const std::vector<Token>& tokens, size_t count, int line_no) {
  if (tokens.size() > count)
    throw ParseError("unexpected trailing token '" + tokens[count].text + "'",
                     line_no, tokens[count].column);
}

struct PendingMutual {
  std::string name, la, lb;
  double value;
  int line, column;
};

}  // namespace

RlckNetlist parse_netlist(std::istream& in) {
  RlckNetlist net;
  std::vector<PendingMutual> pending;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0].text[0] == '*') continue;  // comment

    const Token& head = tokens[0];
    if (head.text.size() < 2)
      throw ParseError("element name '" + head.text + "' too short", line_no,
                       head.column);
    const char kind = static_cast<char>(
        std::toupper(static_cast<unsigned char>(head.text[0])));
    try {
      switch (kind) {
        case 'R':
        case 'C':
        case 'L': {
          const Token& a = expect(tokens, 1, "first node", line_no, line);
          const Token& b = expect(tokens, 2, "second node", line_no, line);
          const Token& v = expect(tokens, 3, "element value", line_no, line);
          expect_end(tokens, 4, line_no);
          const double value = parse_value(v, line_no);
          if (kind == 'R')
            net.add_resistor(head.text, a.text, b.text, value);
          else if (kind == 'C')
            net.add_capacitor(head.text, a.text, b.text, value);
          else
            net.add_inductor(head.text, a.text, b.text, value);
          break;
        }
        case 'K': {
          const Token& la = expect(tokens, 1, "first inductor name", line_no, line);
          const Token& lb = expect(tokens, 2, "second inductor name", line_no, line);
          const Token& v = expect(tokens, 3, "mutual value", line_no, line);
          expect_end(tokens, 4, line_no);
          // deferred: the referenced inductors may appear later in the file
          pending.push_back({head.text, la.text, lb.text,
                             parse_value(v, line_no), line_no, head.column});
          break;
        }
        case 'P': {
          const Token& node = expect(tokens, 1, "port node", line_no, line);
          expect_end(tokens, 2, line_no);
          net.add_port(head.text, node.text);
          break;
        }
        default:
          throw ParseError("unknown element type '" + std::string(1, head.text[0]) +
                           "'", line_no, head.column);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, head.column);
    }
  }

  for (const PendingMutual& k : pending) {
    try {
      net.add_mutual(k.name, k.la, k.lb, k.value);
    } catch (const Error& e) {
      throw ParseError(e.what(), k.line, k.column);
    }
  }
  net.validate();
  return net;
}

RlckNetlist parse_netlist(const std::string& text) {
  std::istringstream in(text);
  return parse_netlist(in);
}

}  // namespace morkit
